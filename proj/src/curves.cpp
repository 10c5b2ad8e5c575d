// Scan order construction. Fractal kinds are assembled by explicit quadrant
// recursion on cell lists; the D4 transforms below act on local sub-square
// coordinates before the quadrant offset is applied.
#include "fractalssm/curves.hpp"

#include <bit>
#include <cstdio>
#include <utility>

namespace fractalssm {

namespace {

using CoordList = std::vector<Coord>;

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

// local transforms on an s x s sub-square
Coord transpose(Coord c, int) { return {c.y, c.x}; }
Coord antitranspose(Coord c, int s) { return {s - 1 - c.y, s - 1 - c.x}; }
Coord rot_entry_right(Coord c, int s) { return {s - 1 - c.y, c.x}; }  // (0,0) -> right edge top
Coord rot_entry_left(Coord c, int s) { return {c.y, s - 1 - c.x}; }   // (0,0) -> left edge bottom

void append_transformed(CoordList& out, const CoordList& sub, int s,
                        Coord (*xf)(Coord, int), Coord offset) {
    for (Coord c : sub) {
        Coord t = xf ? xf(c, s) : c;
        out.push_back({t.x + offset.x, t.y + offset.y});
    }
}

// Vertical boustrophedon on an s x s square: columns left to right, even
// columns downward, odd columns upward. Entry (0,0), exit (s-1,0) for even s.
CoordList boustrophedon(int s) {
    CoordList out;
    out.reserve(static_cast<size_t>(s) * s);
    for (int x = 0; x < s; ++x) {
        if (x % 2 == 0) {
            for (int y = 0; y < s; ++y) out.push_back({x, y});
        } else {
            for (int y = s - 1; y >= 0; --y) out.push_back({x, y});
        }
    }
    return out;
}

// Hilbert U-order: entry (0,0), exit (s-1,0).
CoordList hilbert(int s) {
    if (s == 1) return {{0, 0}};
    const int h = s / 2;
    CoordList sub = hilbert(h);
    CoordList out;
    out.reserve(static_cast<size_t>(s) * s);
    append_transformed(out, sub, h, transpose, {0, 0});
    append_transformed(out, sub, h, nullptr, {0, h});
    append_transformed(out, sub, h, nullptr, {h, h});
    append_transformed(out, sub, h, antitranspose, {h, 0});
    return out;
}

// Moore-style coil: four rotated Hilbert sub-curves winding once around the
// center. Entry (s/2-1,0), exit (s/2,0).
CoordList coil(int s) {
    if (s == 1) return {{0, 0}};
    const int h = s / 2;
    CoordList sub = hilbert(h);
    CoordList out;
    out.reserve(static_cast<size_t>(s) * s);
    append_transformed(out, sub, h, rot_entry_right, {0, 0});
    append_transformed(out, sub, h, rot_entry_right, {0, h});
    append_transformed(out, sub, h, rot_entry_left, {h, h});
    append_transformed(out, sub, h, rot_entry_left, {h, 0});
    return out;
}

// Mixed-species recursion: serpentine fills in the first two quadrants,
// recursive fills in the last two. Entry (0,0), exit (s-1,0).
CoordList meurthe(int s) {
    if (s == 1) return {{0, 0}};
    const int h = s / 2;
    CoordList serp = boustrophedon(h);
    CoordList sub = meurthe(h);
    CoordList out;
    out.reserve(static_cast<size_t>(s) * s);
    append_transformed(out, serp, h, transpose, {0, 0});
    append_transformed(out, serp, h, nullptr, {0, h});
    append_transformed(out, sub, h, nullptr, {h, h});
    append_transformed(out, sub, h, antitranspose, {h, 0});
    return out;
}

CoordList linear_order(CurveKind kind, GridShape shape, int window) {
    CoordList out;
    out.reserve(static_cast<size_t>(shape.cells()));
    switch (kind) {
        case CurveKind::Raster:
            for (int y = 0; y < shape.height; ++y)
                for (int x = 0; x < shape.width; ++x) out.push_back({x, y});
            break;
        case CurveKind::Zigzag:
            for (int y = 0; y < shape.height; ++y) {
                if (y % 2 == 0)
                    for (int x = 0; x < shape.width; ++x) out.push_back({x, y});
                else
                    for (int x = shape.width - 1; x >= 0; --x) out.push_back({x, y});
            }
            break;
        case CurveKind::LocalWindow:
            // windows in raster order, zigzag inside each window (turn patches
            // inside windows keep local distortion below the straight-run level)
            for (int wy = 0; wy < shape.height / window; ++wy)
                for (int wx = 0; wx < shape.width / window; ++wx)
                    for (int ly = 0; ly < window; ++ly) {
                        const int y = wy * window + ly;
                        if (ly % 2 == 0)
                            for (int lx = 0; lx < window; ++lx) out.push_back({wx * window + lx, y});
                        else
                            for (int lx = window - 1; lx >= 0; --lx) out.push_back({wx * window + lx, y});
                    }
            break;
        default:
            break;
    }
    return out;
}

ScanOrder finalize(CurveKind kind, GridShape shape, int window, CoordList cells) {
    ScanOrder order;
    order.kind = kind;
    order.shape = shape;
    order.window = window;
    order.seq_to_coord = std::move(cells);
    order.coord_to_seq.assign(static_cast<size_t>(shape.cells()), -1);
    for (size_t i = 0; i < order.seq_to_coord.size(); ++i) {
        const Coord c = order.seq_to_coord[i];
        order.coord_to_seq[static_cast<size_t>(c.y) * shape.width + c.x] = static_cast<int>(i);
    }
    return order;
}

}  // namespace

CurveKind curve_kind_from_string(const std::string& name) {
    if (name == "hilbert") return CurveKind::Hilbert;
    if (name == "coil") return CurveKind::Coil;
    if (name == "meurthe") return CurveKind::Meurthe;
    if (name == "raster") return CurveKind::Raster;
    if (name == "zigzag") return CurveKind::Zigzag;
    if (name == "local") return CurveKind::LocalWindow;
    throw UnknownKind("unknown curve kind: " + name);
}

std::string curve_kind_name(CurveKind kind) {
    switch (kind) {
        case CurveKind::Hilbert: return "hilbert";
        case CurveKind::Coil: return "coil";
        case CurveKind::Meurthe: return "meurthe";
        case CurveKind::Raster: return "raster";
        case CurveKind::Zigzag: return "zigzag";
        case CurveKind::LocalWindow: return "local";
    }
    throw UnknownKind("unknown curve kind enum");
}

bool is_fractal_kind(CurveKind kind) {
    return kind == CurveKind::Hilbert || kind == CurveKind::Coil || kind == CurveKind::Meurthe;
}

ScanOrder generate_order(CurveKind kind, GridShape shape, int window) {
    if (shape.width < 1 || shape.height < 1)
        throw InvalidShape("grid dimensions must be positive");
    if (is_fractal_kind(kind)) {
        if (shape.width != shape.height || !is_pow2(shape.width))
            throw InvalidShape("fractal orders need a square power-of-two grid, got " +
                               std::to_string(shape.width) + "x" + std::to_string(shape.height));
        CoordList cells;
        switch (kind) {
            case CurveKind::Hilbert: cells = hilbert(shape.width); break;
            case CurveKind::Coil: cells = coil(shape.width); break;
            default: cells = meurthe(shape.width); break;
        }
        return finalize(kind, shape, 0, std::move(cells));
    }
    if (kind == CurveKind::LocalWindow) {
        if (window < 1 || shape.width % window != 0 || shape.height % window != 0)
            throw InvalidShape("local window must divide both grid dimensions");
        return finalize(kind, shape, window, linear_order(kind, shape, window));
    }
    return finalize(kind, shape, 0, linear_order(kind, shape, 0));
}

ScanOrder generate_order_clipped(GridShape shape) {
    if (shape.width < 1 || shape.height < 1)
        throw InvalidShape("grid dimensions must be positive");
    const int side = static_cast<int>(std::bit_ceil(
        static_cast<unsigned>(std::max(shape.width, shape.height))));
    CoordList walk = hilbert(side);
    CoordList cells;
    cells.reserve(static_cast<size_t>(shape.cells()));
    for (Coord c : walk)
        if (c.x < shape.width && c.y < shape.height) cells.push_back(c);
    return finalize(CurveKind::Hilbert, shape, 0, std::move(cells));
}

bool block_locality_check(const ScanOrder& order, int level) {
    const int side = order.shape.width;
    if (order.shape.height != side || !is_pow2(side))
        throw InvalidShape("block locality is defined on square power-of-two orders");
    if (level < 0 || (1 << level) > side)
        throw OutOfRange("block level out of range");
    const int block = 1 << level;
    const long run = static_cast<long>(block) * block;
    const long n = order.cells();
    for (long start = 0; start < n; start += run) {
        const Coord first = order.seq_to_coord[static_cast<size_t>(start)];
        const int bx = first.x / block, by = first.y / block;
        for (long i = start + 1; i < start + run; ++i) {
            const Coord c = order.seq_to_coord[static_cast<size_t>(i)];
            if (c.x / block != bx || c.y / block != by) return false;
        }
    }
    return true;
}

std::string order_to_csv(const ScanOrder& order) {
    std::string out = "index,x,y\n";
    char buf[64];
    for (size_t i = 0; i < order.seq_to_coord.size(); ++i) {
        const Coord c = order.seq_to_coord[i];
        std::snprintf(buf, sizeof buf, "%zu,%d,%d\n", i, c.x, c.y);
        out += buf;
    }
    return out;
}

}  // namespace fractalssm
