// Grid serialization orders: fractal space-filling curves (Hilbert, Coil,
// Meurthe) and linear baselines (raster, zigzag, windowed local scan).
//
// Geometry convention: x is the column, y is the row, y = 0 is the top row
// (image convention). A ScanOrder is a bijection between sequence indices
// 0..W*H-1 and grid cells.
//
// Fractal kinds require square grids with power-of-two side and are built by
// quadrant recursion. All three are unit-step (consecutive cells are 4-adjacent)
// on every 2^k grid:
//   Hilbert  - the classic U-order: [transpose(H), H, H, antitranspose(H)],
//              entry (0,0), exit (s-1,0).
//   Coil     - Moore-style ring of four rotated Hilbert sub-curves winding
//              once around the grid center; entry (s/2-1,0), exit (s/2,0).
//   Meurthe  - mixed-species recursion M = [transpose(V), V, M, antitranspose(M)]
//              where V is the vertical boustrophedon; alternates serpentine and
//              recursive quadrant fills. Entry (0,0), exit (s-1,0).
// (The 3x3-block curves these last two take their names from cannot tile
// power-of-two grids; these are the even-grid analogues.)
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractalssm/errors.hpp"

namespace fractalssm {

enum class CurveKind { Hilbert, Coil, Meurthe, Raster, Zigzag, LocalWindow };

CurveKind curve_kind_from_string(const std::string& name);  // throws UnknownKind
std::string curve_kind_name(CurveKind kind);
bool is_fractal_kind(CurveKind kind);

struct GridShape {
    int width = 0;
    int height = 0;
    int cells() const { return width * height; }
};

struct Coord {
    int x = 0;
    int y = 0;
    bool operator==(const Coord&) const = default;
};

struct ScanOrder {
    CurveKind kind = CurveKind::Raster;
    GridShape shape;
    int window = 0;                   // window side, LocalWindow only
    std::vector<Coord> seq_to_coord;  // sequence index -> cell
    std::vector<int> coord_to_seq;    // y*width + x -> sequence index

    int cells() const { return shape.cells(); }
    int seq_of(int x, int y) const { return coord_to_seq[static_cast<size_t>(y) * shape.width + x]; }
};

// Build an order. Fractal kinds demand width == height == 2^k (InvalidShape
// otherwise); linear kinds accept any positive shape. LocalWindow requires
// window > 0 and window | width, window | height.
ScanOrder generate_order(CurveKind kind, GridShape shape, int window = 4);

// Fractal order for an arbitrary w x h rectangle: walk the Hilbert curve of
// the smallest enclosing 2^k square and keep the in-rectangle cells. Matches
// generate_order(Hilbert) exactly when the shape already is a 2^k square.
ScanOrder generate_order_clipped(GridShape shape);

// True when every length-4^m run of the order sits inside one 2^m x 2^m
// aligned sub-block (the fractal self-similarity property). Pre: square
// power-of-two order, 4^m <= cells.
bool block_locality_check(const ScanOrder& order, int level);

// Serialize as "index,x,y" CSV rows (LF line endings, header included).
std::string order_to_csv(const ScanOrder& order);

}  // namespace fractalssm
