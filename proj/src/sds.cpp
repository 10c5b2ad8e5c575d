#include "fractalssm/sds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fractalssm/errors.hpp"
#include "json.hpp"

namespace fractalssm {

SdsReport compute_sds(const ScanOrder& order, SdsAggregation agg) {
    const int n = order.cells();
    if (n < 5) throw TooShort("sds needs at least 5 cells, got " + std::to_string(n));
    SdsReport report;
    report.kind = order.kind;
    report.shape = order.shape;
    report.window = order.window;
    report.aggregation = agg;
    report.denominator = n - 4;
    report.per_patch.reserve(static_cast<size_t>(n - 4));
    for (int i = 2; i < n - 2; ++i) {
        const Coord p = order.seq_to_coord[static_cast<size_t>(i)];
        double sum = 0.0;
        for (int j : {i - 2, i - 1, i + 1, i + 2}) {
            const Coord q = order.seq_to_coord[static_cast<size_t>(j)];
            const double dx = p.x - q.x, dy = p.y - q.y;
            sum += std::sqrt(dx * dx + dy * dy);
        }
        const double value = agg == SdsAggregation::Mean ? sum / 4.0 : sum;
        report.per_patch.push_back({i, p.x, p.y, value});
    }
    return report;
}

void threshold_table(SdsReport& report, const std::vector<double>& thresholds,
                     SdsComparator cmp) {
    if (thresholds.empty()) throw EmptyThresholds("threshold list is empty");
    for (size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw InvalidArgument("thresholds must be strictly ascending");
    report.comparator = cmp;
    report.table.clear();
    report.table.reserve(thresholds.size());
    for (double t : thresholds) {
        int count = 0;
        for (const SdsPatch& p : report.per_patch) {
            const bool in = cmp == SdsComparator::StrictLess ? p.sds < t : p.sds <= t;
            count += in ? 1 : 0;
        }
        report.table.push_back({t, static_cast<double>(count) / report.denominator});
    }
}

std::string heatmap_pgm(const SdsReport& report, double lo, double hi) {
    const int w = report.shape.width, h = report.shape.height;
    std::vector<int> gray(static_cast<size_t>(w) * h, 255);
    const bool degenerate = !(hi > lo);
    for (const SdsPatch& p : report.per_patch) {
        int g = 128;
        if (!degenerate) {
            double norm = (p.sds - lo) / (hi - lo);
            norm = std::clamp(norm, 0.0, 1.0);
            g = 255 - static_cast<int>(std::lround(255.0 * norm));
        }
        gray[static_cast<size_t>(p.y) * w + p.x] = g;
    }
    std::string out = "P2\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out += std::to_string(gray[static_cast<size_t>(y) * w + x]);
            out += x + 1 == w ? '\n' : ' ';
        }
    }
    return out;
}

std::string heatmap_pgm(const SdsReport& report) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const SdsPatch& p : report.per_patch) {
        lo = std::min(lo, p.sds);
        hi = std::max(hi, p.sds);
    }
    if (report.per_patch.empty()) lo = hi = 0.0;
    return heatmap_pgm(report, lo, hi);
}

std::string report_to_json(const SdsReport& report) {
    nlohmann::ordered_json doc;
    doc["kind"] = curve_kind_name(report.kind);
    doc["width"] = report.shape.width;
    doc["height"] = report.shape.height;
    if (report.kind == CurveKind::LocalWindow) doc["window"] = report.window;
    doc["aggregation"] = aggregation_name(report.aggregation);
    doc["denominator"] = report.denominator;
    auto patches = nlohmann::ordered_json::array();
    for (const SdsPatch& p : report.per_patch)
        patches.push_back({{"index", p.index}, {"x", p.x}, {"y", p.y}, {"sds", p.sds}});
    doc["per_patch"] = std::move(patches);
    auto table = nlohmann::ordered_json::array();
    for (const SdsThresholdRow& row : report.table)
        table.push_back({{"threshold", row.threshold}, {"coverage", row.coverage}});
    doc["table"] = std::move(table);
    return doc.dump(2) + "\n";
}

std::string aggregation_name(SdsAggregation agg) {
    return agg == SdsAggregation::Mean ? "mean" : "sum";
}

SdsAggregation aggregation_from_string(const std::string& name) {
    if (name == "mean") return SdsAggregation::Mean;
    if (name == "sum") return SdsAggregation::Sum;
    throw UnknownKind("unknown aggregation: " + name);
}

}  // namespace fractalssm
