// Structure Distortion Score: for each interior sequence position i (the four
// neighbors i-2..i+2 all exist), the aggregated Euclidean grid distance to its
// four sequence neighbors,
//     SDS(i) = agg_{j in {i-2,i-1,i+1,i+2}} ||p_i - p_j||_2,
// with agg = mean (default) or sum. Mean-SDS of a unit-step order lies in
// [(1+sqrt(2))/2, 1.5]; serialization jumps (raster row wrap, window hops)
// push patches above that band, which is what the threshold table surfaces.
//
// Threshold coverage counts patches with SDS strictly below each threshold
// (default comparator `<`; `<=` available). Strict comparison keeps the
// straight-run raster patches, which sit exactly at 1.5, out of the 1.5
// bucket; unit-step fractal orders have no patch at exactly 1.5, so their
// coverage at 1.5 reads 1.0 under either comparator.
#pragma once

#include <string>
#include <vector>

#include "fractalssm/curves.hpp"

namespace fractalssm {

enum class SdsAggregation { Mean, Sum };
enum class SdsComparator { StrictLess, LessEqual };

struct SdsPatch {
    int index = 0;  // sequence position
    int x = 0, y = 0;
    double sds = 0.0;
};

struct SdsThresholdRow {
    double threshold = 0.0;
    double coverage = 0.0;  // fraction of interior patches below threshold
};

struct SdsReport {
    CurveKind kind = CurveKind::Raster;
    GridShape shape;
    int window = 0;
    SdsAggregation aggregation = SdsAggregation::Mean;
    SdsComparator comparator = SdsComparator::StrictLess;
    int denominator = 0;  // interior patch count
    std::vector<SdsPatch> per_patch;
    std::vector<SdsThresholdRow> table;
};

// Score every interior position of the order. TooShort when cells < 5.
SdsReport compute_sds(const ScanOrder& order, SdsAggregation agg = SdsAggregation::Mean);

// Fill report.table. Thresholds must be non-empty (EmptyThresholds) and
// strictly ascending (InvalidArgument).
void threshold_table(SdsReport& report, const std::vector<double>& thresholds,
                     SdsComparator cmp = SdsComparator::StrictLess);

// Grayscale PGM (plain P2): darker = higher SDS. Pixels are normalized over
// [lo, hi]; the single-report overload normalizes over its own patch range.
// Non-interior cells render white (255); a degenerate range renders interior
// cells mid-gray (128).
std::string heatmap_pgm(const SdsReport& report, double lo, double hi);
std::string heatmap_pgm(const SdsReport& report);

// JSON document with kind/width/height/aggregation/denominator/per_patch/table.
std::string report_to_json(const SdsReport& report);

std::string aggregation_name(SdsAggregation agg);
SdsAggregation aggregation_from_string(const std::string& name);  // UnknownKind

}  // namespace fractalssm
