// Cross-state routing: a greedy skip-graph over sequence positions.
//
// Vertices are sequence indices 0..n-1 of a ScanOrder; the base edges form the
// path i -- i+1. Each round scores every grid position p by the information
// aggregation score
//     S(p) = sum_{p' in 3x3(p)} D_f(p,p') / D_e(p,p'),
// where D_f is the current routing (graph) distance between the cells'
// sequence indices and D_e their Euclidean grid distance (1 or sqrt 2). The
// round picks the source u with maximal S (ties: lowest sequence index), then
// the window neighbor v of u with maximal ratio D_f/D_e (ties: lowest sequence
// index), and inserts the skip edge {u,v}. A pair that already exists as a
// skip edge is logged as a duplicate and the next-ranked candidate is taken
// instead. Default round count is ceil(log2 n).
//
// Routing distances are kept exact after every insertion with the one-edge
// all-pairs refresh D(x,y) <- min{D(x,y), D(x,u)+1+D(v,y), D(x,v)+1+D(u,y)},
// which is equivalent to BFS recomputation for a single added unit-cost edge.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractalssm/curves.hpp"

namespace fractalssm {

struct SkipGraph {
    int n = 0;
    std::vector<std::pair<int, int>> skip_edges;  // insertion order, u < v
    std::vector<std::uint16_t> dist;              // n*n exact routing distances

    int distance(int a, int b) const;  // OutOfRange on bad vertex
    bool has_skip(int a, int b) const;
};

// Path graph with exact distances |i-j| and no skip edges. n >= 1.
SkipGraph make_path_graph(int n);

struct AggregationScores {
    std::vector<double> score;         // S(p) per sequence position
    std::vector<std::uint8_t> full_window;  // 1 when all 8 window cells are in-grid
};

// Scores over full 3x3 windows only; positions without one carry score 0 and
// full_window 0. GridTooSmall unless both dimensions are >= 3.
AggregationScores aggregation_scores(const ScanOrder& order, const SkipGraph& graph);

// Boundary-tolerant variant: every position is scored over the in-grid subset
// of its window. Works on any grid with >= 2 cells; used during construction.
AggregationScores aggregation_scores_partial(const ScanOrder& order, const SkipGraph& graph);

struct CsrOptions {
    // Paper-literal selection: argmin for both the source score and the target
    // ratio instead of the default argmax ("greatest misalignment") reading.
    bool paper_literal_argmin = false;
};

struct CsrRoundLog {
    int round = 0;
    int source = -1;           // sequence index, -1 when nothing was insertable
    int target = -1;
    int duplicates_skipped = 0;
    bool inserted = false;
};

// Greedy construction; iterations < 0 means ceil(log2 n). Pre: n >= 2.
SkipGraph build_skip_graph(const ScanOrder& order, int iterations = -1,
                           CsrOptions options = {}, std::vector<CsrRoundLog>* log = nullptr);

// Lexicographically smallest shortest path src -> dst, both endpoints included.
std::vector<int> shortest_path_vertices(const SkipGraph& graph, int src, int dst);

// Graphviz document: path edges first, then skip edges (dashed) in insertion order.
std::string graph_to_dot(const SkipGraph& graph);

// {"n": ..., "skips": [[u,v], ...]} in insertion order.
std::string graph_to_json(const SkipGraph& graph);

int default_iterations(int n);  // ceil(log2 n), 0 for n <= 1

}  // namespace fractalssm
