// Selective state-space kernel and its bidirectional dynamic-programming
// evaluation over a skip graph.
//
// Shapes (all float64, row-major, innermost index last):
//   x, y        : (batch, n, channels)
//   A           : (channels, d_state)        continuous-time diagonal, negative
//   B, C        : (n, d_state)               per-position selective projections
//   delta       : (n, channels)              positive step sizes
//   A_bar, B_bar: (n, channels, d_state)     zero-order-hold discretization
//
// Discretization (ZOH):  A_bar = exp(delta*A),  B_bar = (exp(delta*A)-1)/A * B,
// with a guarded series for |delta*A| < 1e-6.
//
// BDPP evaluates, for every sequence position i over the path+skip DAG:
//   F_0 = B_bar_0 x_0
//   F_i = B_bar_i x_i + A_bar_i . (F_{i-1} + sum_{(u,i) skip, u<i} F_u)
//   B_{n-1} = F_{n-1}
//   B_i = A_bar_{i+1} . B_{i+1} + sum_{(i,v) skip, v>i} A_bar_v . B_v
//   y_i = <C_i, F_i + B_i>
// The skip contribution is always scaled by A_bar of the higher endpoint, and
// the root identity B_{n-1} = F_{n-1} deliberately double-counts the root's
// own state: for n = 1, y = 2 <C, B_bar x>. Both follow the source algorithm
// literally; oracle_unrolled reproduces them from an independent coding.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fractalssm/csr.hpp"
#include "fractalssm/errors.hpp"

namespace fractalssm {

struct SequenceBatch {
    int batch = 0, length = 0, channels = 0;
    std::vector<double> data;  // (b*length + t)*channels + c

    SequenceBatch() = default;
    SequenceBatch(int b, int n, int c)
        : batch(b), length(n), channels(c),
          data(static_cast<size_t>(b) * n * c, 0.0) {}
    double& at(int b, int t, int c) {
        return data[(static_cast<size_t>(b) * length + t) * channels + c];
    }
    double at(int b, int t, int c) const {
        return data[(static_cast<size_t>(b) * length + t) * channels + c];
    }
};

struct SsmParams {
    int n = 0, channels = 0, d_state = 0;
    std::vector<double> a;      // (channels, d_state)
    std::vector<double> b_in;   // (n, d_state)
    std::vector<double> c_out;  // (n, d_state)
    std::vector<double> delta;  // (n, channels)

    std::vector<double> a_bar;  // (n, channels, d_state)
    std::vector<double> b_bar;  // (n, channels, d_state)
    bool discretized = false;

    size_t bar_index(int t, int c, int s) const {
        return (static_cast<size_t>(t) * channels + c) * d_state + s;
    }
    size_t cs_index(int t, int s) const { return static_cast<size_t>(t) * d_state + s; }
};

// Scalar ZOH pieces, exposed for the gradient chain and its tests.
double zoh_a_bar(double a, double delta);  // exp(a*delta)
double zoh_phi(double a, double delta);    // (exp(a*delta)-1)/a, series near 0

// Fill a_bar/b_bar from (a, b_in, delta). Shapes must agree (ShapeMismatch).
void discretize(SsmParams& params);

// Construct a kernel directly from discretized arrays (tests, fixtures).
SsmParams make_discretized(int n, int channels, int d_state, std::vector<double> a_bar,
                           std::vector<double> b_bar, std::vector<double> c_out);

// Classic causal scan: h_t = A_bar_t . h_{t-1} + B_bar_t x_t, y_t = <C_t, h_t>.
SequenceBatch recurrence_forward(const SsmParams& params, const SequenceBatch& x);

// Convolutional view for position-constant parameters: returns K as
// (length, channels) with K[l,c] = sum_s C[s] A_bar[c,s]^l B_bar[c,s].
// NonConstantParams when any row differs from position 0.
std::vector<double> conv_kernel(const SsmParams& params, int length);

struct BdppTrace {
    std::vector<double> f, b;  // (batch, n, channels, d_state)
};

struct BdppStats {
    std::size_t edge_visits = 0;  // accumulations along one directional sweep
};

SequenceBatch bdpp_forward(const SsmParams& params, const SequenceBatch& x,
                           const SkipGraph& graph, BdppTrace* trace = nullptr,
                           BdppStats* stats = nullptr);

// Expected per-direction edge traversal count: (n-1) path + skip edges.
std::size_t edge_visit_count(const SkipGraph& graph);

// Independent re-implementations used as oracles. oracle_unrolled accumulates
// F and B over explicit adjacency lists and must match bdpp_forward exactly
// (modulo float noise). oracle_pathsum realizes the shortest-path weight-sum
// semantics (weights multiply A_bar over the path excluding the source,
// including the target); it matches the causal half of the recurrence on path
// graphs but is NOT equal to bdpp_forward in general (single-counted roots,
// opposite-endpoint scaling on descending paths) - it exists to let tests
// probe those documented divergences.
SequenceBatch oracle_unrolled(const SsmParams& params, const SequenceBatch& x,
                              const SkipGraph& graph);  // TooLarge n > 256
SequenceBatch oracle_pathsum(const SsmParams& params, const SequenceBatch& x,
                             const SkipGraph& graph);  // TooLarge n > 128

// JSON fixture round-trip for kernel test cases.
std::string fixture_to_json(const SsmParams& params, const SequenceBatch& x,
                            const SequenceBatch& expected_y, const SkipGraph& graph);
struct SsmFixture {
    SsmParams params;
    SequenceBatch x;
    SequenceBatch expected_y;
    SkipGraph graph;
};
SsmFixture fixture_from_json(const std::string& text);

}  // namespace fractalssm
