// Hand-derived reverse-mode gradients for the BDPP kernel and the causal
// recurrence, plus the ZOH discretization chain and a finite-difference
// harness. No autodiff anywhere; each adjoint recursion mirrors one forward
// recursion:
//
//   dB_i = g_i C_i + A_bar_i . (dB_{i-1} + sum_{(u,i) skip} dB_u)   (ascending)
//   dF_i = g_i C_i + A_bar_{i+1} . dF_{i+1} + sum_{(i,v) skip} A_bar_v . dF_v
//          + [i = n-1] dB_{n-1}                                     (descending)
//   d x_i   = <dF_i, B_bar_i>
//   d B_bar = dF_i * x_i
//   d C_i   = sum_c g_i (F_i + B_i)
//   d A_bar_i = dF_i . (F_{i-1} + sum skips F_u)
//             + (dB_{i-1} + sum_{(u,i) skip} dB_u) . B_i            (i >= 1)
// with d A_bar_0 = 0 (A_bar_0 never enters the forward pass).
#pragma once

#include "fractalssm/ssm.hpp"

namespace fractalssm {

struct GradientBundle {
    SequenceBatch d_x;            // (batch, n, channels)
    std::vector<double> d_a_bar;  // (n, channels, d_state), summed over batch
    std::vector<double> d_b_bar;  // (n, channels, d_state)
    std::vector<double> d_c;      // (n, d_state)
};

// upstream is dLoss/dy with the same shape as y. The trace from bdpp_forward
// may be passed to skip the recomputation of F and B.
GradientBundle bdpp_backward(const SsmParams& params, const SequenceBatch& x,
                             const SkipGraph& graph, const SequenceBatch& upstream,
                             const BdppTrace* trace = nullptr);

// Same contract for the causal recurrence (no graph, no bidirectional pass).
GradientBundle recurrence_backward(const SsmParams& params, const SequenceBatch& x,
                                   const SequenceBatch& upstream);

// ZOH chain partials (closed forms, guarded series near delta*a = 0):
//   d a_bar / d delta = a exp(a delta)        d a_bar / d a = delta exp(a delta)
//   d phi   / d delta = exp(a delta)          d phi   / d a = (z e^z - e^z + 1)/a^2, z = a delta
double zoh_a_bar_d_delta(double a, double delta);
double zoh_a_bar_d_a(double a, double delta);
double zoh_phi_d_delta(double a, double delta);
double zoh_phi_d_a(double a, double delta);

struct FdGroupReport {
    double worst_rel_err = 0.0;
    int checked = 0;
};

struct FdReport {
    FdGroupReport x, a_bar, b_bar, c;
    double worst_rel_err = 0.0;
};

// Central finite differences of loss = <g, y> against bdpp_backward, with a
// seeded upstream g. Step per parameter: max(1e-5, 1e-7 |theta|). Relative
// error denominator: max(|analytic|, |numeric|, 1e-12).
FdReport finite_difference_check(const SsmParams& params, const SequenceBatch& x,
                                 const SkipGraph& graph, std::uint64_t seed);

}  // namespace fractalssm
