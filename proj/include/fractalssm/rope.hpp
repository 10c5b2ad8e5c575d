// Rotary positional encoding. Channel pairs (v[2t], v[2t+1]) rotate by angle
// theta_t * pos with theta_t = 10000^(-t / (d_head/2)), t in [0, d_head/2).
// Rotations are orthogonal (norms preserved) and relative: the score
// <rope(q,n), rope(k,m)> depends on n - m only.
#pragma once

#include <vector>

#include "fractalssm/errors.hpp"
#include "fractalssm/ssm.hpp"

namespace fractalssm {

struct RopeTable {
    int d_head = 0;
    int max_len = 0;
    std::vector<double> cos_v, sin_v;  // (max_len, d_head/2)
    size_t index(int pos, int t) const { return static_cast<size_t>(pos) * (d_head / 2) + t; }
};

// InvalidArgument unless d_head is positive and even and max_len positive.
// Angles are theta(k) * (pos_scale * pos). A non-default pos_scale lets
// callers encode fractional positions (e.g. curve progress t/n against a
// fixed reference length) so tables built for different sequence lengths
// cover the same angle range instead of extrapolating.
RopeTable make_rope_table(int d_head, int max_len, double pos_scale = 1.0);

double rope_theta(int d_head, int t);

// Rotate v (length d_head) in place at sequence position pos. OutOfRange when
// pos is outside the table.
void apply_rope(const RopeTable& table, double* v, int pos);
std::vector<double> rope_applied(const RopeTable& table, std::vector<double> v, int pos);

// Inverse rotation (transpose); used by the model backward pass.
void apply_rope_inverse(const RopeTable& table, double* v, int pos);

// <rope(q,n), rope(k,m)>; function of (q, k, n-m) only.
double rope_score(const RopeTable& table, const std::vector<double>& q,
                  const std::vector<double>& k, int n, int m);

// Rotate every position of every batch item in place; channel count must
// equal d_head and length fit the table.
void embed_positions(const RopeTable& table, SequenceBatch& batch);

}  // namespace fractalssm
