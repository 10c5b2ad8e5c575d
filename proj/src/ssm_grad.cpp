#include "fractalssm/ssm_grad.hpp"

#include <cmath>

#include "fractalssm/rng.hpp"

namespace fractalssm {

namespace {

struct SkipAdjacency {
    std::vector<std::vector<int>> below, above;
    explicit SkipAdjacency(const SkipGraph& g)
        : below(static_cast<size_t>(g.n)), above(static_cast<size_t>(g.n)) {
        for (const auto& [u, v] : g.skip_edges) {
            below[static_cast<size_t>(v)].push_back(u);
            above[static_cast<size_t>(u)].push_back(v);
        }
    }
};

}  // namespace

GradientBundle bdpp_backward(const SsmParams& p, const SequenceBatch& x, const SkipGraph& graph,
                             const SequenceBatch& upstream, const BdppTrace* trace) {
    if (upstream.batch != x.batch || upstream.length != x.length ||
        upstream.channels != x.channels)
        throw ShapeMismatch("upstream shape does not match input");
    BdppTrace local;
    if (!trace) {
        bdpp_forward(p, x, graph, &local);
        trace = &local;
    }
    const SkipAdjacency adj(graph);
    const int n = p.n, C = p.channels, S = p.d_state;
    const size_t slice = static_cast<size_t>(n) * C * S;

    GradientBundle out;
    out.d_x = SequenceBatch(x.batch, n, C);
    out.d_a_bar.assign(slice, 0.0);
    out.d_b_bar.assign(slice, 0.0);
    out.d_c.assign(static_cast<size_t>(n) * S, 0.0);

    std::vector<double> dB(slice), dF(slice);
    for (int b = 0; b < x.batch; ++b) {
        const double* F = trace->f.data() + static_cast<size_t>(b) * slice;
        const double* B = trace->b.data() + static_cast<size_t>(b) * slice;
        // adjoint of the descending sweep, itself ascending
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < C; ++c) {
                const double g = upstream.at(b, t, c);
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double gather = 0.0;
                    if (t > 0) gather += dB[p.bar_index(t - 1, c, s)];
                    for (int u : adj.below[static_cast<size_t>(t)])
                        gather += dB[p.bar_index(u, c, s)];
                    dB[k] = g * p.c_out[p.cs_index(t, s)] + p.a_bar[k] * gather;
                }
            }
        // adjoint of the ascending sweep, itself descending
        for (int t = n - 1; t >= 0; --t)
            for (int c = 0; c < C; ++c) {
                const double g = upstream.at(b, t, c);
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double acc = g * p.c_out[p.cs_index(t, s)];
                    if (t < n - 1)
                        acc += p.a_bar[p.bar_index(t + 1, c, s)] * dF[p.bar_index(t + 1, c, s)];
                    for (int v : adj.above[static_cast<size_t>(t)])
                        acc += p.a_bar[p.bar_index(v, c, s)] * dF[p.bar_index(v, c, s)];
                    if (t == n - 1) acc += dB[k];
                    dF[k] = acc;
                }
            }
        // parameter and input gradients
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < C; ++c) {
                const double g = upstream.at(b, t, c);
                const double xv = x.at(b, t, c);
                double dxv = 0.0;
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    dxv += dF[k] * p.b_bar[k];
                    out.d_b_bar[k] += dF[k] * xv;
                    out.d_c[p.cs_index(t, s)] += g * (F[k] + B[k]);
                    if (t > 0) {
                        double gather_f = F[p.bar_index(t - 1, c, s)];
                        for (int u : adj.below[static_cast<size_t>(t)])
                            gather_f += F[p.bar_index(u, c, s)];
                        double gather_db = dB[p.bar_index(t - 1, c, s)];
                        for (int u : adj.below[static_cast<size_t>(t)])
                            gather_db += dB[p.bar_index(u, c, s)];
                        out.d_a_bar[k] += dF[k] * gather_f + gather_db * B[k];
                    }
                }
                out.d_x.at(b, t, c) = dxv;
            }
    }
    return out;
}

GradientBundle recurrence_backward(const SsmParams& p, const SequenceBatch& x,
                                   const SequenceBatch& upstream) {
    if (upstream.batch != x.batch || upstream.length != x.length ||
        upstream.channels != x.channels)
        throw ShapeMismatch("upstream shape does not match input");
    const int n = p.n, C = p.channels, S = p.d_state;
    const size_t slice = static_cast<size_t>(n) * C * S;

    GradientBundle out;
    out.d_x = SequenceBatch(x.batch, n, C);
    out.d_a_bar.assign(slice, 0.0);
    out.d_b_bar.assign(slice, 0.0);
    out.d_c.assign(static_cast<size_t>(n) * S, 0.0);

    std::vector<double> h(slice);  // h after step t, replayed
    std::vector<double> dh(static_cast<size_t>(C) * S);
    for (int b = 0; b < x.batch; ++b) {
        std::vector<double> state(static_cast<size_t>(C) * S, 0.0);
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < C; ++c)
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double& hs = state[static_cast<size_t>(c) * S + s];
                    hs = p.a_bar[k] * hs + p.b_bar[k] * x.at(b, t, c);
                    h[k] = hs;
                }
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int t = n - 1; t >= 0; --t)
            for (int c = 0; c < C; ++c) {
                const double g = upstream.at(b, t, c);
                const double xv = x.at(b, t, c);
                double dxv = 0.0;
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double& dhs = dh[static_cast<size_t>(c) * S + s];
                    dhs += g * p.c_out[p.cs_index(t, s)];
                    out.d_c[p.cs_index(t, s)] += g * h[k];
                    const double h_prev = t > 0 ? h[p.bar_index(t - 1, c, s)] : 0.0;
                    out.d_a_bar[k] += dhs * h_prev;
                    out.d_b_bar[k] += dhs * xv;
                    dxv += dhs * p.b_bar[k];
                    dhs *= p.a_bar[k];
                }
                out.d_x.at(b, t, c) = dxv;
            }
    }
    return out;
}

double zoh_a_bar_d_delta(double a, double delta) { return a * std::exp(a * delta); }
double zoh_a_bar_d_a(double a, double delta) { return delta * std::exp(a * delta); }
double zoh_phi_d_delta(double a, double delta) { return std::exp(a * delta); }

double zoh_phi_d_a(double a, double delta) {
    const double z = a * delta;
    if (std::fabs(z) < 1e-6)
        return delta * delta * (0.5 + z * (1.0 / 3.0 + z * (1.0 / 8.0 + z / 30.0)));
    const double ez = std::exp(z);
    return (z * ez - ez + 1.0) / (a * a);
}

FdReport finite_difference_check(const SsmParams& params, const SequenceBatch& x,
                                 const SkipGraph& graph, std::uint64_t seed) {
    Rng rng(seed);
    SequenceBatch g(x.batch, x.length, x.channels);
    for (double& v : g.data) v = rng.uniform(0.4, 1.2);

    const auto loss = [&](const SsmParams& p, const SequenceBatch& xx) {
        const SequenceBatch y = bdpp_forward(p, xx, graph);
        double acc = 0.0;
        for (size_t i = 0; i < y.data.size(); ++i) acc += g.data[i] * y.data[i];
        return acc;
    };

    const GradientBundle analytic = bdpp_backward(params, x, graph, g);

    const auto step_of = [](double theta) { return std::max(1e-5, 1e-7 * std::fabs(theta)); };
    const auto rel = [](double a, double n) {
        const double denom = std::max({std::fabs(a), std::fabs(n), 1e-12});
        return std::fabs(a - n) / denom;
    };

    FdReport report;
    const auto probe = [&](std::vector<double>& theta, size_t idx, double analytic_value,
                           FdGroupReport& group, SsmParams& p, SequenceBatch& xx) {
        const double save = theta[idx];
        const double h = step_of(save);
        theta[idx] = save + h;
        const double up = loss(p, xx);
        theta[idx] = save - h;
        const double down = loss(p, xx);
        theta[idx] = save;
        const double numeric = (up - down) / (2.0 * h);
        group.worst_rel_err = std::max(group.worst_rel_err, rel(analytic_value, numeric));
        ++group.checked;
    };

    SsmParams p = params;
    SequenceBatch xx = x;
    for (size_t i = 0; i < xx.data.size(); ++i)
        probe(xx.data, i, analytic.d_x.data[i], report.x, p, xx);
    for (size_t i = 0; i < p.a_bar.size(); ++i)
        probe(p.a_bar, i, analytic.d_a_bar[i], report.a_bar, p, xx);
    for (size_t i = 0; i < p.b_bar.size(); ++i)
        probe(p.b_bar, i, analytic.d_b_bar[i], report.b_bar, p, xx);
    for (size_t i = 0; i < p.c_out.size(); ++i)
        probe(p.c_out, i, analytic.d_c[i], report.c, p, xx);

    report.worst_rel_err = std::max({report.x.worst_rel_err, report.a_bar.worst_rel_err,
                                     report.b_bar.worst_rel_err, report.c.worst_rel_err});
    return report;
}

}  // namespace fractalssm
