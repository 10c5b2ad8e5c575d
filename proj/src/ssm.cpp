#include "fractalssm/ssm.hpp"

#include <cmath>

#include "json.hpp"

namespace fractalssm {

namespace {

void check_shapes(const SsmParams& p, const SequenceBatch& x) {
    if (!p.discretized) throw NotDiscretized("kernel parameters are not discretized");
    if (x.length != p.n || x.channels != p.channels)
        throw ShapeMismatch("input shape (" + std::to_string(x.length) + "," +
                            std::to_string(x.channels) + ") does not match params (" +
                            std::to_string(p.n) + "," + std::to_string(p.channels) + ")");
    const size_t bar = static_cast<size_t>(p.n) * p.channels * p.d_state;
    if (p.a_bar.size() != bar || p.b_bar.size() != bar ||
        p.c_out.size() != static_cast<size_t>(p.n) * p.d_state)
        throw ShapeMismatch("kernel parameter arrays have inconsistent sizes");
}

void check_graph(const SsmParams& p, const SkipGraph& graph) {
    if (graph.n != p.n) throw ShapeMismatch("graph size does not match sequence length");
    for (const auto& [u, v] : graph.skip_edges)
        if (u < 0 || v >= p.n || u >= v) throw InvalidArgument("malformed skip edge");
}

// skip partners, bucketed by the higher endpoint's role
struct SkipAdjacency {
    std::vector<std::vector<int>> below;  // below[i] = {u < i with skip (u,i)}
    std::vector<std::vector<int>> above;  // above[i] = {v > i with skip (i,v)}
    explicit SkipAdjacency(const SkipGraph& g)
        : below(static_cast<size_t>(g.n)), above(static_cast<size_t>(g.n)) {
        for (const auto& [u, v] : g.skip_edges) {
            below[static_cast<size_t>(v)].push_back(u);
            above[static_cast<size_t>(u)].push_back(v);
        }
    }
};

}  // namespace

double zoh_a_bar(double a, double delta) { return std::exp(a * delta); }

double zoh_phi(double a, double delta) {
    const double z = a * delta;
    if (std::fabs(z) < 1e-6)
        return delta * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    return (std::exp(z) - 1.0) / a;
}

void discretize(SsmParams& p) {
    const size_t n = static_cast<size_t>(p.n);
    if (p.a.size() != static_cast<size_t>(p.channels) * p.d_state ||
        p.b_in.size() != n * p.d_state || p.c_out.size() != n * p.d_state ||
        p.delta.size() != n * p.channels)
        throw ShapeMismatch("continuous parameter arrays have inconsistent sizes");
    p.a_bar.assign(n * p.channels * p.d_state, 0.0);
    p.b_bar.assign(n * p.channels * p.d_state, 0.0);
    for (int t = 0; t < p.n; ++t)
        for (int c = 0; c < p.channels; ++c) {
            const double dlt = p.delta[static_cast<size_t>(t) * p.channels + c];
            for (int s = 0; s < p.d_state; ++s) {
                const double a = p.a[static_cast<size_t>(c) * p.d_state + s];
                const size_t k = p.bar_index(t, c, s);
                p.a_bar[k] = zoh_a_bar(a, dlt);
                p.b_bar[k] = zoh_phi(a, dlt) * p.b_in[p.cs_index(t, s)];
            }
        }
    p.discretized = true;
}

SsmParams make_discretized(int n, int channels, int d_state, std::vector<double> a_bar,
                           std::vector<double> b_bar, std::vector<double> c_out) {
    SsmParams p;
    p.n = n;
    p.channels = channels;
    p.d_state = d_state;
    p.a_bar = std::move(a_bar);
    p.b_bar = std::move(b_bar);
    p.c_out = std::move(c_out);
    p.discretized = true;
    const size_t bar = static_cast<size_t>(n) * channels * d_state;
    if (p.a_bar.size() != bar || p.b_bar.size() != bar ||
        p.c_out.size() != static_cast<size_t>(n) * d_state)
        throw ShapeMismatch("kernel parameter arrays have inconsistent sizes");
    return p;
}

SequenceBatch recurrence_forward(const SsmParams& p, const SequenceBatch& x) {
    check_shapes(p, x);
    SequenceBatch y(x.batch, x.length, x.channels);
    std::vector<double> h(static_cast<size_t>(p.channels) * p.d_state);
    for (int b = 0; b < x.batch; ++b) {
        std::fill(h.begin(), h.end(), 0.0);
        for (int t = 0; t < p.n; ++t)
            for (int c = 0; c < p.channels; ++c) {
                const double xv = x.at(b, t, c);
                double acc = 0.0;
                for (int s = 0; s < p.d_state; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double& hs = h[static_cast<size_t>(c) * p.d_state + s];
                    hs = p.a_bar[k] * hs + p.b_bar[k] * xv;
                    acc += p.c_out[p.cs_index(t, s)] * hs;
                }
                y.at(b, t, c) = acc;
            }
    }
    return y;
}

std::vector<double> conv_kernel(const SsmParams& p, int length) {
    check_shapes(p, SequenceBatch(0, p.n, p.channels));
    if (length < 1) throw InvalidArgument("kernel length must be positive");
    for (int t = 1; t < p.n; ++t) {
        for (int c = 0; c < p.channels; ++c)
            for (int s = 0; s < p.d_state; ++s)
                if (p.a_bar[p.bar_index(t, c, s)] != p.a_bar[p.bar_index(0, c, s)] ||
                    p.b_bar[p.bar_index(t, c, s)] != p.b_bar[p.bar_index(0, c, s)])
                    throw NonConstantParams("A_bar/B_bar vary across positions");
        for (int s = 0; s < p.d_state; ++s)
            if (p.c_out[p.cs_index(t, s)] != p.c_out[p.cs_index(0, s)])
                throw NonConstantParams("C varies across positions");
    }
    std::vector<double> kernel(static_cast<size_t>(length) * p.channels, 0.0);
    for (int c = 0; c < p.channels; ++c)
        for (int s = 0; s < p.d_state; ++s) {
            const double ab = p.a_bar[p.bar_index(0, c, s)];
            const double bb = p.b_bar[p.bar_index(0, c, s)];
            const double cs = p.c_out[p.cs_index(0, s)];
            double pow = 1.0;
            for (int l = 0; l < length; ++l) {
                kernel[static_cast<size_t>(l) * p.channels + c] += cs * pow * bb;
                pow *= ab;
            }
        }
    return kernel;
}

SequenceBatch bdpp_forward(const SsmParams& p, const SequenceBatch& x, const SkipGraph& graph,
                           BdppTrace* trace, BdppStats* stats) {
    check_shapes(p, x);
    check_graph(p, graph);
    const SkipAdjacency adj(graph);
    const int n = p.n, C = p.channels, S = p.d_state;
    const size_t slice = static_cast<size_t>(n) * C * S;
    SequenceBatch y(x.batch, n, C);
    if (trace) {
        trace->f.assign(static_cast<size_t>(x.batch) * slice, 0.0);
        trace->b.assign(static_cast<size_t>(x.batch) * slice, 0.0);
    }
    std::vector<double> f(slice), bwd(slice);
    std::size_t visits = 0;
    for (int b = 0; b < x.batch; ++b) {
        // ascending sweep
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < C; ++c) {
                const double xv = x.at(b, t, c);
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double gather = 0.0;
                    if (t > 0) gather += f[p.bar_index(t - 1, c, s)];
                    for (int u : adj.below[static_cast<size_t>(t)])
                        gather += f[p.bar_index(u, c, s)];
                    f[k] = p.b_bar[k] * xv + p.a_bar[k] * gather;
                }
                if (b == 0 && c == 0) {
                    if (t > 0) ++visits;
                    visits += adj.below[static_cast<size_t>(t)].size();
                }
            }
        // descending sweep; root reuses its forward state
        for (int t = n - 1; t >= 0; --t)
            for (int c = 0; c < C; ++c)
                for (int s = 0; s < S; ++s) {
                    const size_t k = p.bar_index(t, c, s);
                    double acc = 0.0;
                    if (t == n - 1) {
                        acc = f[k];
                    } else {
                        acc = p.a_bar[p.bar_index(t + 1, c, s)] * bwd[p.bar_index(t + 1, c, s)];
                        for (int v : adj.above[static_cast<size_t>(t)])
                            acc += p.a_bar[p.bar_index(v, c, s)] * bwd[p.bar_index(v, c, s)];
                    }
                    bwd[k] = acc;
                }
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int s = 0; s < S; ++s)
                    acc += p.c_out[p.cs_index(t, s)] * (f[p.bar_index(t, c, s)] + bwd[p.bar_index(t, c, s)]);
                y.at(b, t, c) = acc;
            }
        if (trace) {
            std::copy(f.begin(), f.end(), trace->f.begin() + static_cast<size_t>(b) * slice);
            std::copy(bwd.begin(), bwd.end(), trace->b.begin() + static_cast<size_t>(b) * slice);
        }
    }
    if (stats) stats->edge_visits = visits;
    return y;
}

std::size_t edge_visit_count(const SkipGraph& graph) {
    return static_cast<std::size_t>(graph.n - 1) + graph.skip_edges.size();
}

std::string fixture_to_json(const SsmParams& p, const SequenceBatch& x,
                            const SequenceBatch& expected_y, const SkipGraph& graph) {
    nlohmann::ordered_json doc;
    doc["n"] = p.n;
    doc["channels"] = p.channels;
    doc["d_state"] = p.d_state;
    doc["a_bar"] = p.a_bar;
    doc["b_bar"] = p.b_bar;
    doc["c"] = p.c_out;
    doc["batch"] = x.batch;
    doc["x"] = x.data;
    doc["expected_y"] = expected_y.data;
    auto skips = nlohmann::ordered_json::array();
    for (const auto& [u, v] : graph.skip_edges) skips.push_back({u, v});
    doc["skips"] = std::move(skips);
    return doc.dump(2) + "\n";
}

SsmFixture fixture_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure(std::string("bad fixture JSON: ") + e.what());
    }
    SsmFixture fx;
    const int n = doc.at("n").get<int>();
    const int channels = doc.at("channels").get<int>();
    const int d_state = doc.at("d_state").get<int>();
    fx.params = make_discretized(n, channels, d_state,
                                 doc.at("a_bar").get<std::vector<double>>(),
                                 doc.at("b_bar").get<std::vector<double>>(),
                                 doc.at("c").get<std::vector<double>>());
    const int batch = doc.at("batch").get<int>();
    fx.x = SequenceBatch(batch, n, channels);
    fx.x.data = doc.at("x").get<std::vector<double>>();
    fx.expected_y = SequenceBatch(batch, n, channels);
    fx.expected_y.data = doc.at("expected_y").get<std::vector<double>>();
    fx.graph = make_path_graph(n);
    for (const auto& e : doc.at("skips")) {
        const int u = e.at(0).get<int>(), v = e.at(1).get<int>();
        fx.graph.skip_edges.push_back({u, v});
    }
    if (fx.x.data.size() != static_cast<size_t>(batch) * n * channels ||
        fx.expected_y.data.size() != fx.x.data.size())
        throw ShapeMismatch("fixture arrays have inconsistent sizes");
    return fx;
}

}  // namespace fractalssm
