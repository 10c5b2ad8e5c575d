// Reference implementations of the BDPP semantics, coded independently of
// bdpp_forward on purpose: explicit per-node adjacency, scalar state vectors,
// no shared helpers. These are the oracles the fast path is tested against.
#include <algorithm>
#include <cmath>

#include "fractalssm/ssm.hpp"

namespace fractalssm {

namespace {

// Multiplicity matters: a skip edge that coincides with a path edge (or a
// repeated skip) is a parallel edge and contributes once per copy, exactly as
// the accumulator recurrences sum the path predecessor and every skip partner
// as separate terms. Sorting is only for determinism.
std::vector<std::vector<int>> neighbors_of(const SkipGraph& graph) {
    std::vector<std::vector<int>> nbr(static_cast<size_t>(graph.n));
    for (int i = 0; i + 1 < graph.n; ++i) {
        nbr[static_cast<size_t>(i)].push_back(i + 1);
        nbr[static_cast<size_t>(i + 1)].push_back(i);
    }
    for (const auto& [u, v] : graph.skip_edges) {
        nbr[static_cast<size_t>(u)].push_back(v);
        nbr[static_cast<size_t>(v)].push_back(u);
    }
    for (auto& list : nbr) std::sort(list.begin(), list.end());
    return nbr;
}

}  // namespace

SequenceBatch oracle_unrolled(const SsmParams& p, const SequenceBatch& x, const SkipGraph& graph) {
    if (p.n > 256) throw TooLarge("oracle_unrolled capped at n = 256");
    if (!p.discretized) throw NotDiscretized("kernel parameters are not discretized");
    if (x.length != p.n || x.channels != p.channels || graph.n != p.n)
        throw ShapeMismatch("oracle_unrolled shape mismatch");
    const int n = p.n;
    const auto nbr = neighbors_of(graph);

    SequenceBatch y(x.batch, n, p.channels);
    for (int b = 0; b < x.batch; ++b)
        for (int c = 0; c < p.channels; ++c)
            for (int s = 0; s < p.d_state; ++s) {
                const auto abar = [&](int t) { return p.a_bar[p.bar_index(t, c, s)]; };
                const auto bbar = [&](int t) { return p.b_bar[p.bar_index(t, c, s)]; };
                // ascending accumulator: every neighbor below feeds through
                // this node's own A_bar
                std::vector<double> fwd(static_cast<size_t>(n), 0.0);
                for (int t = 0; t < n; ++t) {
                    double pulled = 0.0;
                    for (int j : nbr[static_cast<size_t>(t)])
                        if (j < t) pulled += fwd[static_cast<size_t>(j)];
                    fwd[static_cast<size_t>(t)] = bbar(t) * x.at(b, t, c) + abar(t) * pulled;
                }
                // descending accumulator: every neighbor above feeds scaled by
                // that neighbor's A_bar; the root hands back its forward state
                std::vector<double> bwd(static_cast<size_t>(n), 0.0);
                bwd[static_cast<size_t>(n - 1)] = fwd[static_cast<size_t>(n - 1)];
                for (int t = n - 2; t >= 0; --t) {
                    double pulled = 0.0;
                    for (int j : nbr[static_cast<size_t>(t)])
                        if (j > t) pulled += abar(j) * bwd[static_cast<size_t>(j)];
                    bwd[static_cast<size_t>(t)] = pulled;
                }
                for (int t = 0; t < n; ++t)
                    y.at(b, t, c) += p.c_out[p.cs_index(t, s)] *
                                     (fwd[static_cast<size_t>(t)] + bwd[static_cast<size_t>(t)]);
            }
    return y;
}

SequenceBatch oracle_pathsum(const SsmParams& p, const SequenceBatch& x, const SkipGraph& graph) {
    if (p.n > 128) throw TooLarge("oracle_pathsum capped at n = 128");
    if (!p.discretized) throw NotDiscretized("kernel parameters are not discretized");
    if (x.length != p.n || x.channels != p.channels || graph.n != p.n)
        throw ShapeMismatch("oracle_pathsum shape mismatch");
    const int n = p.n;

    // routing distances recomputed here by BFS so the oracle does not lean on
    // the graph's incremental table
    const auto nbr = neighbors_of(graph);
    SkipGraph routed = graph;
    routed.dist.assign(static_cast<size_t>(n) * n, 0);
    for (int src = 0; src < n; ++src) {
        std::vector<int> dist(static_cast<size_t>(n), -1);
        std::vector<int> queue{src};
        dist[static_cast<size_t>(src)] = 0;
        for (size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            for (int v : nbr[static_cast<size_t>(u)])
                if (dist[static_cast<size_t>(v)] < 0) {
                    dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                    queue.push_back(v);
                }
        }
        for (int v = 0; v < n; ++v)
            routed.dist[static_cast<size_t>(src) * n + v] = static_cast<std::uint16_t>(dist[static_cast<size_t>(v)]);
    }

    SequenceBatch y(x.batch, n, p.channels);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::vector<int> path = shortest_path_vertices(routed, j, i);
            for (int b = 0; b < x.batch; ++b)
                for (int c = 0; c < p.channels; ++c) {
                    double acc = 0.0;
                    for (int s = 0; s < p.d_state; ++s) {
                        double w = p.b_bar[p.bar_index(j, c, s)] * x.at(b, j, c);
                        for (size_t k = 1; k < path.size(); ++k)
                            w *= p.a_bar[p.bar_index(path[k], c, s)];
                        acc += p.c_out[p.cs_index(i, s)] * w;
                    }
                    y.at(b, i, c) += acc;
                }
        }
    return y;
}

}  // namespace fractalssm
