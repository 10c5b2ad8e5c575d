#include "fractalssm/csr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fractalssm/errors.hpp"
#include "json.hpp"

namespace fractalssm {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_vertex(const SkipGraph& g, int v) {
    if (v < 0 || v >= g.n) throw OutOfRange("vertex " + std::to_string(v) + " out of range");
}

// Scores one position over whichever window cells the caller passes in.
double score_position(const ScanOrder& order, const SkipGraph& graph, int x, int y,
                      bool full_only, bool* full_out) {
    const int w = order.shape.width, h = order.shape.height;
    const int seq = order.seq_of(x, y);
    double s = 0.0;
    int neighbors = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            ++neighbors;
            const double de = (dx != 0 && dy != 0) ? kSqrt2 : 1.0;
            s += graph.distance(seq, order.seq_of(nx, ny)) / de;
        }
    if (full_out) *full_out = neighbors == 8;
    if (full_only && neighbors != 8) return 0.0;
    return s;
}

AggregationScores score_all(const ScanOrder& order, const SkipGraph& graph, bool full_only) {
    const int n = order.cells();
    AggregationScores out;
    out.score.assign(static_cast<size_t>(n), 0.0);
    out.full_window.assign(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const Coord p = order.seq_to_coord[static_cast<size_t>(i)];
        bool full = false;
        out.score[static_cast<size_t>(i)] = score_position(order, graph, p.x, p.y, full_only, &full);
        out.full_window[static_cast<size_t>(i)] = full ? 1 : 0;
    }
    return out;
}

// Exact all-pairs refresh for one inserted unit-cost edge {u,v}.
void apply_edge(SkipGraph& g, int u, int v) {
    const int n = g.n;
    std::vector<std::uint16_t> du(static_cast<size_t>(n)), dv(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x) {
        du[static_cast<size_t>(x)] = g.dist[static_cast<size_t>(x) * n + u];
        dv[static_cast<size_t>(x)] = g.dist[static_cast<size_t>(x) * n + v];
    }
    for (int x = 0; x < n; ++x) {
        const std::uint16_t xu = du[static_cast<size_t>(x)], xv = dv[static_cast<size_t>(x)];
        std::uint16_t* row = g.dist.data() + static_cast<size_t>(x) * n;
        for (int y = 0; y < n; ++y) {
            const std::uint16_t via_uv = static_cast<std::uint16_t>(xu + 1 + dv[static_cast<size_t>(y)]);
            const std::uint16_t via_vu = static_cast<std::uint16_t>(xv + 1 + du[static_cast<size_t>(y)]);
            row[y] = std::min({row[y], via_uv, via_vu});
        }
    }
}

}  // namespace

int SkipGraph::distance(int a, int b) const {
    check_vertex(*this, a);
    check_vertex(*this, b);
    return dist[static_cast<size_t>(a) * n + b];
}

bool SkipGraph::has_skip(int a, int b) const {
    const auto key = std::minmax(a, b);
    for (const auto& e : skip_edges)
        if (e.first == key.first && e.second == key.second) return true;
    return false;
}

SkipGraph make_path_graph(int n) {
    if (n < 1) throw InvalidArgument("path graph needs n >= 1");
    if (n > 65535) throw TooLarge("path graph limited to 65535 vertices");
    SkipGraph g;
    g.n = n;
    g.dist.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.dist[static_cast<size_t>(i) * n + j] = static_cast<std::uint16_t>(std::abs(i - j));
    return g;
}

AggregationScores aggregation_scores(const ScanOrder& order, const SkipGraph& graph) {
    if (order.shape.width < 3 || order.shape.height < 3)
        throw GridTooSmall("aggregation scores need a full 3x3 window; grid is " +
                           std::to_string(order.shape.width) + "x" +
                           std::to_string(order.shape.height));
    return score_all(order, graph, /*full_only=*/true);
}

AggregationScores aggregation_scores_partial(const ScanOrder& order, const SkipGraph& graph) {
    if (order.cells() < 2) throw GridTooSmall("scores need at least 2 cells");
    return score_all(order, graph, /*full_only=*/false);
}

int default_iterations(int n) {
    int it = 0;
    while ((1 << it) < n) ++it;
    return it;
}

SkipGraph build_skip_graph(const ScanOrder& order, int iterations, CsrOptions options,
                           std::vector<CsrRoundLog>* log) {
    const int n = order.cells();
    if (n < 2) throw InvalidArgument("skip graph needs at least 2 positions");
    if (order.cells() != static_cast<int>(order.seq_to_coord.size()))
        throw ShapeMismatch("order size mismatch");
    if (iterations < 0) iterations = default_iterations(n);

    SkipGraph g = make_path_graph(n);
    const bool flip = options.paper_literal_argmin;
    const int w = order.shape.width, h = order.shape.height;

    for (int round = 0; round < iterations; ++round) {
        // The partial scorer keeps degenerate strips constructible; on grids
        // with full windows the boundary subsets never dominate anyway.
        AggregationScores scores = aggregation_scores_partial(order, g);
        std::vector<int> by_score(static_cast<size_t>(n));
        std::iota(by_score.begin(), by_score.end(), 0);
        std::stable_sort(by_score.begin(), by_score.end(), [&](int a, int b) {
            const double sa = scores.score[static_cast<size_t>(a)];
            const double sb = scores.score[static_cast<size_t>(b)];
            if (sa != sb) return flip ? sa < sb : sa > sb;
            return a < b;
        });

        CsrRoundLog round_log;
        round_log.round = round;
        for (int u : by_score) {
            const Coord p = order.seq_to_coord[static_cast<size_t>(u)];
            // window neighbors ranked by distortion ratio
            std::vector<std::pair<double, int>> targets;  // (ratio, seq)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = p.x + dx, ny = p.y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const double de = (dx != 0 && dy != 0) ? kSqrt2 : 1.0;
                    const int v = order.seq_of(nx, ny);
                    targets.push_back({g.distance(u, v) / de, v});
                }
            std::stable_sort(targets.begin(), targets.end(), [&](const auto& a, const auto& b) {
                if (a.first != b.first) return flip ? a.first < b.first : a.first > b.first;
                return a.second < b.second;
            });
            for (const auto& [ratio, v] : targets) {
                (void)ratio;
                if (g.has_skip(u, v)) {
                    ++round_log.duplicates_skipped;
                    continue;
                }
                const auto key = std::minmax(u, v);
                g.skip_edges.push_back(key);
                apply_edge(g, key.first, key.second);
                round_log.source = u;
                round_log.target = v;
                round_log.inserted = true;
                break;
            }
            if (round_log.inserted) break;
        }
        if (log) log->push_back(round_log);
        if (!round_log.inserted) break;  // every candidate pair already present
    }
    return g;
}

std::vector<int> shortest_path_vertices(const SkipGraph& graph, int src, int dst) {
    check_vertex(graph, src);
    check_vertex(graph, dst);
    std::vector<std::vector<int>> skip_adj(static_cast<size_t>(graph.n));
    for (const auto& [u, v] : graph.skip_edges) {
        skip_adj[static_cast<size_t>(u)].push_back(v);
        skip_adj[static_cast<size_t>(v)].push_back(u);
    }
    std::vector<int> path{src};
    int cur = src;
    while (cur != dst) {
        const int need = graph.distance(cur, dst) - 1;
        int best = -1;
        auto consider = [&](int nb) {
            if (nb < 0 || nb >= graph.n) return;
            if (graph.distance(nb, dst) != need) return;
            if (best < 0 || nb < best) best = nb;
        };
        consider(cur - 1);
        consider(cur + 1);
        for (int nb : skip_adj[static_cast<size_t>(cur)]) consider(nb);
        if (best < 0) throw Error("routing table inconsistent with adjacency");
        path.push_back(best);
        cur = best;
    }
    return path;
}

std::string graph_to_dot(const SkipGraph& graph) {
    std::string out = "graph csr {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int i = 0; i + 1 < graph.n; ++i)
        out += "  " + std::to_string(i) + " -- " + std::to_string(i + 1) + ";\n";
    for (const auto& [u, v] : graph.skip_edges)
        out += "  " + std::to_string(u) + " -- " + std::to_string(v) +
               " [style=dashed, color=red, constraint=false];\n";
    out += "}\n";
    return out;
}

std::string graph_to_json(const SkipGraph& graph) {
    nlohmann::ordered_json doc;
    doc["n"] = graph.n;
    auto skips = nlohmann::ordered_json::array();
    for (const auto& [u, v] : graph.skip_edges) skips.push_back({u, v});
    doc["skips"] = std::move(skips);
    return doc.dump(2) + "\n";
}

}  // namespace fractalssm
