#include "fractalssm/verify.hpp"

#include <cmath>
#include <cstdio>

#include "fractalssm/csr.hpp"
#include "fractalssm/curves.hpp"
#include "fractalssm/rng.hpp"
#include "fractalssm/rope.hpp"
#include "fractalssm/ssm.hpp"
#include "fractalssm/ssm_grad.hpp"
#include "json.hpp"

namespace fractalssm {

namespace {

constexpr std::uint64_t kSsmTag = 1, kGradTag = 2, kRopeTag = 3;

double inf_norm(const std::vector<double>& v) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::fabs(x));
    return mx;
}

double rel_between(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0;
    for (size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::fabs(a[i] - b[i]));
    return diff / std::max({inf_norm(a), inf_norm(b), 1e-30});
}

void note(VerifySuiteResult& suite, double rel, std::uint64_t seed) {
    ++suite.instances;
    if (rel > suite.worst_rel_err) {
        suite.worst_rel_err = rel;
        suite.worst_seed = seed;
    }
    if (!(rel <= suite.tolerance)) ++suite.failures;  // NaN counts as failure
}

std::vector<GridShape> rectangles(int max_cells) {
    std::vector<GridShape> shapes;
    for (int w = 3; w <= 8; ++w)
        for (int h = 3; h <= 8; ++h)
            if (w * h <= max_cells) shapes.push_back({w, h});
    return shapes;
}

SkipGraph random_skip_graph(int n, int max_skips, Rng& rng) {
    SkipGraph graph = make_path_graph(n);
    if (n < 2) return graph;
    const int count = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_skips) + 1));
    for (int e = 0; e < count; ++e) {
        const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
        const int v = u + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1 - u)));
        graph.skip_edges.push_back({u, v});  // duplicates allowed: parallel edges
    }
    return graph;
}

// Alternates CSR-built graphs over clipped Hilbert rectangles with random
// skip sets; fills params (discretized directly) and input from rng.
struct SsmInstance {
    SsmParams params;
    SequenceBatch x;
    SkipGraph graph;
};

SsmInstance make_ssm_instance(Rng& rng, int index, int max_cells, bool positive) {
    SsmInstance inst;
    if (index % 2 == 0) {
        static const std::vector<GridShape> big = rectangles(64);
        static const std::vector<GridShape> small = rectangles(32);
        const auto& pool = max_cells >= 64 ? big : small;
        const GridShape shape = pool[static_cast<size_t>(rng.below(pool.size()))];
        const ScanOrder order = generate_order_clipped(shape);
        inst.graph = build_skip_graph(order);
    } else {
        const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cells)));
        inst.graph = random_skip_graph(n, 6, rng);
    }
    const int n = inst.graph.n;
    const int channels = 1 + static_cast<int>(rng.below(3));
    const int d_state = 1 + static_cast<int>(rng.below(3));
    const size_t bar = static_cast<size_t>(n) * channels * d_state;
    std::vector<double> a_bar(bar), b_bar(bar), c(static_cast<size_t>(n) * d_state);
    for (double& v : a_bar) v = positive ? rng.uniform(0.3, 0.9) : rng.uniform(-0.98, 0.98);
    for (double& v : b_bar) v = positive ? rng.uniform(0.3, 1.5) : rng.uniform(-1.5, 1.5);
    for (double& v : c) v = positive ? rng.uniform(0.3, 1.5) : rng.uniform(-1.5, 1.5);
    inst.params = make_discretized(n, channels, d_state, std::move(a_bar), std::move(b_bar),
                                   std::move(c));
    const int batch = positive ? 1 : 1 + static_cast<int>(rng.below(2));
    inst.x = SequenceBatch(batch, n, channels);
    for (double& v : inst.x.data) v = positive ? rng.uniform(0.3, 1.5) : rng.uniform(-1.5, 1.5);
    return inst;
}

VerifySuiteResult run_ssm_suite(std::uint64_t master, int instances) {
    VerifySuiteResult suite;
    suite.name = "ssm";
    suite.ran = true;
    suite.tolerance = 1e-10;
    const std::uint64_t base = derive_seed(master, kSsmTag);
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(i));
        Rng rng(seed);
        const SsmInstance inst = make_ssm_instance(rng, i, 64, /*positive=*/false);
        const SequenceBatch fast = bdpp_forward(inst.params, inst.x, inst.graph);
        const SequenceBatch ref = oracle_unrolled(inst.params, inst.x, inst.graph);
        note(suite, rel_between(fast.data, ref.data), seed);
    }
    // recurrence vs convolution on constant-parameter kernels
    for (int i = 0; i < 16; ++i) {
        const std::uint64_t seed = derive_seed(base, 0x636f6e76ULL + static_cast<std::uint64_t>(i));
        Rng rng(seed);
        const int n = 4 + static_cast<int>(rng.below(29));
        const int channels = 1 + static_cast<int>(rng.below(2));
        const int d_state = 1 + static_cast<int>(rng.below(3));
        const size_t per = static_cast<size_t>(channels) * d_state;
        std::vector<double> row_a(per), row_b(per), row_c(static_cast<size_t>(d_state));
        for (double& v : row_a) v = rng.uniform(-0.9, 0.9);
        for (double& v : row_b) v = rng.uniform(-1.5, 1.5);
        for (double& v : row_c) v = rng.uniform(-1.5, 1.5);
        std::vector<double> a_bar(static_cast<size_t>(n) * per), b_bar(a_bar.size());
        std::vector<double> c(static_cast<size_t>(n) * d_state);
        for (int t = 0; t < n; ++t) {
            std::copy(row_a.begin(), row_a.end(), a_bar.begin() + static_cast<size_t>(t) * per);
            std::copy(row_b.begin(), row_b.end(), b_bar.begin() + static_cast<size_t>(t) * per);
            std::copy(row_c.begin(), row_c.end(), c.begin() + static_cast<size_t>(t) * d_state);
        }
        const SsmParams p = make_discretized(n, channels, d_state, std::move(a_bar),
                                             std::move(b_bar), std::move(c));
        SequenceBatch x(1, n, channels);
        for (double& v : x.data) v = rng.uniform(-1.5, 1.5);
        const std::vector<double> kernel = conv_kernel(p, n);
        SequenceBatch conv(1, n, channels);
        for (int t = 0; t < n; ++t)
            for (int ch = 0; ch < channels; ++ch) {
                double acc = 0.0;
                for (int l = 0; l <= t; ++l)
                    acc += kernel[static_cast<size_t>(l) * channels + ch] * x.at(0, t - l, ch);
                conv.at(0, t, ch) = acc;
            }
        const SequenceBatch rec = recurrence_forward(p, x);
        note(suite, rel_between(conv.data, rec.data), seed);
    }
    return suite;
}

VerifySuiteResult run_grad_suite(std::uint64_t master, int instances) {
    VerifySuiteResult suite;
    suite.name = "grad";
    suite.ran = true;
    suite.tolerance = 1e-6;
    const std::uint64_t base = derive_seed(master, kGradTag);
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(i));
        Rng rng(seed);
        const SsmInstance inst = make_ssm_instance(rng, i, 32, /*positive=*/true);
        const FdReport fd = finite_difference_check(inst.params, inst.x, inst.graph,
                                                    derive_seed(seed, 0x67ULL));
        note(suite, fd.worst_rel_err, seed);
    }
    return suite;
}

VerifySuiteResult run_rope_suite(std::uint64_t master, int instances) {
    VerifySuiteResult suite;
    suite.name = "rope";
    suite.ran = true;
    suite.tolerance = 1e-10;
    const std::uint64_t base = derive_seed(master, kRopeTag);
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(i));
        Rng rng(seed);
        const int d_head = 2 * (1 + static_cast<int>(rng.below(8)));  // 2..16
        const int max_len = 96;
        const RopeTable table = make_rope_table(d_head, max_len);
        std::vector<double> q(static_cast<size_t>(d_head)), k(q.size());
        for (double& v : q) v = rng.uniform(-2.0, 2.0);
        for (double& v : k) v = rng.uniform(-2.0, 2.0);
        const int span = 32;
        const int n = static_cast<int>(rng.below(span));
        const int m = static_cast<int>(rng.below(span));
        const int shift = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - span)));

        const double score = rope_score(table, q, k, n, m);
        const double shifted = rope_score(table, q, k, n + shift, m + shift);
        const double rel_shift =
            std::fabs(score - shifted) / std::max({std::fabs(score), std::fabs(shifted), 1e-30});

        const std::vector<double> rotated = rope_applied(table, q, n);
        double nq = 0.0, nr = 0.0;
        for (double v : q) nq += v * v;
        for (double v : rotated) nr += v * v;
        const double rel_norm =
            std::fabs(std::sqrt(nq) - std::sqrt(nr)) / std::max(std::sqrt(nq), 1e-30);

        // norm preservation holds to 1e-12, tighter than the suite tolerance;
        // scale so one `note` covers both checks at their own tolerances
        note(suite, std::max(rel_shift, rel_norm * (suite.tolerance / 1e-12)), seed);
    }
    return suite;
}

nlohmann::ordered_json suite_json(const VerifySuiteResult& suite) {
    nlohmann::ordered_json doc;
    doc["name"] = suite.name;
    doc["ran"] = suite.ran;
    doc["instances"] = suite.instances;
    doc["failures"] = suite.failures;
    doc["tolerance"] = suite.tolerance;
    doc["worst_rel_err"] = suite.worst_rel_err;
    doc["worst_seed"] = suite.worst_seed;
    doc["passed"] = suite.passed();
    return doc;
}

void suite_text(std::string& out, const VerifySuiteResult& suite) {
    if (!suite.ran) return;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "[%s] %-4s  instances=%d failures=%d worst_rel_err=%.3e (tol %.0e)\n",
                  suite.passed() ? "PASS" : "FAIL", suite.name.c_str(), suite.instances,
                  suite.failures, suite.worst_rel_err, suite.tolerance);
    out += buf;
    if (!suite.passed()) {
        std::snprintf(buf, sizeof buf, "       reproduce with instance seed %llu\n",
                      static_cast<unsigned long long>(suite.worst_seed));
        out += buf;
    }
}

}  // namespace

std::string VerifyReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["seed"] = seed;
    doc["suites"] = nlohmann::ordered_json::array();
    for (const VerifySuiteResult* suite : {&ssm, &grad, &rope})
        if (suite->ran) doc["suites"].push_back(suite_json(*suite));
    doc["passed"] = all_passed();
    return doc.dump(2) + "\n";
}

std::string VerifyReport::to_text() const {
    std::string out;
    suite_text(out, ssm);
    suite_text(out, grad);
    suite_text(out, rope);
    out += all_passed() ? "verify: all suites passed\n" : "verify: FAILURES detected\n";
    return out;
}

VerifyReport run_verify(const std::string& suites, std::uint64_t seed, int ssm_instances,
                        int grad_instances, int rope_instances) {
    if (suites != "all" && suites != "ssm" && suites != "grad" && suites != "rope")
        throw UnknownKind("unknown verify suite: " + suites);
    VerifyReport report;
    report.seed = seed;
    if (suites == "all" || suites == "ssm") report.ssm = run_ssm_suite(seed, ssm_instances);
    if (suites == "all" || suites == "grad") report.grad = run_grad_suite(seed, grad_instances);
    if (suites == "all" || suites == "rope") report.rope = run_rope_suite(seed, rope_instances);
    return report;
}

}  // namespace fractalssm
