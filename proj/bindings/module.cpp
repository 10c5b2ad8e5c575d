// Python bindings over the main library operations: serialization orders,
// SDS reports, CSR skip graphs, the ZOH/BDPP kernel pair and its gradients,
// rotary positions and the self-verification suites. Thin wrappers over flat
// std::vector buffers; shapes are passed explicitly.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fractalssm/csr.hpp"
#include "fractalssm/curves.hpp"
#include "fractalssm/model.hpp"
#include "fractalssm/rope.hpp"
#include "fractalssm/sds.hpp"
#include "fractalssm/ssm.hpp"
#include "fractalssm/ssm_grad.hpp"
#include "fractalssm/verify.hpp"

namespace py = pybind11;
using namespace fractalssm;

namespace {

ScanOrder make_order(const std::string& kind, int width, int height, int window) {
    return generate_order(curve_kind_from_string(kind), {width, height}, window);
}

std::vector<std::pair<int, int>> order_coords(const std::string& kind, int width, int height,
                                              int window) {
    const ScanOrder order = make_order(kind, width, height, window);
    std::vector<std::pair<int, int>> coords;
    coords.reserve(order.seq_to_coord.size());
    for (const Coord& c : order.seq_to_coord) coords.emplace_back(c.x, c.y);
    return coords;
}

std::string sds_report_json(const std::string& kind, int size, int window,
                            const std::string& aggregation,
                            const std::vector<double>& thresholds) {
    const ScanOrder order = make_order(kind, size, size, window);
    SdsReport report = compute_sds(order, aggregation_from_string(aggregation));
    threshold_table(report, thresholds);
    return report_to_json(report);
}

double sds_coverage(const std::string& kind, int size, double threshold, int window) {
    const ScanOrder order = make_order(kind, size, size, window);
    SdsReport report = compute_sds(order);
    threshold_table(report, {threshold});
    return report.table.front().coverage;
}

std::vector<std::pair<int, int>> csr_skips(const std::string& kind, int size, int iterations) {
    const ScanOrder order = make_order(kind, size, size, 4);
    return build_skip_graph(order, iterations).skip_edges;
}

SkipGraph graph_from(int n, const std::vector<std::pair<int, int>>& skips) {
    SkipGraph graph = make_path_graph(n);
    for (const auto& [u, v] : skips) graph.skip_edges.push_back({u, v});
    return graph;
}

std::vector<double> bdpp(int n, int channels, int d_state, const std::vector<double>& a_bar,
                         const std::vector<double>& b_bar, const std::vector<double>& c,
                         const std::vector<double>& x, int batch,
                         const std::vector<std::pair<int, int>>& skips) {
    const SsmParams p = make_discretized(n, channels, d_state, a_bar, b_bar, c);
    SequenceBatch xb(batch, n, channels);
    if (x.size() != xb.data.size()) throw ShapeMismatch("x has the wrong length");
    xb.data = x;
    return bdpp_forward(p, xb, graph_from(n, skips)).data;
}

py::dict bdpp_grad(int n, int channels, int d_state, const std::vector<double>& a_bar,
                   const std::vector<double>& b_bar, const std::vector<double>& c,
                   const std::vector<double>& x, int batch,
                   const std::vector<std::pair<int, int>>& skips,
                   const std::vector<double>& upstream) {
    const SsmParams p = make_discretized(n, channels, d_state, a_bar, b_bar, c);
    SequenceBatch xb(batch, n, channels), g(batch, n, channels);
    if (x.size() != xb.data.size() || upstream.size() != g.data.size())
        throw ShapeMismatch("x/upstream have the wrong length");
    xb.data = x;
    g.data = upstream;
    const GradientBundle bundle = bdpp_backward(p, xb, graph_from(n, skips), g);
    py::dict out;
    out["d_x"] = bundle.d_x.data;
    out["d_a_bar"] = bundle.d_a_bar;
    out["d_b_bar"] = bundle.d_b_bar;
    out["d_c"] = bundle.d_c;
    return out;
}

std::vector<double> rope_rotate(const std::vector<double>& v, int pos, int max_len) {
    const RopeTable table = make_rope_table(static_cast<int>(v.size()), max_len);
    return rope_applied(table, v, pos);
}

py::dict verify_report(const std::string& suite, std::uint64_t seed, int ssm_instances,
                       int grad_instances, int rope_instances) {
    const VerifyReport report =
        run_verify(suite, seed, ssm_instances, grad_instances, rope_instances);
    py::dict out;
    out["passed"] = report.all_passed();
    out["json"] = report.to_json();
    return out;
}

py::dict transfer(const std::string& order, const std::string& baseline, const std::string& task,
                  int grid, int steps, double lr, int train_count, int eval_count,
                  std::uint64_t seed, std::uint64_t data_seed) {
    ModelConfig cfg;
    cfg.grid = grid;
    cfg.curve = curve_kind_from_string(order);
    cfg.seed = seed;
    const TransferResult r =
        eval_resolution_transfer(cfg, curve_kind_from_string(baseline),
                                 task_from_string(task), steps, lr, train_count, eval_count,
                                 data_seed);
    py::dict out;
    out["acc_train"] = r.acc_a_train;
    out["acc_double"] = r.acc_a_double;
    out["baseline_acc_train"] = r.acc_b_train;
    out["baseline_acc_double"] = r.acc_b_double;
    return out;
}

}  // namespace

PYBIND11_MODULE(fractalssm_core, m) {
    m.doc() = "fractal serialization + skip-graph selective SSM core";

    // translators run newest-first: register the base class first so the
    // derived InvalidArgument mapping is consulted before the catch-all
    py::register_exception<Error>(m, "FractalssmError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);

    m.def("generate_order", &order_coords, py::arg("kind"), py::arg("width"),
          py::arg("height"), py::arg("window") = 4,
          "sequence of (x, y) cells for a serialization order");
    m.def("order_csv", [](const std::string& kind, int size, int window) {
              return order_to_csv(make_order(kind, size, size, window));
          },
          py::arg("kind"), py::arg("size"), py::arg("window") = 4);
    m.def("sds_report_json", &sds_report_json, py::arg("kind"), py::arg("size"),
          py::arg("window"), py::arg("aggregation"), py::arg("thresholds"));
    m.def("sds_coverage", &sds_coverage, py::arg("kind"), py::arg("size"),
          py::arg("threshold") = 1.5, py::arg("window") = 4);
    m.def("csr_skips", &csr_skips, py::arg("kind"), py::arg("size"),
          py::arg("iterations") = -1, "skip edges of the constructed graph, insertion order");
    m.def("zoh_a_bar", &zoh_a_bar, py::arg("a"), py::arg("delta"));
    m.def("zoh_phi", &zoh_phi, py::arg("a"), py::arg("delta"));
    m.def("bdpp", &bdpp, py::arg("n"), py::arg("channels"), py::arg("d_state"),
          py::arg("a_bar"), py::arg("b_bar"), py::arg("c"), py::arg("x"), py::arg("batch") = 1,
          py::arg("skips") = std::vector<std::pair<int, int>>{});
    m.def("bdpp_grad", &bdpp_grad, py::arg("n"), py::arg("channels"), py::arg("d_state"),
          py::arg("a_bar"), py::arg("b_bar"), py::arg("c"), py::arg("x"), py::arg("batch"),
          py::arg("skips"), py::arg("upstream"));
    m.def("rope_rotate", &rope_rotate, py::arg("v"), py::arg("pos"), py::arg("max_len") = 4096);
    m.def("verify", &verify_report, py::arg("suite") = "all", py::arg("seed") = 1,
          py::arg("ssm_instances") = 50, py::arg("grad_instances") = 20,
          py::arg("rope_instances") = 200);
    m.def("resolution_transfer", &transfer, py::arg("order"), py::arg("baseline"),
          py::arg("task"), py::arg("grid") = 8, py::arg("steps") = 60, py::arg("lr") = 0.2,
          py::arg("train_count") = 32, py::arg("eval_count") = 64, py::arg("seed") = 1,
          py::arg("data_seed") = 7);
}
