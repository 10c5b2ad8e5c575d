// fractalssm command line: curve / sds / csr / verify / train / eval.
//
// Exit codes: 0 success, 1 verification or training failure, 2 usage error,
// 3 I/O or domain error. All randomness flows from --seed through the
// library's splitmix-derived mt19937_64 streams; runs are byte-reproducible.
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fractalssm/csr.hpp"
#include "fractalssm/curves.hpp"
#include "fractalssm/model.hpp"
#include "fractalssm/rng.hpp"
#include "fractalssm/sds.hpp"
#include "fractalssm/task.hpp"
#include "fractalssm/verify.hpp"

namespace {

using namespace fractalssm;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoFailure("failed writing: " + path);
}

CurveKind order_flag_to_kind(std::string name) {
    if (name == "fractal") name = "hilbert";  // paper shorthand
    return curve_kind_from_string(name);
}

struct CurveArgs {
    std::string kind = "hilbert";
    int size = 0;
    int window = 4;
    std::string out;
};

int cmd_curve(const CurveArgs& args) {
    const CurveKind kind = order_flag_to_kind(args.kind);
    const ScanOrder order = generate_order(kind, {args.size, args.size}, args.window);
    // self-check: seq -> coord -> seq closes over every cell
    for (int i = 0; i < order.cells(); ++i) {
        const Coord c = order.seq_to_coord[static_cast<size_t>(i)];
        if (order.seq_of(c.x, c.y) != i) throw Error("bijection self-check failed");
    }
    const std::string csv = order_to_csv(order);
    if (args.out.empty()) {
        std::fputs(csv.c_str(), stdout);
        std::fprintf(stderr, "self-check: bijection ok over %d cells\n", order.cells());
    } else {
        write_file(args.out, csv);
        std::printf("wrote %d rows to %s (bijection ok)\n", order.cells(), args.out.c_str());
    }
    return 0;
}

struct SdsArgs {
    std::string kind = "hilbert";
    int size = 0;
    int window = 4;
    std::string aggregation = "mean";
    std::string comparator = "strict";
    std::vector<double> thresholds{1.5};
    std::string out_json, out_pgm;
};

int cmd_sds(const SdsArgs& args) {
    const CurveKind kind = order_flag_to_kind(args.kind);
    const ScanOrder order = generate_order(kind, {args.size, args.size}, args.window);
    SdsReport report = compute_sds(order, aggregation_from_string(args.aggregation));
    SdsComparator cmp;
    if (args.comparator == "strict")
        cmp = SdsComparator::StrictLess;
    else if (args.comparator == "lesseq")
        cmp = SdsComparator::LessEqual;
    else
        throw UnknownKind("unknown comparator: " + args.comparator + " (strict|lesseq)");
    threshold_table(report, args.thresholds, cmp);

    std::printf("kind=%s size=%d aggregation=%s interior_patches=%d\n",
                curve_kind_name(kind).c_str(), args.size, args.aggregation.c_str(),
                report.denominator);
    std::printf("%12s  %10s\n", "threshold", "coverage");
    for (const SdsThresholdRow& row : report.table)
        std::printf("%12.6f  %10.6f\n", row.threshold, row.coverage);
    if (!args.out_json.empty()) write_file(args.out_json, report_to_json(report));
    if (!args.out_pgm.empty()) write_file(args.out_pgm, heatmap_pgm(report));
    return 0;
}

struct CsrArgs {
    int size = 0;
    int iterations = -1;
    bool literal_argmin = false;
    std::string out_dot, out_json;
};

int cmd_csr(const CsrArgs& args) {
    const ScanOrder order = generate_order(CurveKind::Hilbert, {args.size, args.size});
    CsrOptions options;
    options.paper_literal_argmin = args.literal_argmin;
    std::vector<CsrRoundLog> log;
    const SkipGraph graph = build_skip_graph(order, args.iterations, options, &log);
    std::printf("n=%d skip_edges=%zu\n", graph.n, graph.skip_edges.size());
    for (const CsrRoundLog& round : log) {
        if (round.inserted)
            std::printf("round %d: skip %d -> %d (duplicates passed over: %d)\n", round.round,
                        round.source, round.target, round.duplicates_skipped);
        else
            std::printf("round %d: no insertable pair (duplicates passed over: %d)\n",
                        round.round, round.duplicates_skipped);
    }
    const AggregationScores scores = aggregation_scores_partial(order, graph);
    double worst = 0.0;
    for (double s : scores.score) worst = std::max(worst, s);
    std::printf("final max window misalignment S(p) = %.17g\n", worst);
    if (!args.out_dot.empty()) write_file(args.out_dot, graph_to_dot(graph));
    if (!args.out_json.empty()) write_file(args.out_json, graph_to_json(graph));
    return 0;
}

struct VerifyArgs {
    std::string suite = "all";
    std::uint64_t seed = 1;
    int seeds = 0;  // 0 = suite defaults (ssm 200, grad 100, rope 1000)
    std::string out;
};

int cmd_verify(const VerifyArgs& args) {
    const int ssm_n = args.seeds > 0 ? args.seeds : 200;
    const int grad_n = args.seeds > 0 ? args.seeds : 100;
    const int rope_n = args.seeds > 0 ? args.seeds : 1000;
    const VerifyReport report = run_verify(args.suite, args.seed, ssm_n, grad_n, rope_n);
    std::fputs(report.to_text().c_str(), stdout);
    if (!args.out.empty()) write_file(args.out, report.to_json());
    return report.all_passed() ? 0 : 1;
}

struct TrainArgs {
    std::string task = "stripes";
    std::string order = "fractal";
    int train_size = 8;
    int count = 64;
    int steps = 200;
    double lr = 0.2;
    std::uint64_t seed = 1;
    int d_model = 8, d_state = 4, n_blocks = 1, mlp_hidden = 16, window = 4;
    bool no_csr = false, no_rope = false;
    std::string out_metrics, out_ckpt;
};

ModelConfig config_from(const TrainArgs& args) {
    ModelConfig cfg;
    cfg.grid = args.train_size;
    cfg.curve = order_flag_to_kind(args.order);
    cfg.window = args.window;
    cfg.d_model = args.d_model;
    cfg.d_state = args.d_state;
    cfg.n_blocks = args.n_blocks;
    cfg.mlp_hidden = args.mlp_hidden;
    cfg.classes = 2;
    cfg.use_csr = !args.no_csr;
    cfg.use_prc = !args.no_rope;
    cfg.seed = args.seed;
    return cfg;
}

int cmd_train(const TrainArgs& args) {
    const ModelConfig cfg = config_from(args);
    const TaskKind task = task_from_string(args.task);
    const Dataset data =
        make_dataset(task, cfg.grid, args.count, derive_seed(args.seed, 0xda7aULL));
    Model model = build_model(cfg);
    std::vector<StepMetrics> metrics;
    try {
        metrics = train(model, data, args.steps, args.lr);
    } catch (const DivergedLoss& e) {
        std::fprintf(stderr, "training failed: %s\n", e.what());
        return 1;
    }
    if (!metrics.empty())
        std::printf("task=%s order=%s size=%d steps=%d first_loss=%.17g last_loss=%.17g "
                    "last_acc=%.17g\n",
                    task_name(task).c_str(), curve_kind_name(cfg.curve).c_str(), cfg.grid,
                    args.steps, metrics.front().loss, metrics.back().loss,
                    metrics.back().accuracy);
    if (!args.out_metrics.empty()) write_file(args.out_metrics, metrics_to_csv(metrics));
    if (!args.out_ckpt.empty()) save_checkpoint(model, args.out_ckpt);
    return 0;
}

struct EvalArgs {
    std::vector<std::string> ckpts;
    std::string task = "stripes";
    int test_size = 16;
    int count = 256;
    std::uint64_t data_seed = 99;
};

int cmd_eval(const EvalArgs& args) {
    for (const std::string& path : args.ckpts) {
        const Model model = load_checkpoint(path);
        const Dataset data = make_dataset(task_from_string(args.task), args.test_size,
                                          args.count, args.data_seed);
        const double acc = evaluate(model, data);
        std::printf("order=%s train_size=%d test_size=%d acc=%.17g\n",
                    curve_kind_name(model.config.curve).c_str(), model.config.grid,
                    args.test_size, acc);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractal serialization, SDS metrics, CSR skip graphs and a desk-scale "
                 "selective-SSM training harness"};
    app.require_subcommand(1);
    std::function<int()> runner;

    CurveArgs curve_args;
    CLI::App* curve = app.add_subcommand("curve", "emit a serialization order as CSV");
    curve->add_option("--kind", curve_args.kind,
                      "hilbert|coil|meurthe|raster|zigzag|local|fractal");
    curve->add_option("--size", curve_args.size, "grid side length")->required();
    curve->add_option("--window", curve_args.window, "window side for --kind local");
    curve->add_option("--out", curve_args.out, "CSV path (default: stdout)");
    curve->callback([&] { runner = [&] { return cmd_curve(curve_args); }; });

    SdsArgs sds_args;
    CLI::App* sds = app.add_subcommand("sds", "structure distortion score report");
    sds->add_option("--kind", sds_args.kind, "serialization kind");
    sds->add_option("--size", sds_args.size, "grid side length")->required();
    sds->add_option("--window", sds_args.window, "window side for --kind local");
    sds->add_option("--aggregation", sds_args.aggregation, "mean|sum");
    sds->add_option("--comparator", sds_args.comparator, "strict|lesseq");
    sds->add_option("--thresholds", sds_args.thresholds, "ascending thresholds")
        ->delimiter(',');
    sds->add_option("--out-json", sds_args.out_json, "report JSON path");
    sds->add_option("--out-pgm", sds_args.out_pgm, "heatmap PGM path");
    sds->callback([&] { runner = [&] { return cmd_sds(sds_args); }; });

    CsrArgs csr_args;
    CLI::App* csr = app.add_subcommand("csr", "build the skip graph over a Hilbert order");
    csr->add_option("--size", csr_args.size, "grid side length")->required();
    csr->add_option("--iterations", csr_args.iterations,
                    "insertion rounds (default: ceil(log2 N))");
    csr->add_flag("--literal-argmin", csr_args.literal_argmin,
                  "select minimal-score windows instead of maximal");
    csr->add_option("--out-dot", csr_args.out_dot, "Graphviz path");
    csr->add_option("--out-json", csr_args.out_json, "graph JSON path");
    csr->callback([&] { runner = [&] { return cmd_csr(csr_args); }; });

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "randomized self-verification suites");
    verify->add_option("--suite", verify_args.suite, "ssm|grad|rope|all");
    verify->add_option("--seed", verify_args.seed, "master seed");
    verify->add_option("--seeds", verify_args.seeds, "instances per suite (0 = defaults)");
    verify->add_option("--out", verify_args.out, "report JSON path");
    verify->callback([&] { runner = [&] { return cmd_verify(verify_args); }; });

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train the minimal model on a synthetic task");
    train->add_option("--task", train_args.task, "stripes|checker|blobs");
    train->add_option("--order", train_args.order, "serialization kind (fractal = hilbert)");
    train->add_option("--train-size", train_args.train_size, "training grid side");
    train->add_option("--count", train_args.count, "training samples");
    train->add_option("--steps", train_args.steps, "gradient steps");
    train->add_option("--lr", train_args.lr, "learning rate");
    train->add_option("--seed", train_args.seed, "model + data seed");
    train->add_option("--d-model", train_args.d_model, "embedding width");
    train->add_option("--d-state", train_args.d_state, "state dimension");
    train->add_option("--blocks", train_args.n_blocks, "block count");
    train->add_option("--mlp-hidden", train_args.mlp_hidden, "MLP hidden width");
    train->add_option("--window", train_args.window, "window side for --order local");
    train->add_flag("--no-csr", train_args.no_csr, "plain causal recurrence mixer");
    train->add_flag("--no-rope", train_args.no_rope, "disable rotary positions");
    train->add_option("--out-metrics", train_args.out_metrics, "metrics CSV path");
    train->add_option("--out-ckpt", train_args.out_ckpt, "checkpoint path");
    train->callback([&] { runner = [&] { return cmd_train(train_args); }; });

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "evaluate checkpoints on a fresh dataset");
    eval->add_option("--ckpt", eval_args.ckpts, "checkpoint path (repeatable)")->required();
    eval->add_option("--task", eval_args.task, "stripes|checker|blobs");
    eval->add_option("--test-size", eval_args.test_size, "evaluation grid side");
    eval->add_option("--count", eval_args.count, "evaluation samples");
    eval->add_option("--data-seed", eval_args.data_seed, "evaluation dataset seed");
    eval->callback([&] { runner = [&] { return cmd_eval(eval_args); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);  // prints help or the usage error
        return rc == 0 ? 0 : 2;
    }
    try {
        return runner ? runner() : 2;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
