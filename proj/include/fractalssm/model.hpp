// Minimal trainable model over serialized grids:
//   scalar pixel -> linear embed -> [rope] -> n_blocks x {selective SSM mixer
//   + residual, tanh MLP + residual} -> mean pool -> linear classifier.
//
// The mixer is input-selective: B and C are per-position linear projections of
// the block input (shared across channels), delta = softplus(linear + bias)
// per channel, A is a trainable negative diagonal. The readout C is scaled by
// 1/n (mean accumulation): slow states sum O(n) contributions and this
// minimal block carries no norm layer, so the scale keeps residual magnitudes
// bounded and comparable across grid resolutions. With use_csr the mixer runs
// BDPP over the curve's skip graph; without it the plain causal recurrence
// (so disabling use_csr and use_prc on a raster order is exactly the classic
// scan). Every gradient is hand-written; there is no autodiff anywhere.
//
// Training is full-batch gradient descent over a fixed seeded dataset: the
// data seen at each step is identical, so lr = 0 yields a constant loss trace
// and runs are bit-reproducible from (config, seeds).
//
// Parameters live in one flat float64 vector with a fixed registry order
// (embedding, per-block mixer + MLP, classifier); the checkpoint format is a
// one-line JSON header followed by that vector as little-endian float64.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractalssm/csr.hpp"
#include "fractalssm/curves.hpp"
#include "fractalssm/rope.hpp"
#include "fractalssm/task.hpp"

namespace fractalssm {

struct ModelConfig {
    int grid = 8;  // training grid side
    CurveKind curve = CurveKind::Hilbert;
    int window = 4;  // LocalWindow curves only
    int d_model = 8;
    int d_state = 4;
    int n_blocks = 1;
    int mlp_hidden = 16;
    int classes = 2;
    bool use_csr = true;
    bool use_prc = true;
    std::uint64_t seed = 1;
};

struct ParamLayout {
    struct Block {
        std::size_t wb, wc, wd, bd, a, w1, b1, w2, b2;
    };
    std::size_t we = 0, be = 0, wo = 0, bo = 0, total = 0;
    std::vector<Block> blocks;
};

ParamLayout make_layout(const ModelConfig& config);

struct Model {
    ModelConfig config;
    ParamLayout layout;
    std::vector<double> params;
};

// Deterministic init: fan-in uniform weights, zero biases on the residual
// paths (zero input then yields logits == classifier bias), small-normal
// delta bias, A log-spaced in [-1, -0.01].
Model build_model(const ModelConfig& config);

// Serialization context for one grid side; rebuilt per resolution.
struct RunContext {
    int grid = 0;
    ScanOrder order;
    SkipGraph graph;  // only when use_csr
    RopeTable rope;   // only when use_prc
};
RunContext make_context(const ModelConfig& config, int grid);

// Logits for one image (grid*grid scalars, raster layout).
std::vector<double> forward_sample(const Model& model, const RunContext& ctx,
                                   const double* image);

// Mean cross-entropy and accuracy over a dataset; gradient accumulated into
// grad (layout.total) when non-null. Returns {loss, accuracy}.
struct EvalStats {
    double loss = 0.0;
    double accuracy = 0.0;
};
EvalStats batch_loss(const Model& model, const RunContext& ctx, const Dataset& data,
                     std::vector<double>* grad);

struct StepMetrics {
    int step = 0;
    double loss = 0.0;
    double accuracy = 0.0;
};

// Full-batch gradient descent with unit global-norm gradient clipping;
// metrics row t holds the pre-update loss of step t. DivergedLoss on
// non-finite loss.
std::vector<StepMetrics> train(Model& model, const Dataset& data, int steps, double lr);

double evaluate(const Model& model, const Dataset& data);  // accuracy

std::string metrics_to_csv(const std::vector<StepMetrics>& metrics);

// Trains one model per curve (shared seed and data) and evaluates both at the
// training grid and at double resolution on fresh seeded eval sets.
struct TransferResult {
    double acc_a_train = 0.0, acc_a_double = 0.0;  // config.curve
    double acc_b_train = 0.0, acc_b_double = 0.0;  // baseline curve
};
TransferResult eval_resolution_transfer(const ModelConfig& config, CurveKind baseline,
                                        TaskKind task, int steps, double lr, int train_count,
                                        int eval_count, std::uint64_t data_seed);

void save_checkpoint(const Model& model, const std::string& path);  // IoFailure
Model load_checkpoint(const std::string& path);  // IoFailure, BadCheckpoint

}  // namespace fractalssm
