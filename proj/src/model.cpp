#include "fractalssm/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "fractalssm/rng.hpp"
#include "fractalssm/ssm.hpp"
#include "fractalssm/ssm_grad.hpp"
#include "json.hpp"

namespace fractalssm {

namespace {

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

struct BlockCache {
    std::vector<double> u_in;  // n*D
    std::vector<double> braw, craw;  // n*S
    std::vector<double> draw, dlt;   // n*D
    std::vector<double> phi;         // n*D*S
    SsmParams kernel;
    BdppTrace trace;
    std::vector<double> u_mid;  // n*D
    std::vector<double> a1;     // n*H
};

struct SampleCache {
    std::vector<double> u0;  // n*D, post-rope block input
    std::vector<BlockCache> blocks;
    std::vector<double> u_final;  // n*D
    std::vector<double> pool;     // D
    std::vector<double> logits;   // K
};

void forward_cached(const Model& model, const RunContext& ctx, const double* image,
                    SampleCache& cache) {
    const ModelConfig& cfg = model.config;
    const int n = ctx.order.cells(), D = cfg.d_model, S = cfg.d_state, H = cfg.mlp_hidden;
    const double* P = model.params.data();
    const ParamLayout& L = model.layout;

    cache.u0.assign(static_cast<size_t>(n) * D, 0.0);
    for (int t = 0; t < n; ++t) {
        const Coord cell = ctx.order.seq_to_coord[static_cast<size_t>(t)];
        const double pix = image[static_cast<size_t>(cell.y) * ctx.order.shape.width + cell.x];
        for (int d = 0; d < D; ++d)
            cache.u0[static_cast<size_t>(t) * D + d] = P[L.we + d] * pix + P[L.be + d];
        if (cfg.use_prc) apply_rope(ctx.rope, &cache.u0[static_cast<size_t>(t) * D], t);
    }

    cache.blocks.assign(static_cast<size_t>(cfg.n_blocks), {});
    std::vector<double> u = cache.u0;
    for (int bi = 0; bi < cfg.n_blocks; ++bi) {
        BlockCache& bc = cache.blocks[static_cast<size_t>(bi)];
        const ParamLayout::Block& B = L.blocks[static_cast<size_t>(bi)];
        bc.u_in = u;
        bc.braw.assign(static_cast<size_t>(n) * S, 0.0);
        bc.craw.assign(static_cast<size_t>(n) * S, 0.0);
        bc.draw.assign(static_cast<size_t>(n) * D, 0.0);
        bc.dlt.assign(static_cast<size_t>(n) * D, 0.0);
        // the readout is scaled by 1/n (mean accumulation): slow states sum
        // O(n) contributions and the minimal block carries no norm layer, so
        // this keeps residual magnitudes bounded and comparable across grid
        // resolutions
        const double readout = 1.0 / n;
        for (int t = 0; t < n; ++t) {
            const double* ut = &bc.u_in[static_cast<size_t>(t) * D];
            for (int s = 0; s < S; ++s) {
                double accb = 0.0, accc = 0.0;
                for (int d = 0; d < D; ++d) {
                    accb += P[B.wb + static_cast<size_t>(s) * D + d] * ut[d];
                    accc += P[B.wc + static_cast<size_t>(s) * D + d] * ut[d];
                }
                bc.braw[static_cast<size_t>(t) * S + s] = accb;
                bc.craw[static_cast<size_t>(t) * S + s] = readout * accc;
            }
            for (int c = 0; c < D; ++c) {
                double acc = P[B.bd + c];
                for (int d = 0; d < D; ++d) acc += P[B.wd + static_cast<size_t>(c) * D + d] * ut[d];
                bc.draw[static_cast<size_t>(t) * D + c] = acc;
                bc.dlt[static_cast<size_t>(t) * D + c] = softplus(acc);
            }
        }
        // discretize with the block's trainable A
        SsmParams& k = bc.kernel;
        k = SsmParams{};
        k.n = n;
        k.channels = D;
        k.d_state = S;
        k.a_bar.assign(static_cast<size_t>(n) * D * S, 0.0);
        k.b_bar.assign(static_cast<size_t>(n) * D * S, 0.0);
        k.c_out = bc.craw;
        k.discretized = true;
        bc.phi.assign(static_cast<size_t>(n) * D * S, 0.0);
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < D; ++c) {
                const double dlt = bc.dlt[static_cast<size_t>(t) * D + c];
                for (int s = 0; s < S; ++s) {
                    const double a = P[B.a + static_cast<size_t>(c) * S + s];
                    const size_t idx = k.bar_index(t, c, s);
                    k.a_bar[idx] = zoh_a_bar(a, dlt);
                    bc.phi[idx] = zoh_phi(a, dlt);
                    k.b_bar[idx] = bc.phi[idx] * bc.braw[static_cast<size_t>(t) * S + s];
                }
            }

        SequenceBatch x(1, n, D);
        x.data = bc.u_in;
        const SequenceBatch y = cfg.use_csr ? bdpp_forward(k, x, ctx.graph, &bc.trace)
                                            : recurrence_forward(k, x);
        bc.u_mid.assign(static_cast<size_t>(n) * D, 0.0);
        for (size_t i = 0; i < bc.u_mid.size(); ++i) bc.u_mid[i] = bc.u_in[i] + y.data[i];

        bc.a1.assign(static_cast<size_t>(n) * H, 0.0);
        u.assign(static_cast<size_t>(n) * D, 0.0);
        for (int t = 0; t < n; ++t) {
            const double* mt = &bc.u_mid[static_cast<size_t>(t) * D];
            for (int h = 0; h < H; ++h) {
                double acc = P[B.b1 + h];
                for (int d = 0; d < D; ++d) acc += P[B.w1 + static_cast<size_t>(h) * D + d] * mt[d];
                bc.a1[static_cast<size_t>(t) * H + h] = std::tanh(acc);
            }
            for (int d = 0; d < D; ++d) {
                double acc = P[B.b2 + d];
                for (int h = 0; h < H; ++h)
                    acc += P[B.w2 + static_cast<size_t>(d) * H + h] * bc.a1[static_cast<size_t>(t) * H + h];
                u[static_cast<size_t>(t) * D + d] = mt[d] + acc;
            }
        }
    }

    cache.u_final = u;
    cache.pool.assign(static_cast<size_t>(D), 0.0);
    for (int t = 0; t < n; ++t)
        for (int d = 0; d < D; ++d) cache.pool[static_cast<size_t>(d)] += u[static_cast<size_t>(t) * D + d];
    for (int d = 0; d < D; ++d) cache.pool[static_cast<size_t>(d)] /= n;
    cache.logits.assign(static_cast<size_t>(cfg.classes), 0.0);
    for (int kcls = 0; kcls < cfg.classes; ++kcls) {
        double acc = P[L.bo + kcls];
        for (int d = 0; d < D; ++d) acc += P[L.wo + static_cast<size_t>(kcls) * D + d] * cache.pool[static_cast<size_t>(d)];
        cache.logits[static_cast<size_t>(kcls)] = acc;
    }
}

// reverse of forward_cached; accumulates parameter gradients into grad
void backward_cached(const Model& model, const RunContext& ctx, const double* image,
                     const SampleCache& cache, const std::vector<double>& d_logits,
                     std::vector<double>& grad) {
    const ModelConfig& cfg = model.config;
    const int n = ctx.order.cells(), D = cfg.d_model, S = cfg.d_state, H = cfg.mlp_hidden;
    const double* P = model.params.data();
    double* G = grad.data();
    const ParamLayout& L = model.layout;

    std::vector<double> d_pool(static_cast<size_t>(D), 0.0);
    for (int kcls = 0; kcls < cfg.classes; ++kcls) {
        const double dl = d_logits[static_cast<size_t>(kcls)];
        G[L.bo + kcls] += dl;
        for (int d = 0; d < D; ++d) {
            G[L.wo + static_cast<size_t>(kcls) * D + d] += dl * cache.pool[static_cast<size_t>(d)];
            d_pool[static_cast<size_t>(d)] += P[L.wo + static_cast<size_t>(kcls) * D + d] * dl;
        }
    }
    std::vector<double> d_u(static_cast<size_t>(n) * D, 0.0);
    for (int t = 0; t < n; ++t)
        for (int d = 0; d < D; ++d) d_u[static_cast<size_t>(t) * D + d] = d_pool[static_cast<size_t>(d)] / n;

    for (int bi = cfg.n_blocks - 1; bi >= 0; --bi) {
        const BlockCache& bc = cache.blocks[static_cast<size_t>(bi)];
        const ParamLayout::Block& B = L.blocks[static_cast<size_t>(bi)];

        // MLP
        std::vector<double> d_umid = d_u;  // residual branch
        std::vector<double> d_z1(static_cast<size_t>(n) * H, 0.0);
        for (int t = 0; t < n; ++t) {
            const double* dut = &d_u[static_cast<size_t>(t) * D];
            for (int d = 0; d < D; ++d) {
                G[B.b2 + d] += dut[d];
                for (int h = 0; h < H; ++h)
                    G[B.w2 + static_cast<size_t>(d) * H + h] += dut[d] * bc.a1[static_cast<size_t>(t) * H + h];
            }
            for (int h = 0; h < H; ++h) {
                double acc = 0.0;
                for (int d = 0; d < D; ++d) acc += P[B.w2 + static_cast<size_t>(d) * H + h] * dut[d];
                const double a1 = bc.a1[static_cast<size_t>(t) * H + h];
                d_z1[static_cast<size_t>(t) * H + h] = acc * (1.0 - a1 * a1);
            }
            for (int h = 0; h < H; ++h) {
                const double dz = d_z1[static_cast<size_t>(t) * H + h];
                G[B.b1 + h] += dz;
                for (int d = 0; d < D; ++d) {
                    G[B.w1 + static_cast<size_t>(h) * D + d] += dz * bc.u_mid[static_cast<size_t>(t) * D + d];
                    d_umid[static_cast<size_t>(t) * D + d] += P[B.w1 + static_cast<size_t>(h) * D + d] * dz;
                }
            }
        }

        // mixer: upstream for the kernel output is d_umid; residual passes it on
        std::vector<double> d_uin = d_umid;
        SequenceBatch x(1, n, D);
        x.data = bc.u_in;
        SequenceBatch g(1, n, D);
        g.data = d_umid;
        const GradientBundle bundle = cfg.use_csr
                                          ? bdpp_backward(bc.kernel, x, ctx.graph, g, &bc.trace)
                                          : recurrence_backward(bc.kernel, x, g);
        for (size_t i = 0; i < d_uin.size(); ++i) d_uin[i] += bundle.d_x.data[i];

        // C projection (kernel C = readout * wc u)
        const double readout = 1.0 / n;
        for (int t = 0; t < n; ++t)
            for (int s = 0; s < S; ++s) {
                const double dc = readout * bundle.d_c[static_cast<size_t>(t) * S + s];
                for (int d = 0; d < D; ++d) {
                    G[B.wc + static_cast<size_t>(s) * D + d] += dc * bc.u_in[static_cast<size_t>(t) * D + d];
                    d_uin[static_cast<size_t>(t) * D + d] += P[B.wc + static_cast<size_t>(s) * D + d] * dc;
                }
            }

        // B_bar -> (phi, braw); A_bar + phi -> (delta, A)
        std::vector<double> d_braw(static_cast<size_t>(n) * S, 0.0);
        std::vector<double> d_dlt(static_cast<size_t>(n) * D, 0.0);
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < D; ++c) {
                const double dlt = bc.dlt[static_cast<size_t>(t) * D + c];
                double ddlt = 0.0;
                for (int s = 0; s < S; ++s) {
                    const size_t idx = bc.kernel.bar_index(t, c, s);
                    const double a = P[B.a + static_cast<size_t>(c) * S + s];
                    const double dbbar = bundle.d_b_bar[idx];
                    const double dphi = dbbar * bc.braw[static_cast<size_t>(t) * S + s];
                    d_braw[static_cast<size_t>(t) * S + s] += dbbar * bc.phi[idx];
                    const double dabar = bundle.d_a_bar[idx];
                    ddlt += dabar * a * bc.kernel.a_bar[idx] + dphi * zoh_phi_d_delta(a, dlt);
                    G[B.a + static_cast<size_t>(c) * S + s] +=
                        dabar * dlt * bc.kernel.a_bar[idx] + dphi * zoh_phi_d_a(a, dlt);
                }
                d_dlt[static_cast<size_t>(t) * D + c] = ddlt;
            }

        // B projection
        for (int t = 0; t < n; ++t)
            for (int s = 0; s < S; ++s) {
                const double db = d_braw[static_cast<size_t>(t) * S + s];
                for (int d = 0; d < D; ++d) {
                    G[B.wb + static_cast<size_t>(s) * D + d] += db * bc.u_in[static_cast<size_t>(t) * D + d];
                    d_uin[static_cast<size_t>(t) * D + d] += P[B.wb + static_cast<size_t>(s) * D + d] * db;
                }
            }

        // delta projection through softplus
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < D; ++c) {
                const double ddraw = d_dlt[static_cast<size_t>(t) * D + c] *
                                     sigmoid(bc.draw[static_cast<size_t>(t) * D + c]);
                G[B.bd + c] += ddraw;
                for (int d = 0; d < D; ++d) {
                    G[B.wd + static_cast<size_t>(c) * D + d] += ddraw * bc.u_in[static_cast<size_t>(t) * D + d];
                    d_uin[static_cast<size_t>(t) * D + d] += P[B.wd + static_cast<size_t>(c) * D + d] * ddraw;
                }
            }

        d_u = std::move(d_uin);
    }

    // embedding (undo the rotation first: block input was post-rope)
    for (int t = 0; t < n; ++t) {
        double* dut = &d_u[static_cast<size_t>(t) * D];
        if (cfg.use_prc) apply_rope_inverse(ctx.rope, dut, t);
        const Coord cell = ctx.order.seq_to_coord[static_cast<size_t>(t)];
        const double pix = image[static_cast<size_t>(cell.y) * ctx.order.shape.width + cell.x];
        for (int d = 0; d < D; ++d) {
            G[L.we + d] += dut[d] * pix;
            G[L.be + d] += dut[d];
        }
    }
}

}  // namespace

ParamLayout make_layout(const ModelConfig& cfg) {
    if (cfg.d_model < 1 || cfg.d_state < 1 || cfg.n_blocks < 1 || cfg.mlp_hidden < 1 ||
        cfg.classes < 2)
        throw InvalidArgument("model dimensions must be positive (classes >= 2)");
    if (cfg.use_prc && cfg.d_model % 2 != 0)
        throw InvalidArgument("rope requires an even d_model");
    ParamLayout layout;
    std::size_t at = 0;
    const auto take = [&at](std::size_t count) {
        const std::size_t here = at;
        at += count;
        return here;
    };
    const std::size_t D = static_cast<std::size_t>(cfg.d_model);
    const std::size_t S = static_cast<std::size_t>(cfg.d_state);
    const std::size_t H = static_cast<std::size_t>(cfg.mlp_hidden);
    layout.we = take(D);
    layout.be = take(D);
    layout.blocks.resize(static_cast<size_t>(cfg.n_blocks));
    for (auto& b : layout.blocks) {
        b.wb = take(S * D);
        b.wc = take(S * D);
        b.wd = take(D * D);
        b.bd = take(D);
        b.a = take(D * S);
        b.w1 = take(H * D);
        b.b1 = take(H);
        b.w2 = take(D * H);
        b.b2 = take(D);
    }
    layout.wo = take(static_cast<std::size_t>(cfg.classes) * D);
    layout.bo = take(static_cast<std::size_t>(cfg.classes));
    layout.total = at;
    return layout;
}

Model build_model(const ModelConfig& cfg) {
    Model model;
    model.config = cfg;
    model.layout = make_layout(cfg);
    model.params.assign(model.layout.total, 0.0);
    Rng rng(derive_seed(cfg.seed, 0x6d6f64656cULL));  // "model"
    double* P = model.params.data();
    const ParamLayout& L = model.layout;
    const int D = cfg.d_model, S = cfg.d_state, H = cfg.mlp_hidden;

    const auto fan_in = [&rng](double* w, std::size_t count, int fan) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan));
        for (std::size_t i = 0; i < count; ++i) w[i] = rng.uniform(-bound, bound);
    };
    fan_in(P + L.we, static_cast<std::size_t>(D), 1);
    // L.be stays zero (zero-input propagation)
    for (const auto& B : L.blocks) {
        fan_in(P + B.wb, static_cast<std::size_t>(S) * D, D);
        fan_in(P + B.wc, static_cast<std::size_t>(S) * D, D);
        fan_in(P + B.wd, static_cast<std::size_t>(D) * D, D);
        for (int c = 0; c < D; ++c) P[B.bd + c] = 0.5 * rng.normal();
        // A: negative reals log-spaced in [-1, -0.01] per channel
        for (int c = 0; c < D; ++c)
            for (int s = 0; s < S; ++s) {
                const double frac = S > 1 ? static_cast<double>(s) / (S - 1) : 0.5;
                P[B.a + static_cast<std::size_t>(c) * S + s] = -std::pow(10.0, -2.0 * (1.0 - frac));
            }
        fan_in(P + B.w1, static_cast<std::size_t>(H) * D, D);
        fan_in(P + B.w2, static_cast<std::size_t>(D) * H, H);
        // b1, b2 stay zero
    }
    fan_in(P + L.wo, static_cast<std::size_t>(cfg.classes) * D, D);
    // bo stays zero
    return model;
}

RunContext make_context(const ModelConfig& cfg, int grid) {
    RunContext ctx;
    ctx.grid = grid;
    ctx.order = generate_order(cfg.curve, {grid, grid}, cfg.window);
    if (cfg.use_csr) ctx.graph = build_skip_graph(ctx.order);
    if (cfg.use_prc) {
        // rope angles encode fractional curve progress against a fixed
        // 64-step reference: position t on an n-cell curve rotates like
        // position 64 t / n, so a resolution change rescales positions
        // instead of extrapolating past the trained range
        const int cells = grid * grid;
        ctx.rope = make_rope_table(cfg.d_model, cells, 64.0 / cells);
    }
    return ctx;
}

std::vector<double> forward_sample(const Model& model, const RunContext& ctx,
                                   const double* image) {
    SampleCache cache;
    forward_cached(model, ctx, image, cache);
    return cache.logits;
}

EvalStats batch_loss(const Model& model, const RunContext& ctx, const Dataset& data,
                     std::vector<double>* grad) {
    if (data.grid != ctx.grid) throw ShapeMismatch("dataset grid does not match context");
    if (grad) grad->assign(model.layout.total, 0.0);
    const int K = model.config.classes;
    double loss = 0.0;
    int hits = 0;
    SampleCache cache;
    std::vector<double> probs(static_cast<size_t>(K)), d_logits(static_cast<size_t>(K));
    for (int i = 0; i < data.count; ++i) {
        forward_cached(model, ctx, data.image(i), cache);
        double mx = cache.logits[0];
        for (int k = 1; k < K; ++k) mx = std::max(mx, cache.logits[static_cast<size_t>(k)]);
        double z = 0.0;
        int arg = 0;
        for (int k = 0; k < K; ++k) {
            probs[static_cast<size_t>(k)] = std::exp(cache.logits[static_cast<size_t>(k)] - mx);
            z += probs[static_cast<size_t>(k)];
            if (cache.logits[static_cast<size_t>(k)] > cache.logits[static_cast<size_t>(arg)]) arg = k;
        }
        const int label = data.labels[static_cast<size_t>(i)];
        loss += -(cache.logits[static_cast<size_t>(label)] - mx - std::log(z));
        hits += arg == label ? 1 : 0;
        if (grad) {
            for (int k = 0; k < K; ++k)
                d_logits[static_cast<size_t>(k)] = probs[static_cast<size_t>(k)] / z -
                                                   (k == label ? 1.0 : 0.0);
            backward_cached(model, ctx, data.image(i), cache, d_logits, *grad);
        }
    }
    if (grad)
        for (double& v : *grad) v /= data.count;
    return {loss / data.count, static_cast<double>(hits) / data.count};
}

std::vector<StepMetrics> train(Model& model, const Dataset& data, int steps, double lr) {
    if (steps < 0) throw InvalidArgument("steps must be non-negative");
    const RunContext ctx = make_context(model.config, data.grid);
    std::vector<StepMetrics> metrics;
    metrics.reserve(static_cast<size_t>(steps));
    std::vector<double> grad;
    for (int step = 0; step < steps; ++step) {
        const EvalStats stats = batch_loss(model, ctx, data, &grad);
        if (!std::isfinite(stats.loss))
            throw DivergedLoss("loss became non-finite at step " + std::to_string(step));
        metrics.push_back({step, stats.loss, stats.accuracy});
        // clip to unit global norm: lr bounds the parameter movement per step
        double sq = 0.0;
        for (double g : grad) sq += g * g;
        const double scale = sq > 1.0 ? 1.0 / std::sqrt(sq) : 1.0;
        for (std::size_t i = 0; i < model.params.size(); ++i)
            model.params[i] -= lr * scale * grad[i];
    }
    return metrics;
}

double evaluate(const Model& model, const Dataset& data) {
    const RunContext ctx = make_context(model.config, data.grid);
    return batch_loss(model, ctx, data, nullptr).accuracy;
}

std::string metrics_to_csv(const std::vector<StepMetrics>& metrics) {
    std::string out = "step,loss,acc\n";
    char buf[96];
    for (const StepMetrics& m : metrics) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", m.step, m.loss, m.accuracy);
        out += buf;
    }
    return out;
}

TransferResult eval_resolution_transfer(const ModelConfig& config, CurveKind baseline,
                                        TaskKind task, int steps, double lr, int train_count,
                                        int eval_count, std::uint64_t data_seed) {
    const Dataset train_set = make_dataset(task, config.grid, train_count, data_seed);
    const Dataset eval_train = make_dataset(task, config.grid, eval_count, derive_seed(data_seed, 101));
    const Dataset eval_double =
        make_dataset(task, config.grid * 2, eval_count, derive_seed(data_seed, 202));

    ModelConfig cfg_b = config;
    cfg_b.curve = baseline;

    Model a = build_model(config);
    train(a, train_set, steps, lr);
    Model b = build_model(cfg_b);
    train(b, train_set, steps, lr);

    TransferResult out;
    out.acc_a_train = evaluate(a, eval_train);
    out.acc_a_double = evaluate(a, eval_double);
    out.acc_b_train = evaluate(b, eval_train);
    out.acc_b_double = evaluate(b, eval_double);
    return out;
}

void save_checkpoint(const Model& model, const std::string& path) {
    nlohmann::ordered_json header;
    header["format"] = "fssm-ckpt-v1";
    nlohmann::ordered_json cfg;
    cfg["grid"] = model.config.grid;
    cfg["curve"] = curve_kind_name(model.config.curve);
    cfg["window"] = model.config.window;
    cfg["d_model"] = model.config.d_model;
    cfg["d_state"] = model.config.d_state;
    cfg["n_blocks"] = model.config.n_blocks;
    cfg["mlp_hidden"] = model.config.mlp_hidden;
    cfg["classes"] = model.config.classes;
    cfg["use_csr"] = model.config.use_csr;
    cfg["use_prc"] = model.config.use_prc;
    cfg["seed"] = model.config.seed;
    header["config"] = std::move(cfg);
    header["param_count"] = model.params.size();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open checkpoint for writing: " + path);
    out << header.dump() << "\n";
    out.write(reinterpret_cast<const char*>(model.params.data()),
              static_cast<std::streamsize>(model.params.size() * sizeof(double)));
    if (!out) throw IoFailure("failed writing checkpoint: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(in, line)) throw BadCheckpoint("checkpoint missing header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw BadCheckpoint(std::string("bad checkpoint header: ") + e.what());
    }
    if (header.value("format", "") != "fssm-ckpt-v1")
        throw BadCheckpoint("unknown checkpoint format");
    ModelConfig cfg;
    try {
        const auto& c = header.at("config");
        cfg.grid = c.at("grid").get<int>();
        cfg.curve = curve_kind_from_string(c.at("curve").get<std::string>());
        cfg.window = c.at("window").get<int>();
        cfg.d_model = c.at("d_model").get<int>();
        cfg.d_state = c.at("d_state").get<int>();
        cfg.n_blocks = c.at("n_blocks").get<int>();
        cfg.mlp_hidden = c.at("mlp_hidden").get<int>();
        cfg.classes = c.at("classes").get<int>();
        cfg.use_csr = c.at("use_csr").get<bool>();
        cfg.use_prc = c.at("use_prc").get<bool>();
        cfg.seed = c.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw BadCheckpoint(std::string("bad checkpoint config: ") + e.what());
    }
    Model model;
    model.config = cfg;
    model.layout = make_layout(cfg);
    const std::size_t count = header.value("param_count", std::size_t{0});
    if (count != model.layout.total)
        throw BadCheckpoint("parameter count does not match config layout");
    model.params.assign(count, 0.0);
    in.read(reinterpret_cast<char*>(model.params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw BadCheckpoint("checkpoint truncated");
    return model;
}

}  // namespace fractalssm
