#include "fractalssm/task.hpp"

#include <cmath>

#include "fractalssm/rng.hpp"

namespace fractalssm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kStripeFreq = 2.0;   // periods per image edge
constexpr double kStripeNoise = 0.4;  // pixel noise sigma
constexpr double kBlobRadius = 0.16;  // in image units

// oriented stripes at +-45 degrees: both labels share the same frequency
// content along any single row or column, so orientation is only decidable
// from the 2D structure, not from a 1D oscillation-rate shortcut
void render_stripes(double* img, int grid, int label, Rng& rng) {
    const double phase = rng.uniform();
    for (int y = 0; y < grid; ++y)
        for (int x = 0; x < grid; ++x) {
            const double u = (x + 0.5) / grid, v = (y + 0.5) / grid;
            const double along = label == 0 ? (u + v) * 0.5 : (u - v) * 0.5 + 0.5;
            img[y * grid + x] = std::sin(kTwoPi * (kStripeFreq * along + phase));
        }
    for (int i = 0; i < grid * grid; ++i) img[i] += kStripeNoise * rng.normal();
}

void render_checker(double* img, int grid, int label, Rng& rng) {
    const double phase_u = rng.uniform(), phase_v = rng.uniform();
    for (int y = 0; y < grid; ++y)
        for (int x = 0; x < grid; ++x) {
            const double u = (x + 0.5) / grid, v = (y + 0.5) / grid;
            double value;
            if (label == 0)
                value = std::sin(kTwoPi * (kStripeFreq * u + phase_u)) *
                        std::sin(kTwoPi * (kStripeFreq * v + phase_v));
            else
                value = std::sin(kTwoPi * (kStripeFreq * (u + v) + phase_u));
            img[y * grid + x] = value;
        }
    for (int i = 0; i < grid * grid; ++i) img[i] += kStripeNoise * rng.normal();
}

void render_blobs(double* img, int grid, int label, Rng& rng) {
    const int bumps = label + 1;
    double cx[2], cy[2];
    for (int k = 0; k < bumps; ++k) {
        for (;;) {
            cx[k] = rng.uniform(0.2, 0.8);
            cy[k] = rng.uniform(0.2, 0.8);
            bool ok = true;
            for (int j = 0; j < k; ++j) {
                const double dx = cx[k] - cx[j], dy = cy[k] - cy[j];
                if (dx * dx + dy * dy < 0.35 * 0.35) ok = false;
            }
            if (ok) break;
        }
    }
    for (int y = 0; y < grid; ++y)
        for (int x = 0; x < grid; ++x) {
            const double u = (x + 0.5) / grid, v = (y + 0.5) / grid;
            double value = 0.0;
            for (int k = 0; k < bumps; ++k) {
                const double dx = u - cx[k], dy = v - cy[k];
                value += std::exp(-(dx * dx + dy * dy) / (2.0 * kBlobRadius * kBlobRadius));
            }
            img[y * grid + x] = value;
        }
    for (int i = 0; i < grid * grid; ++i) img[i] += 0.5 * kStripeNoise * rng.normal();
}

}  // namespace

TaskKind task_from_string(const std::string& name) {
    if (name == "stripes") return TaskKind::Stripes;
    if (name == "checker") return TaskKind::Checker;
    if (name == "blobs") return TaskKind::Blobs;
    throw UnknownKind("unknown task: " + name);
}

std::string task_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::Stripes: return "stripes";
        case TaskKind::Checker: return "checker";
        default: return "blobs";
    }
}

Dataset make_dataset(TaskKind kind, int grid, int count, std::uint64_t seed) {
    if (grid < 2) throw InvalidArgument("task grid must be at least 2");
    if (count < 1) throw InvalidArgument("dataset count must be positive");
    Dataset ds;
    ds.grid = grid;
    ds.count = count;
    ds.pixels.assign(static_cast<size_t>(count) * grid * grid, 0.0);
    ds.labels.assign(static_cast<size_t>(count), 0);
    for (int i = 0; i < count; ++i) {
        // per-sample stream: the sample's content does not depend on its index
        // in the dataset beyond the derived seed
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const int label = static_cast<int>(rng.below(2));
        ds.labels[static_cast<size_t>(i)] = label;
        double* img = ds.pixels.data() + static_cast<size_t>(i) * grid * grid;
        switch (kind) {
            case TaskKind::Stripes: render_stripes(img, grid, label, rng); break;
            case TaskKind::Checker: render_checker(img, grid, label, rng); break;
            case TaskKind::Blobs: render_blobs(img, grid, label, rng); break;
        }
    }
    return ds;
}

}  // namespace fractalssm
