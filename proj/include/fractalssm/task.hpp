// Synthetic classification tasks defined in image units so one sampler renders
// the same concept at any grid resolution:
//   stripes - sinusoidal grating at +-45 degrees, label picks the diagonal
//             (0 along u+v, 1 along u-v); fixed frequency, random phase,
//             pixel noise
//   checker - label 0 checkerboard, label 1 diagonal stripes, random phase
//   blobs   - label = number of Gaussian bumps minus one (1 or 2), random
//             well-separated centers
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractalssm/errors.hpp"

namespace fractalssm {

enum class TaskKind { Stripes, Checker, Blobs };

TaskKind task_from_string(const std::string& name);  // UnknownKind
std::string task_name(TaskKind kind);

struct Dataset {
    int grid = 0;   // square side
    int count = 0;  // sample count
    std::vector<double> pixels;  // (count, grid*grid), raster layout
    std::vector<int> labels;     // in {0, 1}

    const double* image(int i) const { return pixels.data() + static_cast<size_t>(i) * grid * grid; }
};

// Deterministic in (kind, grid, count, seed); grid >= 2, count >= 1.
Dataset make_dataset(TaskKind kind, int grid, int count, std::uint64_t seed);

}  // namespace fractalssm
