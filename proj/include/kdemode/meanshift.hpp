#pragma once

#include "kdemode/kde.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kdemode {

enum class ModeMethod {
    MeanShift,
    BruteForce,
    RecoveredConvex,
    RecoveredNonConvex,
};

std::string_view method_name(ModeMethod method);

/// A candidate mode. `value` is always the KDE evaluated at `point` in the instance the
/// result was built against (see make_mode_result).
struct ModeResult {
    std::vector<double> point;
    double value = 0.0;
    ModeMethod method = ModeMethod::MeanShift;
    int iterations = 0;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> trajectory_values;
    bool stalled = false;
};

ModeResult make_mode_result(const KdeInstance& inst, std::vector<double> point, ModeMethod method,
                            int iterations = 0, std::uint64_t seed = 0);

/// Normalized mean-shift weights -kappa'(t_m) / sum_j -kappa'(t_j) for bandwidth-scaled
/// squared distances t. Falls back to log-domain weights when every |kappa'| underflows;
/// points at an infinite-slope center (generalized Gaussian, alpha < 1) share the mass.
/// Throws StallError when all weights are zero.
std::vector<double> centroid_weights(const KernelSpec& kernel, std::span<const double> t);

/// sum_m weights[m] * m.
std::vector<double> weighted_centroid(const Dataset& data, std::span<const double> weights);

/// One mean-shift update x <- sum_m m kappa'(t_m) / sum_j kappa'(t_j).
std::vector<double> mean_shift_step(const KdeInstance& inst, std::span<const double> x);

struct MeanShiftOptions {
    int max_iters = 100;
    double tol = 1e-9;
    bool record_trajectory = false;
};

/// Iterates mean_shift_step until ||x_{i+1} - x_i|| <= tol (1 + ||x_i||) or max_iters.
/// A stall returns the current iterate with `stalled` set.
ModeResult mean_shift(const KdeInstance& inst, std::span<const double> x0, const MeanShiftOptions& options = {});

/// Start point for restart `index`: even indices use a Dirichlet-uniform combination of all
/// centers, odd indices a uniform combination of a random pair. Depends only on (seed, index).
std::vector<double> restart_point(const Dataset& data, std::size_t index, std::uint64_t seed);

/// Best of `restarts` mean-shift runs (ties keep the lowest restart index). Restarts run
/// concurrently; the result does not depend on the thread count.
ModeResult multi_restart(const KdeInstance& inst, int restarts, const MeanShiftOptions& options, std::uint64_t seed);

}  // namespace kdemode
