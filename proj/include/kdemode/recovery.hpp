#pragma once

#include "kdemode/kde.hpp"
#include "kdemode/meanshift.hpp"
#include "kdemode/sketch.hpp"

#include <span>
#include <vector>

namespace kdemode {

/// Maps an approximate mode x~ of the sketched KDE back to R^d with a single mean-shift-style
/// step whose weights come from the sketched distances:
///     x' = sum_m m kappa'(||x~ - Pi m||^2) / sum_m kappa'(||x~ - Pi m||^2).
/// For convex non-increasing kernels K_M(x') >= K_{Pi M}(x~) whenever Pi does not shrink M's
/// pairwise distances. The reported value is evaluated in the original d-dimensional instance.
///
/// Throws InconsistentSketch when `sketch` was not built from inst.data(), StallError when every
/// weight vanishes.
ModeResult recover_convex(const KdeInstance& inst, const SketchPair& sketch, std::span<const double> x_tilde);

struct NonconvexRecoveryOptions {
    double eps = 0.1;
    int max_iters = 10000;
};

/// Finds x' with ||x' - m||^2 <= (1 + eps) ||x~ - Pi m||^2 for every center m by cyclic
/// projection onto the balls. Every constraint is checked before returning; on failure an
/// ExtensionFailure carrying the worst constraint ratio is thrown.
ModeResult recover_nonconvex(const KdeInstance& inst, const SketchPair& sketch, std::span<const double> x_tilde,
                             const NonconvexRecoveryOptions& options = {});

/// max_m ||x - m||^2 / ((1 + eps) r_m^2) with r_m = ||x~ - Pi m||; zero radii count as
/// satisfied only when x coincides with m.
double worst_constraint_ratio(const Dataset& data, std::span<const double> x, std::span<const double> radii_sq,
                              double eps);

}  // namespace kdemode
