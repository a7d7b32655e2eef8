#include "kdemode/recovery.hpp"

#include "kdemode/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kdemode {

namespace {

void check_sketch(const KdeInstance& inst, const SketchPair& sketch, std::span<const double> x_tilde) {
    if (sketch.source_fingerprint != inst.data().fingerprint() || sketch.projected.size() != inst.size()) {
        throw InconsistentSketch("sketch was built from a different dataset");
    }
    if (x_tilde.size() != sketch.projected.dim()) {
        throw DomainError("x~ has dimension " + std::to_string(x_tilde.size()) + ", sketch has " +
                          std::to_string(sketch.projected.dim()));
    }
}

std::vector<double> sketched_radii_sq(const SketchPair& sketch, std::span<const double> x_tilde) {
    std::vector<double> r(sketch.projected.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = squared_distance(x_tilde, sketch.projected.point(i));
    return r;
}

std::vector<double> plain_centroid(const Dataset& data) {
    std::vector<double> w(data.size(), 1.0 / static_cast<double>(data.size()));
    return weighted_centroid(data, w);
}

}  // namespace

double worst_constraint_ratio(const Dataset& data, std::span<const double> x, std::span<const double> radii_sq,
                              double eps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double dist = squared_distance(x, data.point(i));
        double cap = (1.0 + eps) * radii_sq[i];
        if (cap == 0.0) {
            if (dist > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, dist / cap);
    }
    return worst;
}

ModeResult recover_convex(const KdeInstance& inst, const SketchPair& sketch, std::span<const double> x_tilde) {
    check_sketch(inst, sketch, x_tilde);
    const KernelSpec& k = inst.kernel();
    if (!k.differentiable()) throw UnsupportedOperation("convex recovery needs a differentiable kernel");
    auto r = sketched_radii_sq(sketch, x_tilde);
    for (double& t : r) t = k.scaled_argument(t);
    auto w = centroid_weights(k, r);
    return make_mode_result(inst, weighted_centroid(inst.data(), w), ModeMethod::RecoveredConvex, 1);
}

ModeResult recover_nonconvex(const KdeInstance& inst, const SketchPair& sketch, std::span<const double> x_tilde,
                             const NonconvexRecoveryOptions& options) {
    check_sketch(inst, sketch, x_tilde);
    if (!(options.eps > 0.0)) throw DomainError("eps must be positive");
    if (options.max_iters < 1) throw DomainError("max_iters must be >= 1");
    const Dataset& data = inst.data();
    const std::size_t d = data.dim();
    auto radii_sq = sketched_radii_sq(sketch, x_tilde);

    // A zero radius pins x' to that center.
    for (std::size_t i = 0; i < radii_sq.size(); ++i) {
        if (radii_sq[i] == 0.0) {
            std::vector<double> m(data.point(i).begin(), data.point(i).end());
            double ratio = worst_constraint_ratio(data, m, radii_sq, options.eps);
            if (ratio > 1.0) {
                throw ExtensionFailure("x~ coincides with a sketched center whose preimage violates another constraint",
                                       ratio);
            }
            return make_mode_result(inst, std::move(m), ModeMethod::RecoveredNonConvex, 0);
        }
    }

    std::vector<double> x;
    try {
        x = recover_convex(inst, sketch, x_tilde).point;
    } catch (const Error&) {
        x = plain_centroid(data);
    }

    // Project onto balls with half the slack; their intersection contains the Kirszbraun
    // point whenever Pi does not shrink M's distances, so the iterates enter the full
    // (1 + eps) balls after finitely many sweeps.
    const double inner = 1.0 + 0.5 * options.eps;
    int sweeps = 0;
    double ratio = worst_constraint_ratio(data, x, radii_sq, options.eps);
    while (ratio > 1.0 && sweeps < options.max_iters) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto m = data.point(i);
            double dist_sq = squared_distance(x, m);
            double cap_sq = inner * radii_sq[i];
            if (dist_sq <= cap_sq) continue;
            double shrink = std::sqrt(cap_sq / dist_sq);
            for (std::size_t j = 0; j < d; ++j) x[j] = m[j] + (x[j] - m[j]) * shrink;
        }
        ++sweeps;
        ratio = worst_constraint_ratio(data, x, radii_sq, options.eps);
    }
    if (ratio > 1.0) {
        throw ExtensionFailure("one-point extension did not reach feasibility after " + std::to_string(sweeps) +
                                   " sweeps (worst ratio " + std::to_string(ratio) + ")",
                               ratio);
    }
    return make_mode_result(inst, std::move(x), ModeMethod::RecoveredNonConvex, sweeps);
}

}  // namespace kdemode
