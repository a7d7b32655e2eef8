#pragma once

#include "kdemode/kde.hpp"
#include "kdemode/meanshift.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kdemode {

/// Largest grid budget delta (in kappa's argument units) for which
/// kappa(c) - kappa(c + delta) <= eps kappa(c) on c in [0, xi_kappa(1/n)].
///
/// Relative-distance-smooth kernels use min((d2 eps / c2)^(1/d2), (eps / c2)(2 xi_bar)^(1 - d2))
/// with xi_bar = max(1, xi_kappa(1/n)); Cauchy uses delta = eps. The condition is re-checked on a
/// 1000-point grid before returning. Box and Epanechnikov have no rule (UnsupportedOperation).
double delta_for_eps(const KernelSpec& kernel, std::size_t n, double eps);

/// Axis-aligned delta-covering of the balls of squared radius xi around each center.
/// All quantities are in raw coordinate units.
struct CoverSpec {
    std::size_t dim = 1;
    double xi = 0.0;     // squared radius of the critical ball
    double delta = 0.0;  // squared-distance budget to the nearest grid point
    double step = 0.0;   // sqrt(delta / dim)
    std::int64_t range = 0;  // |k_i| <= range

    static CoverSpec make(std::size_t dim, double xi, double delta);

    /// (2 range + 1)^dim.
    double points_per_center() const;
};

/// Lazily enumerates m + sum_i k_i step e_i: centers outer, odometer over (k_1..k_d) inner,
/// k_1 varying slowest.
class CoverStream {
public:
    CoverStream(const Dataset& centers, CoverSpec spec);

    bool next(std::vector<double>& out);
    double total() const { return spec_.points_per_center() * static_cast<double>(centers_->size()); }
    const CoverSpec& spec() const noexcept { return spec_; }

    /// Visits every grid point of one center in stream order.
    void for_center(std::size_t center, const std::function<void(std::span<const double>)>& visit) const;

private:
    const Dataset* centers_;
    CoverSpec spec_;
    std::size_t center_ = 0;
    std::vector<std::int64_t> k_;
    bool exhausted_ = false;
};

/// Cover for an instance: xi = sigma^2 xi_kappa(1/n), delta given in kappa units and scaled by
/// sigma^2. Throws BudgetExceeded when the stream would exceed `budget` points.
CoverStream cover_points(const KdeInstance& inst, double delta, double budget = 1e8);

/// Best point of the delta_for_eps cover; value >= (1 - eps) max_x K(x). Ties keep the first
/// point in stream order.
ModeResult brute_force_mode(const KdeInstance& inst, double eps, double budget = 1e8);

/// Orthonormal frame of the affine hull of a point set. When every point coincides the frame
/// keeps one coordinate axis, so `coordinates` always has dimension >= 1.
struct AffineFrame {
    std::vector<double> origin;
    std::vector<std::vector<double>> basis;  // unit vectors, pairwise orthogonal
    Dataset coordinates;                     // points expressed in the frame

    std::vector<double> lift(std::span<const double> coords) const;
};

AffineFrame affine_frame(const Dataset& data, double rel_tol = 1e-10);

/// brute_force_mode run in the affine hull of the centers (where every maximizer lives),
/// lifted back to the ambient space. Makes the sketched problem tractable when the centers span
/// few dimensions of a large ambient space.
ModeResult brute_force_mode_reduced(const KdeInstance& inst, double eps, double budget = 1e8);

}  // namespace kdemode
