#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdemode {

enum class KernelKind {
    Gaussian,
    Logistic,
    Sigmoid,
    Cauchy,
    GeneralizedGaussian,
    Box,
    Epanechnikov,
};

/// Radial, non-increasing kernel kappa(t) with kappa(0) = 1, where t = ||x - m||^2 / bandwidth^2.
///
/// The formulas below are always in unit-bandwidth form; the bandwidth is applied once,
/// when a squared distance is turned into t (see scaled_argument).
struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    double alpha = 1.0;      // generalized Gaussian exponent, ignored by other kinds
    double bandwidth = 1.0;  // sigma

    /// kappa is convex in t: Gaussian, Logistic, Sigmoid, Cauchy, Epanechnikov, GeneralizedGaussian with alpha <= 1.
    bool convex() const noexcept;
    bool differentiable() const noexcept { return kind != KernelKind::Box; }

    double scaled_argument(double squared_distance) const noexcept {
        return squared_distance / (bandwidth * bandwidth);
    }

    static KernelSpec make(KernelKind kind, double bandwidth = 1.0, double alpha = 1.0);
};

/// Relative-distance smoothness constants:
/// c1 t^d1 - q1 <= -kappa'(t) t / kappa(t) <= c2 t^d2 for all t >= 0.
struct RdsParams {
    double c1 = 0, d1 = 0, q1 = 0, c2 = 0, d2 = 0;
};

/// Built-in constants for Gaussian, Logistic, Sigmoid and GeneralizedGaussian; empty otherwise.
std::optional<RdsParams> builtin_rds(const KernelSpec& spec);

double kappa(const KernelSpec& spec, double t);

/// kappa'(t). Epanechnikov uses the right limit 0 at the kink t = 1. GeneralizedGaussian with
/// alpha < 1 returns -infinity at t = 0. Throws UnsupportedOperation for the box kernel.
double kappa_prime(const KernelSpec& spec, double t);

/// log(-kappa'(t)) for kernels with exponential tails, finite far past the point where
/// kappa'(t) itself underflows. Empty for Cauchy, Epanechnikov and Box.
std::optional<double> log_neg_kappa_prime(const KernelSpec& spec, double t);

/// Smallest t with kappa(t) <= level. Closed forms where they exist, monotone bisection
/// (relative tolerance 1e-12, at most 200 steps) for Logistic and Sigmoid.
double critical_radius(const KernelSpec& spec, double level);

struct KappaPrimeMin {
    double value = 0;        // lower bound on min_{0 <= t <= 2 xi} kappa'(t) t / kappa(t)
    bool certified = false;  // false when produced by the grid fallback
};

KappaPrimeMin kappa_prime_min(const KernelSpec& spec, double xi);

/// gamma = -eps / (2 kappa'_min) with xi = critical_radius(eps / 2n).
double gamma_for_epsilon(const KernelSpec& spec, std::size_t n, double eps);

/// Both relative-distance smoothness inequalities hold at every grid point (absolute slack 1e-9).
bool rds_check(const KernelSpec& spec, const RdsParams& params, std::span<const double> t_grid);

/// -kappa'(t) t / kappa(t); 0 at t = 0.
double relative_slope(const KernelSpec& spec, double t);

struct DerivativeCheck {
    std::size_t points = 0;
    std::size_t failures = 0;
    double worst_t = 0.0;       // grid point with the largest error relative to its tolerance
    double worst_ratio = 0.0;   // error / tolerance there
};

/// Central differences against kappa_prime with tolerance 1e-5 max(1, |kappa'(t)|).
/// Step h = min(1e-6 max(1, t), t / 300) so that t - h stays inside the domain; points within
/// h of the Epanechnikov kink are skipped.
DerivativeCheck check_derivative(const KernelSpec& spec, std::span<const double> t_grid);

/// count points spaced evenly in log(t) over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Parses "kind[:alpha]@bandwidth", case-insensitive. Kinds: gaussian, logistic, sigmoid,
/// cauchy, gengauss, box, epanechnikov. "@bandwidth" may be omitted (sigma = 1).
KernelSpec parse_kernel(std::string_view text);
std::string to_string(const KernelSpec& spec);
std::string_view kind_name(KernelKind kind);

}  // namespace kdemode
