#include "kdemode/kernels.hpp"

#include "kdemode/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace kdemode {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_t(double t) {
    if (!(t >= 0.0)) throw DomainError("kernel argument t must be >= 0, got " + std::to_string(t));
}

void require_differentiable(const KernelSpec& spec, const char* op) {
    if (!spec.differentiable()) {
        throw UnsupportedOperation(std::string(op) + " is undefined for the box kernel");
    }
}

// tanh(s/2)/s and tanh(s)/s with their series near 0.
double tanh_half_over(double s) {
    if (s < 1e-4) return 0.5 - s * s / 24.0;
    double e = std::exp(-s);
    return -std::expm1(-s) / (1.0 + e) / s;
}

double tanh_over(double s) {
    if (s < 1e-4) return 1.0 - s * s / 3.0;
    double e2 = std::exp(-2.0 * s);
    return -std::expm1(-2.0 * s) / (1.0 + e2) / s;
}

// log kappa(t) for the exponential-tail kinds.
double log_kappa(const KernelSpec& spec, double t) {
    switch (spec.kind) {
        case KernelKind::Gaussian:
            return -t;
        case KernelKind::GeneralizedGaussian:
            return -std::pow(t, spec.alpha);
        case KernelKind::Logistic: {
            double s = std::sqrt(t);
            return std::log(4.0) - s - 2.0 * std::log1p(std::exp(-s));
        }
        case KernelKind::Sigmoid: {
            double s = std::sqrt(t);
            return std::log(2.0) - s - std::log1p(std::exp(-2.0 * s));
        }
        default:
            return std::log(kappa(spec, t));
    }
}

// -kappa'(t) / kappa(t), evaluated without forming kappa.
double hazard(const KernelSpec& spec, double t) {
    switch (spec.kind) {
        case KernelKind::Gaussian:
            return 1.0;
        case KernelKind::GeneralizedGaussian:
            return spec.alpha * std::pow(t, spec.alpha - 1.0);
        case KernelKind::Logistic:
            return tanh_half_over(std::sqrt(t)) / 2.0;
        case KernelKind::Sigmoid:
            return tanh_over(std::sqrt(t)) / 2.0;
        case KernelKind::Cauchy:
            return 1.0 / (1.0 + t);
        case KernelKind::Epanechnikov:
            return t < 1.0 ? 1.0 / (1.0 - t) : kInf;
        case KernelKind::Box:
            break;
    }
    throw UnsupportedOperation("hazard is undefined for the box kernel");
}

KappaPrimeMin grid_kappa_prime_min(const KernelSpec& spec, double xi) {
    constexpr int kPoints = 10001;
    double hi = 2.0 * xi;
    double lowest = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        double t = hi * static_cast<double>(i) / (kPoints - 1);
        if (kappa(spec, t) <= 0.0) {
            throw DegenerateKernel("kappa vanishes inside [0, 2 xi]; kappa'(t) t / kappa(t) is unbounded");
        }
        lowest = std::min(lowest, -relative_slope(spec, t));
    }
    return {lowest * 1.01, false};
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

double parse_positive(std::string_view text, const char* what) {
    std::string owned(text);
    try {
        std::size_t used = 0;
        double v = std::stod(owned, &used);
        if (used != owned.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(owned);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("invalid ") + what + " '" + owned + "' in kernel spec");
    }
}

}  // namespace

bool KernelSpec::convex() const noexcept {
    switch (kind) {
        case KernelKind::Gaussian:
        case KernelKind::Logistic:
        case KernelKind::Sigmoid:
        case KernelKind::Cauchy:
        case KernelKind::Epanechnikov:
            return true;
        case KernelKind::GeneralizedGaussian:
            return alpha <= 1.0;
        case KernelKind::Box:
            return false;
    }
    return false;
}

KernelSpec KernelSpec::make(KernelKind kind, double bandwidth, double alpha) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("bandwidth must be positive and finite");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
    return KernelSpec{kind, alpha, bandwidth};
}

std::optional<RdsParams> builtin_rds(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelKind::Gaussian:
            return RdsParams{1, 1, 0, 1, 1};
        case KernelKind::Logistic:
        case KernelKind::Sigmoid:
            return RdsParams{0.5, 0.5, 0.5, 0.5, 0.5};
        case KernelKind::GeneralizedGaussian:
            return RdsParams{spec.alpha, spec.alpha, 0, spec.alpha, spec.alpha};
        default:
            return std::nullopt;
    }
}

double kappa(const KernelSpec& spec, double t) {
    require_t(t);
    switch (spec.kind) {
        case KernelKind::Gaussian:
            return std::exp(-t);
        case KernelKind::Logistic: {
            // 4 / (e^s + 2 + e^-s) rewritten in e^-s so large s cannot overflow.
            double e = std::exp(-std::sqrt(t));
            return 4.0 * e / ((1.0 + e) * (1.0 + e));
        }
        case KernelKind::Sigmoid: {
            double e = std::exp(-std::sqrt(t));
            return 2.0 * e / (1.0 + e * e);
        }
        case KernelKind::Cauchy:
            return 1.0 / (1.0 + t);
        case KernelKind::GeneralizedGaussian:
            return std::exp(-std::pow(t, spec.alpha));
        case KernelKind::Box:
            return t <= 1.0 ? 1.0 : 0.0;
        case KernelKind::Epanechnikov:
            return std::max(0.0, 1.0 - t);
    }
    return 0.0;
}

double kappa_prime(const KernelSpec& spec, double t) {
    require_differentiable(spec, "kappa'");
    require_t(t);
    switch (spec.kind) {
        case KernelKind::Gaussian:
            return -std::exp(-t);
        case KernelKind::Logistic:
            return -kappa(spec, t) * tanh_half_over(std::sqrt(t)) / 2.0;
        case KernelKind::Sigmoid:
            return -kappa(spec, t) * tanh_over(std::sqrt(t)) / 2.0;
        case KernelKind::Cauchy:
            return -1.0 / ((1.0 + t) * (1.0 + t));
        case KernelKind::GeneralizedGaussian: {
            double a = spec.alpha;
            if (t == 0.0) {
                if (a < 1.0) return -kInf;
                return a == 1.0 ? -1.0 : 0.0;
            }
            return -a * std::pow(t, a - 1.0) * std::exp(-std::pow(t, a));
        }
        case KernelKind::Epanechnikov:
            return t < 1.0 ? -1.0 : 0.0;
        case KernelKind::Box:
            break;
    }
    return 0.0;
}

std::optional<double> log_neg_kappa_prime(const KernelSpec& spec, double t) {
    require_t(t);
    switch (spec.kind) {
        case KernelKind::Gaussian:
        case KernelKind::Logistic:
        case KernelKind::Sigmoid:
            return log_kappa(spec, t) + std::log(hazard(spec, t));
        case KernelKind::GeneralizedGaussian: {
            double a = spec.alpha;
            if (t == 0.0) {
                if (a < 1.0) return kInf;
                return a == 1.0 ? 0.0 : -kInf;
            }
            return std::log(a) + (a - 1.0) * std::log(t) - std::pow(t, a);
        }
        default:
            return std::nullopt;
    }
}

double relative_slope(const KernelSpec& spec, double t) {
    require_differentiable(spec, "relative slope");
    require_t(t);
    if (t == 0.0) return 0.0;
    double k = kappa(spec, t);
    if (k >= 1e-200) {
        double kp = kappa_prime(spec, t);
        return -kp * t / k;
    }
    // kappa has (nearly) underflowed; the ratio is still well defined.
    return hazard(spec, t) * t;
}

double critical_radius(const KernelSpec& spec, double level) {
    if (!(level > 0.0) || level > 1.0) {
        throw DomainError("critical radius level must lie in (0, 1], got " + std::to_string(level));
    }
    if (level == 1.0) return 0.0;

    double r = 0.0;
    switch (spec.kind) {
        case KernelKind::Gaussian:
            r = -std::log(level);
            break;
        case KernelKind::Cauchy:
            r = 1.0 / level - 1.0;
            break;
        case KernelKind::GeneralizedGaussian:
            r = std::pow(-std::log(level), 1.0 / spec.alpha);
            break;
        case KernelKind::Epanechnikov:
            r = 1.0 - level;
            break;
        case KernelKind::Box:
            return 1.0;
        case KernelKind::Logistic:
        case KernelKind::Sigmoid: {
            double lo = 0.0;
            double hi = 1.0;
            while (kappa(spec, hi) > level) hi *= 2.0;
            for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
                double mid = 0.5 * (lo + hi);
                if (kappa(spec, mid) <= level) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
    }
    // Closed forms can land one ulp short of the level set.
    for (int i = 0; i < 64 && kappa(spec, r) > level; ++i) {
        r = std::nextafter(r, kInf);
    }
    return r;
}

KappaPrimeMin kappa_prime_min(const KernelSpec& spec, double xi) {
    require_differentiable(spec, "kappa'_min");
    if (!(xi >= 0.0)) throw DomainError("xi must be >= 0");
    if (spec.kind == KernelKind::Cauchy) return {-1.0, true};
    if (auto rds = builtin_rds(spec)) {
        return {-rds->c2 * std::pow(2.0 * xi, rds->d2), true};
    }
    return grid_kappa_prime_min(spec, xi);
}

double gamma_for_epsilon(const KernelSpec& spec, std::size_t n, double eps) {
    if (n == 0) throw DomainError("n must be positive");
    if (!(eps > 0.0) || eps > 1.0) throw DomainError("eps must lie in (0, 1]");
    require_differentiable(spec, "gamma_for_epsilon");
    double xi = critical_radius(spec, eps / (2.0 * static_cast<double>(n)));
    KappaPrimeMin kmin = kappa_prime_min(spec, xi);
    if (kmin.value == 0.0 || !std::isfinite(kmin.value)) {
        throw DegenerateKernel("kappa'_min is zero or unbounded on [0, 2 xi]");
    }
    return -eps / (2.0 * kmin.value);
}

bool rds_check(const KernelSpec& spec, const RdsParams& p, std::span<const double> t_grid) {
    require_differentiable(spec, "rds_check");
    constexpr double kSlack = 1e-9;
    for (double t : t_grid) {
        double s = relative_slope(spec, t);
        double lower = p.c1 * std::pow(t, p.d1) - p.q1;
        double upper = p.c2 * std::pow(t, p.d2);
        if (lower > s + kSlack || s > upper + kSlack) return false;
    }
    return true;
}

DerivativeCheck check_derivative(const KernelSpec& spec, std::span<const double> t_grid) {
    require_differentiable(spec, "check_derivative");
    DerivativeCheck out;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw DomainError("derivative check needs t > 0");
        double h = std::min(1e-6 * std::max(1.0, t), t / 300.0);
        if (spec.kind == KernelKind::Epanechnikov && std::abs(t - 1.0) <= h) continue;
        ++out.points;
        double analytic = kappa_prime(spec, t);
        double numeric = (kappa(spec, t + h) - kappa(spec, t - h)) / (2.0 * h);
        double ratio = std::abs(analytic - numeric) / (1e-5 * std::max(1.0, std::abs(analytic)));
        if (!(ratio <= 1.0)) ++out.failures;
        if (!(ratio <= out.worst_ratio)) {
            out.worst_ratio = ratio;
            out.worst_t = t;
        }
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi > lo) || count < 2) throw DomainError("log_grid needs 0 < lo < hi and count >= 2");
    std::vector<double> g(count);
    double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::string_view kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::Logistic: return "logistic";
        case KernelKind::Sigmoid: return "sigmoid";
        case KernelKind::Cauchy: return "cauchy";
        case KernelKind::GeneralizedGaussian: return "gengauss";
        case KernelKind::Box: return "box";
        case KernelKind::Epanechnikov: return "epanechnikov";
    }
    return "unknown";
}

KernelSpec parse_kernel(std::string_view text) {
    std::string s = lower(text);
    double bandwidth = 1.0;
    if (auto at = s.find('@'); at != std::string::npos) {
        bandwidth = parse_positive(std::string_view(s).substr(at + 1), "bandwidth");
        s.resize(at);
    }
    double alpha = 1.0;
    bool has_alpha = false;
    if (auto colon = s.find(':'); colon != std::string::npos) {
        alpha = parse_positive(std::string_view(s).substr(colon + 1), "alpha");
        has_alpha = true;
        s.resize(colon);
    }
    static const std::pair<const char*, KernelKind> kNames[] = {
        {"gaussian", KernelKind::Gaussian},
        {"logistic", KernelKind::Logistic},
        {"sigmoid", KernelKind::Sigmoid},
        {"cauchy", KernelKind::Cauchy},
        {"gengauss", KernelKind::GeneralizedGaussian},
        {"generalizedgaussian", KernelKind::GeneralizedGaussian},
        {"box", KernelKind::Box},
        {"epanechnikov", KernelKind::Epanechnikov},
    };
    for (const auto& [name, kind] : kNames) {
        if (s == name) {
            if (has_alpha && kind != KernelKind::GeneralizedGaussian) {
                throw ConfigError("only gengauss takes an alpha parameter: '" + std::string(text) + "'");
            }
            return KernelSpec{kind, alpha, bandwidth};
        }
    }
    throw ConfigError("unknown kernel '" + std::string(text) + "'");
}

std::string to_string(const KernelSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << kind_name(spec.kind);
    if (spec.kind == KernelKind::GeneralizedGaussian) out << ':' << spec.alpha;
    out << '@' << spec.bandwidth;
    return out.str();
}

}  // namespace kdemode
