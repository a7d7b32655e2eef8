#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kdemode/error.hpp"
#include "kdemode/kernels.hpp"

#include <cmath>
#include <vector>

using namespace kdemode;

namespace {

KernelSpec k(KernelKind kind, double alpha = 1.0) { return KernelSpec::make(kind, 1.0, alpha); }

std::vector<double> uniform_grid(double hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = hi * static_cast<double>(i) / static_cast<double>(count - 1);
    return g;
}

const std::vector<KernelSpec> kContinuous = {
    k(KernelKind::Gaussian),         k(KernelKind::Logistic),
    k(KernelKind::Sigmoid),          k(KernelKind::Cauchy),
    k(KernelKind::GeneralizedGaussian, 0.5), k(KernelKind::GeneralizedGaussian, 2.0),
    k(KernelKind::Epanechnikov),
};

}  // namespace

TEST_CASE("kappa values") {
    CHECK(kappa(k(KernelKind::Gaussian), 0.0) == 1.0);
    CHECK(kappa(k(KernelKind::Cauchy), 3.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(kappa(k(KernelKind::Box), 1.0) == 1.0);
    CHECK(kappa(k(KernelKind::Box), 1.01) == 0.0);
    CHECK(kappa(k(KernelKind::Epanechnikov), 0.25) == doctest::Approx(0.75));
    CHECK(kappa(k(KernelKind::Epanechnikov), 2.0) == 0.0);
    for (const auto& spec : kContinuous) CHECK(kappa(spec, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // logistic 4 / (e^s + 2 + e^-s) at s = 1
    CHECK(kappa(k(KernelKind::Logistic), 1.0) == doctest::Approx(4.0 / (std::exp(1.0) + 2.0 + std::exp(-1.0))));
    CHECK(kappa(k(KernelKind::Sigmoid), 4.0) == doctest::Approx(2.0 / (std::exp(2.0) + std::exp(-2.0))));
    CHECK_THROWS_AS(kappa(k(KernelKind::Gaussian), -0.1), DomainError);
}

TEST_CASE("kappa stays finite far in the tail") {
    CHECK(kappa(k(KernelKind::Logistic), 1e6) >= 0.0);
    CHECK(std::isfinite(kappa(k(KernelKind::Sigmoid), 1e8)));
    CHECK(kappa(k(KernelKind::Gaussian), 1e4) == 0.0);
}

TEST_CASE("kappa_prime values") {
    CHECK(kappa_prime(k(KernelKind::Gaussian), 0.0) == -1.0);
    CHECK(kappa_prime(k(KernelKind::Cauchy), 1.0) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(kappa_prime(k(KernelKind::GeneralizedGaussian, 0.5), 4.0) ==
          doctest::Approx(-0.033833820809153176).epsilon(1e-14));
    CHECK(kappa_prime(k(KernelKind::Epanechnikov), 1.0) == 0.0);
    CHECK(kappa_prime(k(KernelKind::Epanechnikov), 0.5) == -1.0);
    CHECK(std::isinf(kappa_prime(k(KernelKind::GeneralizedGaussian, 0.5), 0.0)));
    CHECK_THROWS_AS(kappa_prime(k(KernelKind::Box), 0.5), UnsupportedOperation);
}

TEST_CASE("log_neg_kappa_prime agrees where kappa_prime is representable") {
    for (const auto& spec : {k(KernelKind::Gaussian), k(KernelKind::Logistic), k(KernelKind::Sigmoid),
                             k(KernelKind::GeneralizedGaussian, 0.5)}) {
        for (double t : {0.01, 0.5, 3.0, 40.0}) {
            auto lg = log_neg_kappa_prime(spec, t);
            REQUIRE(lg.has_value());
            CHECK(*lg == doctest::Approx(std::log(-kappa_prime(spec, t))).epsilon(1e-10));
        }
        CHECK(std::isfinite(*log_neg_kappa_prime(spec, 1e5)));
    }
    CHECK_FALSE(log_neg_kappa_prime(k(KernelKind::Cauchy), 1.0).has_value());
}

TEST_CASE("finite differences match kappa_prime on a log grid") {
    auto grid = log_grid(1e-8, 1e4, 500);
    for (const auto& spec : kContinuous) {
        DerivativeCheck dc = check_derivative(spec, grid);
        INFO(to_string(spec));
        CHECK(dc.failures == 0);
        CHECK(dc.points > 400);
    }
}

TEST_CASE("critical_radius inverts kappa") {
    CHECK(critical_radius(k(KernelKind::Gaussian), std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(critical_radius(k(KernelKind::Cauchy), 0.1) == doctest::Approx(9.0).epsilon(1e-14));
    // closed forms: logistic s = 2 acosh(1/sqrt(level)), sigmoid s = acosh(1/level)
    CHECK(critical_radius(k(KernelKind::Logistic), 0.01) == doctest::Approx(35.837532026291648).epsilon(1e-10));
    CHECK(critical_radius(k(KernelKind::Sigmoid), 0.01) == doctest::Approx(28.071901991486345).epsilon(1e-10));
    double xi = critical_radius(k(KernelKind::Logistic), 0.01);
    double v = kappa(k(KernelKind::Logistic), xi);
    CHECK(v <= 0.01);
    CHECK(v >= 0.01 * (1 - 1e-9));
    for (const auto& spec : kContinuous) {
        for (double level : {0.9, 0.5, 1e-3, 1e-8}) {
            double r = critical_radius(spec, level);
            INFO(to_string(spec), " level ", level);
            CHECK(kappa(spec, r) <= level);
            CHECK(kappa(spec, r * (1 - 1e-9)) > level);
        }
    }
    CHECK(critical_radius(k(KernelKind::Box), 0.3) == 1.0);
    CHECK(critical_radius(k(KernelKind::Gaussian), 1.0) == 0.0);
    CHECK_THROWS_AS(critical_radius(k(KernelKind::Gaussian), 0.0), DomainError);
    CHECK_THROWS_AS(critical_radius(k(KernelKind::Gaussian), 1.5), DomainError);
}

TEST_CASE("kappa_prime_min") {
    auto c = kappa_prime_min(k(KernelKind::Cauchy), 123.0);
    CHECK(c.value == -1.0);
    CHECK(c.certified);
    CHECK(kappa_prime_min(k(KernelKind::Gaussian), 3.0).value == doctest::Approx(-6.0));
    CHECK(kappa_prime_min(k(KernelKind::GeneralizedGaussian, 0.5), 2.0).value == doctest::Approx(-1.0));
    CHECK_THROWS_AS(kappa_prime_min(k(KernelKind::Box), 1.0), UnsupportedOperation);
    // certification: the bound lies below kappa'(t) t / kappa(t) across [0, 2 xi]
    for (const auto& spec : {k(KernelKind::Gaussian), k(KernelKind::Logistic), k(KernelKind::Sigmoid),
                             k(KernelKind::Cauchy), k(KernelKind::GeneralizedGaussian, 0.5)}) {
        double xi = 7.5;
        double bound = kappa_prime_min(spec, xi).value;
        for (double t : uniform_grid(2 * xi, 2001)) CHECK(-relative_slope(spec, t) >= bound - 1e-12);
    }
}

TEST_CASE("gamma_for_epsilon") {
    CHECK(gamma_for_epsilon(k(KernelKind::Cauchy), 10, 0.2) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(gamma_for_epsilon(k(KernelKind::Cauchy), 100000, 0.2) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(gamma_for_epsilon(k(KernelKind::Gaussian), 100, 0.5) == doctest::Approx(0.02086301254345838).epsilon(1e-12));
    CHECK(gamma_for_epsilon(k(KernelKind::GeneralizedGaussian, 1.0), 100, 0.5) ==
          gamma_for_epsilon(k(KernelKind::Gaussian), 100, 0.5));
    for (const auto& spec : {k(KernelKind::Gaussian), k(KernelKind::Logistic), k(KernelKind::Cauchy)}) {
        double prev = 0.0;
        for (double eps = 0.05; eps < 1.0; eps += 0.05) {
            double g = gamma_for_epsilon(spec, 50, eps);
            CHECK(g >= prev);
            prev = g;
        }
    }
    CHECK_THROWS_AS(gamma_for_epsilon(k(KernelKind::Epanechnikov), 10, 0.5), DegenerateKernel);
}

TEST_CASE("rds_check") {
    auto grid = uniform_grid(100.0, 201);
    CHECK(rds_check(k(KernelKind::Gaussian), {1, 1, 0, 1, 1}, grid));
    CHECK(rds_check(k(KernelKind::Sigmoid), {0.5, 0.5, 0.5, 0.5, 0.5}, grid));
    CHECK(rds_check(k(KernelKind::Logistic), {0.5, 0.5, 0.5, 0.5, 0.5}, grid));
    CHECK_FALSE(rds_check(k(KernelKind::Gaussian), {2, 1, 0, 1, 1}, grid));
    for (double a : {0.5, 1.0, 2.0}) {
        auto spec = k(KernelKind::GeneralizedGaussian, a);
        auto p = builtin_rds(spec);
        REQUIRE(p.has_value());
        CHECK(p->c1 == a);
        CHECK(rds_check(spec, *p, grid));
    }
    CHECK_FALSE(builtin_rds(k(KernelKind::Cauchy)).has_value());
}

TEST_CASE("parse_kernel") {
    auto g = parse_kernel("Gaussian@70");
    CHECK(g.kind == KernelKind::Gaussian);
    CHECK(g.bandwidth == 70.0);
    auto gg = parse_kernel("gengauss:0.5@20");
    CHECK(gg.kind == KernelKind::GeneralizedGaussian);
    CHECK(gg.alpha == 0.5);
    CHECK(gg.bandwidth == 20.0);
    CHECK(parse_kernel("cauchy").bandwidth == 1.0);
    CHECK(parse_kernel(to_string(gg)).alpha == 0.5);
    CHECK_THROWS_AS(parse_kernel("parabolic@1"), ConfigError);
    CHECK_THROWS_AS(parse_kernel("gaussian@-1"), ConfigError);
    CHECK_THROWS_AS(parse_kernel("gaussian@x"), ConfigError);
    CHECK_THROWS_AS(parse_kernel("gengauss:0@1"), ConfigError);
}

TEST_CASE("bandwidth enters only through the scaled argument") {
    auto spec = parse_kernel("gaussian@2");
    CHECK(spec.scaled_argument(8.0) == 2.0);
    CHECK(kappa(spec, 1.0) == kappa(k(KernelKind::Gaussian), 1.0));
}

TEST_CASE("convexity flags") {
    CHECK(k(KernelKind::Gaussian).convex());
    CHECK(k(KernelKind::Cauchy).convex());
    CHECK(k(KernelKind::GeneralizedGaussian, 0.5).convex());
    CHECK_FALSE(k(KernelKind::GeneralizedGaussian, 2.0).convex());
    CHECK_FALSE(k(KernelKind::Box).convex());
}
