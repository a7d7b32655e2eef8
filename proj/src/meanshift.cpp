#include "kdemode/meanshift.hpp"

#include "kdemode/error.hpp"
#include "kdemode/parallel.hpp"
#include "kdemode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace kdemode {

namespace {

constexpr double kUnderflow = 1e-300;

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::string_view method_name(ModeMethod method) {
    switch (method) {
        case ModeMethod::MeanShift: return "meanshift";
        case ModeMethod::BruteForce: return "brute";
        case ModeMethod::RecoveredConvex: return "recovered-convex";
        case ModeMethod::RecoveredNonConvex: return "recovered-nonconvex";
    }
    return "unknown";
}

ModeResult make_mode_result(const KdeInstance& inst, std::vector<double> point, ModeMethod method, int iterations,
                            std::uint64_t seed) {
    ModeResult r;
    r.value = inst.evaluate(point);
    r.point = std::move(point);
    r.method = method;
    r.iterations = iterations;
    r.seed = seed;
    return r;
}

std::vector<double> centroid_weights(const KernelSpec& kernel, std::span<const double> t) {
    std::size_t n = t.size();
    std::vector<double> w(n);
    bool any_infinite = false;
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Both kappa' and its sum are non-positive; work with magnitudes.
        w[i] = -kappa_prime(kernel, t[i]);
        if (std::isinf(w[i])) any_infinite = true;
        largest = std::max(largest, w[i]);
    }
    if (any_infinite) {
        for (double& v : w) v = std::isinf(v) ? 1.0 : 0.0;
    } else if (largest < kUnderflow) {
        // Shift to the log domain; normalization removes the common factor.
        std::vector<double> logs(n);
        double top = -std::numeric_limits<double>::infinity();
        bool usable = true;
        for (std::size_t i = 0; i < n && usable; ++i) {
            auto lw = log_neg_kappa_prime(kernel, t[i]);
            if (!lw) {
                usable = false;
                break;
            }
            logs[i] = *lw;
            top = std::max(top, logs[i]);
        }
        if (!usable || !std::isfinite(top)) throw StallError("all mean-shift weights are zero");
        for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logs[i] - top);
    }
    CompensatedSum total;
    for (double v : w) total.add(v);
    double sum = total.value();
    if (!(sum > 0.0)) throw StallError("all mean-shift weights are zero");
    for (double& v : w) v /= sum;
    return w;
}

std::vector<double> weighted_centroid(const Dataset& data, std::span<const double> weights) {
    std::vector<double> out(data.dim(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        double wi = weights[i];
        if (wi == 0.0) continue;
        auto p = data.point(i);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += wi * p[j];
    }
    // Keep rounding from pushing a coordinate outside the hull's bounding box.
    auto lo = data.coordinate_min();
    auto hi = data.coordinate_max();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::clamp(out[j], lo[j], hi[j]);
    return out;
}

std::vector<double> mean_shift_step(const KdeInstance& inst, std::span<const double> x) {
    if (!inst.kernel().differentiable()) throw UnsupportedOperation("mean-shift needs a differentiable kernel");
    auto t = inst.scaled_distances(x);
    auto w = centroid_weights(inst.kernel(), t);
    return weighted_centroid(inst.data(), w);
}

ModeResult mean_shift(const KdeInstance& inst, std::span<const double> x0, const MeanShiftOptions& options) {
    if (options.max_iters < 1) throw DomainError("max_iters must be >= 1");
    if (!(options.tol >= 0.0)) throw DomainError("tol must be >= 0");
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> trajectory;
    if (options.record_trajectory) trajectory.push_back(inst.evaluate(x));
    int iterations = 0;
    bool stalled = false;
    for (; iterations < options.max_iters;) {
        std::vector<double> next;
        try {
            next = mean_shift_step(inst, x);
        } catch (const StallError&) {
            stalled = true;
            break;
        }
        ++iterations;
        double step = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) step += (next[j] - x[j]) * (next[j] - x[j]);
        double scale = 1.0 + norm(x);
        x = std::move(next);
        if (options.record_trajectory) trajectory.push_back(inst.evaluate(x));
        if (std::sqrt(step) <= options.tol * scale) break;
    }
    ModeResult r = make_mode_result(inst, std::move(x), ModeMethod::MeanShift, iterations);
    r.stalled = stalled;
    if (options.record_trajectory) r.trajectory_values = std::move(trajectory);
    return r;
}

std::vector<double> restart_point(const Dataset& data, std::size_t index, std::uint64_t seed) {
    std::mt19937_64 engine(derive_seed(seed, SeedTag::Restart, index));
    std::size_t n = data.size();
    std::vector<double> weights(n, 0.0);
    if (index % 2 == 0 || n == 1) {
        std::exponential_distribution<double> expo(1.0);
        double total = 0.0;
        for (double& w : weights) {
            w = expo(engine);
            total += w;
        }
        for (double& w : weights) w /= total;
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::size_t a = pick(engine);
        std::size_t b = pick(engine);
        while (b == a) b = pick(engine);
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
        weights[a] = u;
        weights[b] = 1.0 - u;
    }
    return weighted_centroid(data, weights);
}

ModeResult multi_restart(const KdeInstance& inst, int restarts, const MeanShiftOptions& options, std::uint64_t seed) {
    if (restarts < 1) throw DomainError("restarts must be >= 1");
    std::vector<ModeResult> runs(static_cast<std::size_t>(restarts));
    parallel_for(runs.size(), [&](std::size_t i) {
        auto start = restart_point(inst.data(), i, seed);
        runs[i] = mean_shift(inst, start, options);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].value > runs[best].value) best = i;
    }
    ModeResult r = std::move(runs[best]);
    r.seed = seed;
    return r;
}

}  // namespace kdemode
