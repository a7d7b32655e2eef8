#include "kdemode/lowdim.hpp"

#include "kdemode/error.hpp"
#include "kdemode/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kdemode {

double delta_for_eps(const KernelSpec& kernel, std::size_t n, double eps) {
    if (n == 0) throw DomainError("n must be positive");
    if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    double xi = critical_radius(kernel, 1.0 / static_cast<double>(n));
    double delta = 0.0;
    if (kernel.kind == KernelKind::Cauchy) {
        // 1/(1+c) - 1/(1+c+delta) <= eps/(1+c) holds for delta <= eps (1+c) / (1-eps).
        delta = eps;
    } else if (auto p = builtin_rds(kernel)) {
        double xi_bar = std::max(1.0, xi);
        delta = std::min(std::pow(p->d2 * eps / p->c2, 1.0 / p->d2), (eps / p->c2) * std::pow(2.0 * xi_bar, 1.0 - p->d2));
    } else {
        throw UnsupportedOperation("no grid resolution rule for the " + std::string(kind_name(kernel.kind)) + " kernel");
    }
    constexpr int kChecks = 1000;
    for (int i = 0; i < kChecks; ++i) {
        double c = xi * static_cast<double>(i) / (kChecks - 1);
        double kc = kappa(kernel, c);
        if (kc - kappa(kernel, c + delta) > eps * kc + 1e-12) {
            throw Error("grid resolution " + std::to_string(delta) + " fails the decrease condition at c = " +
                        std::to_string(c));
        }
    }
    return delta;
}

CoverSpec CoverSpec::make(std::size_t dim, double xi, double delta) {
    if (dim == 0) throw DomainError("cover dimension must be >= 1");
    if (!(xi >= 0.0)) throw DomainError("xi must be >= 0");
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    CoverSpec s;
    s.dim = dim;
    s.xi = xi;
    s.delta = delta;
    s.step = std::sqrt(delta / static_cast<double>(dim));
    // Per-axis offsets reach the ball radius sqrt(xi).
    double reach = std::sqrt(static_cast<double>(dim) * xi / delta);
    s.range = static_cast<std::int64_t>(std::ceil(reach * (1.0 - 1e-12)));
    return s;
}

double CoverSpec::points_per_center() const {
    return std::pow(2.0 * static_cast<double>(range) + 1.0, static_cast<double>(dim));
}

CoverStream::CoverStream(const Dataset& centers, CoverSpec spec) : centers_(&centers), spec_(spec) {
    if (centers.dim() != spec_.dim) throw DomainError("cover dimension does not match centers");
    k_.assign(spec_.dim, -spec_.range);
}

bool CoverStream::next(std::vector<double>& out) {
    if (exhausted_) return false;
    auto m = centers_->point(center_);
    out.resize(spec_.dim);
    for (std::size_t i = 0; i < spec_.dim; ++i) out[i] = m[i] + static_cast<double>(k_[i]) * spec_.step;
    // Advance the odometer, last axis fastest.
    std::size_t axis = spec_.dim;
    while (axis > 0) {
        --axis;
        if (k_[axis] < spec_.range) {
            ++k_[axis];
            return true;
        }
        k_[axis] = -spec_.range;
    }
    if (++center_ == centers_->size()) exhausted_ = true;
    return true;
}

void CoverStream::for_center(std::size_t center, const std::function<void(std::span<const double>)>& visit) const {
    auto m = centers_->point(center);
    std::vector<std::int64_t> k(spec_.dim, -spec_.range);
    std::vector<double> p(spec_.dim);
    while (true) {
        for (std::size_t i = 0; i < spec_.dim; ++i) p[i] = m[i] + static_cast<double>(k[i]) * spec_.step;
        visit(p);
        std::size_t axis = spec_.dim;
        bool advanced = false;
        while (axis > 0) {
            --axis;
            if (k[axis] < spec_.range) {
                ++k[axis];
                advanced = true;
                break;
            }
            k[axis] = -spec_.range;
        }
        if (!advanced) return;
    }
}

CoverStream cover_points(const KdeInstance& inst, double delta, double budget) {
    const KernelSpec& k = inst.kernel();
    double sigma_sq = k.bandwidth * k.bandwidth;
    double xi = critical_radius(k, 1.0 / static_cast<double>(inst.size()));
    CoverStream stream(inst.data(), CoverSpec::make(inst.dim(), sigma_sq * xi, sigma_sq * delta));
    if (stream.total() > budget) {
        throw BudgetExceeded("cover has " + std::to_string(stream.total()) + " points, budget is " +
                                 std::to_string(budget),
                             stream.total());
    }
    return stream;
}

ModeResult brute_force_mode(const KdeInstance& inst, double eps, double budget) {
    double delta = delta_for_eps(inst.kernel(), inst.size(), eps);
    CoverStream stream = cover_points(inst, delta, budget);

    struct Best {
        double value = -1.0;
        std::vector<double> point;
    };
    std::vector<Best> per_center(inst.size());
    parallel_for(inst.size(), [&](std::size_t c) {
        Best& best = per_center[c];
        stream.for_center(c, [&](std::span<const double> p) {
            double v = inst.evaluate(p);
            if (v > best.value) {
                best.value = v;
                best.point.assign(p.begin(), p.end());
            }
        });
    });
    std::size_t winner = 0;
    for (std::size_t c = 1; c < per_center.size(); ++c) {
        if (per_center[c].value > per_center[winner].value) winner = c;
    }
    return make_mode_result(inst, std::move(per_center[winner].point), ModeMethod::BruteForce);
}

std::vector<double> AffineFrame::lift(std::span<const double> coords) const {
    if (coords.size() != basis.size()) throw DomainError("frame coordinates have the wrong dimension");
    std::vector<double> out = origin;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coords[j] * basis[j][i];
    }
    return out;
}

AffineFrame affine_frame(const Dataset& data, double rel_tol) {
    const std::size_t D = data.dim();
    std::vector<double> origin(data.point(0).begin(), data.point(0).end());
    double scale = 0.0;
    for (std::size_t i = 1; i < data.size(); ++i) scale = std::max(scale, std::sqrt(squared_distance(data.point(i), origin)));

    std::vector<std::vector<double>> basis;
    std::vector<double> v(D);
    for (std::size_t i = 1; i < data.size() && basis.size() < D; ++i) {
        auto p = data.point(i);
        for (std::size_t k = 0; k < D; ++k) v[k] = p[k] - origin[k];
        // Two Gram-Schmidt passes.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t k = 0; k < D; ++k) dot += v[k] * b[k];
                for (std::size_t k = 0; k < D; ++k) v[k] -= dot * b[k];
            }
        }
        double len = 0.0;
        for (double x : v) len += x * x;
        len = std::sqrt(len);
        if (len > rel_tol * scale && len > 0.0) {
            for (double& x : v) x /= len;
            basis.push_back(v);
        }
    }
    if (basis.empty()) {
        std::vector<double> e(D, 0.0);
        e[0] = 1.0;
        basis.push_back(std::move(e));
    }
    const std::size_t k = basis.size();
    std::vector<double> coords(data.size() * k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto p = data.point(i);
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t c = 0; c < D; ++c) dot += (p[c] - origin[c]) * basis[j][c];
            coords[i * k + j] = dot;
        }
    }
    return AffineFrame{std::move(origin), std::move(basis), Dataset(data.size(), k, std::move(coords))};
}

ModeResult brute_force_mode_reduced(const KdeInstance& inst, double eps, double budget) {
    AffineFrame frame = affine_frame(inst.data());
    KdeInstance reduced(frame.coordinates, inst.kernel());
    ModeResult low = brute_force_mode(reduced, eps, budget);
    return make_mode_result(inst, frame.lift(low.point), ModeMethod::BruteForce);
}

}  // namespace kdemode
