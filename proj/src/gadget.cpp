#include "kdemode/gadget.hpp"

#include "kdemode/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace kdemode {

namespace {

constexpr double kRadiusTol = 1e-9;
constexpr std::size_t kMaxCenters = 25;

// Circumscribed sphere of `support` with its center in their affine hull. Affinely dependent
// members are skipped; they lie on the same sphere whenever the support set is valid.
Ball circumsphere(const std::vector<std::span<const double>>& support) {
    Ball b;
    if (support.empty()) return b;
    const std::size_t D = support.front().size();
    auto p0 = support.front();
    b.center.assign(p0.begin(), p0.end());
    b.radius_sq = 0.0;
    if (support.size() == 1) return b;

    std::vector<std::vector<double>> q;          // orthonormal basis
    std::vector<std::vector<double>> r_rows;     // coefficients of each kept v_i in q
    std::vector<double> rhs;                     // ||v_i||^2 / 2
    double scale = 0.0;
    for (std::size_t i = 1; i < support.size(); ++i) scale = std::max(scale, squared_distance(support[i], p0));
    for (std::size_t i = 1; i < support.size(); ++i) {
        std::vector<double> v(D);
        for (std::size_t k = 0; k < D; ++k) v[k] = support[i][k] - p0[k];
        double vv = 0.0;
        for (double x : v) vv += x * x;
        std::vector<double> coeff(q.size() + 1, 0.0);
        std::vector<double> resid = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < q.size(); ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < D; ++k) dot += resid[k] * q[j][k];
                coeff[j] += dot;
                for (std::size_t k = 0; k < D; ++k) resid[k] -= dot * q[j][k];
            }
        }
        double len = 0.0;
        for (double x : resid) len += x * x;
        len = std::sqrt(len);
        if (len <= 1e-10 * std::sqrt(scale)) continue;
        for (double& x : resid) x /= len;
        coeff.back() = len;
        q.push_back(std::move(resid));
        r_rows.push_back(std::move(coeff));
        rhs.push_back(0.5 * vv);
    }
    // Lower-triangular solve: sum_j r_rows[i][j] y_j = rhs[i].
    std::vector<double> y(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        double s = rhs[i];
        for (std::size_t j = 0; j < i; ++j) s -= r_rows[i][j] * y[j];
        y[i] = s / r_rows[i][i];
    }
    double rsq = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        rsq += y[j] * y[j];
        for (std::size_t k = 0; k < D; ++k) b.center[k] += y[j] * q[j][k];
    }
    b.radius_sq = rsq;
    return b;
}

bool inside(const Ball& b, std::span<const double> p) {
    if (b.radius_sq < 0.0) return false;
    return squared_distance(p, b.center) <= b.radius_sq * (1.0 + 1e-10) + 1e-12;
}

Ball move_to_front(std::vector<std::span<const double>>& pts, std::size_t end,
                   std::vector<std::span<const double>>& boundary) {
    Ball ball = circumsphere(boundary);
    for (std::size_t i = 0; i < end; ++i) {
        if (inside(ball, pts[i])) continue;
        boundary.push_back(pts[i]);
        ball = move_to_front(pts, i, boundary);
        boundary.pop_back();
        std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i), pts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    return ball;
}

bool extend_clique(const RegularGraph& g, std::vector<std::size_t>& chosen, std::size_t next, std::size_t k) {
    if (chosen.size() == k) return true;
    for (std::size_t v = next; v < g.vertex_count(); ++v) {
        if (g.vertex_count() - v < k - chosen.size()) return false;
        bool ok = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t u) { return g.adjacent(u, v); });
        if (!ok) continue;
        chosen.push_back(v);
        if (extend_clique(g, chosen, v + 1, k)) return true;
        chosen.pop_back();
    }
    return false;
}

}  // namespace

RegularGraph::RegularGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : n_(vertex_count), edges_(std::move(edges)), adjacency_(vertex_count * vertex_count, 0) {
    if (n_ == 0) throw DomainError("graph needs at least one vertex");
    std::vector<std::size_t> deg(n_, 0);
    for (auto& [u, v] : edges_) {
        if (u >= n_ || v >= n_) throw DomainError("edge endpoint out of range");
        if (u == v) throw DomainError("self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
        if (adjacency_[u * n_ + v]) {
            throw DomainError("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
        }
        adjacency_[u * n_ + v] = adjacency_[v * n_ + u] = 1;
        ++deg[u];
        ++deg[v];
    }
    degree_ = deg.front();
    for (std::size_t v = 0; v < n_; ++v) {
        if (deg[v] != degree_) {
            throw DomainError("graph is not regular: vertex " + std::to_string(v) + " has degree " +
                              std::to_string(deg[v]) + ", vertex 0 has " + std::to_string(degree_));
        }
    }
}

RegularGraph RegularGraph::complete(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return RegularGraph(n, std::move(e));
}

RegularGraph RegularGraph::complete_bipartite(std::size_t a) {
    std::vector<Edge> e;
    for (std::size_t u = 0; u < a; ++u)
        for (std::size_t v = 0; v < a; ++v) e.emplace_back(u, a + v);
    return RegularGraph(2 * a, std::move(e));
}

RegularGraph RegularGraph::petersen() {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);
        e.emplace_back(5 + i, 5 + (i + 2) % 5);
        e.emplace_back(i, 5 + i);
    }
    return RegularGraph(10, std::move(e));
}

RegularGraph RegularGraph::random_regular(std::size_t n, std::size_t degree, std::uint64_t seed) {
    if ((n * degree) % 2 != 0 || degree >= n) throw DomainError("no simple regular graph with these parameters");
    std::mt19937_64 engine(seed);
    std::vector<std::size_t> stubs;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < degree; ++i) stubs.push_back(v);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), engine);
        std::vector<char> seen(n * n, 0);
        std::vector<Edge> edges;
        bool ok = true;
        for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
            std::size_t u = std::min(stubs[i], stubs[i + 1]);
            std::size_t v = std::max(stubs[i], stubs[i + 1]);
            if (u == v || seen[u * n + v]) {
                ok = false;
            } else {
                seen[u * n + v] = 1;
                edges.emplace_back(u, v);
            }
        }
        if (ok) return RegularGraph(n, std::move(edges));
    }
    throw Error("failed to sample a simple regular graph");
}

RegularGraph read_edge_list(std::istream& in) {
    std::vector<RegularGraph::Edge> edges;
    std::size_t max_vertex = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream row(line);
        long long u = 0, v = 0;
        if (!(row >> u)) continue;
        std::string extra;
        if (!(row >> v) || (row >> extra) || u < 0 || v < 0) {
            throw ConfigError("edge list line " + std::to_string(line_no) + ": expected 'u v'");
        }
        edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
        max_vertex = std::max({max_vertex, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
    }
    if (edges.empty()) throw ConfigError("edge list is empty");
    try {
        return RegularGraph(max_vertex + 1, std::move(edges));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

Dataset incidence_embed(const RegularGraph& g) {
    const std::size_t n = g.vertex_count();
    const std::size_t d = g.edges().size();
    if (d == 0) throw DomainError("graph has no edges");
    std::vector<double> flat(n * d, 0.0);
    for (std::size_t e = 0; e < d; ++e) {
        flat[g.edges()[e].first * d + e] = 1.0;
        flat[g.edges()[e].second * d + e] = 1.0;
    }
    return Dataset(n, d, std::move(flat));
}

GadgetInstance build_gadget(const RegularGraph& g, std::size_t k) {
    if (k < 2) throw DomainError("clique size k must be >= 2");
    if (g.degree() < 2) throw DegenerateScale("gadget scale A = (1 - 1/k)(Delta - 1) needs Delta >= 2");
    double A = (1.0 - 1.0 / static_cast<double>(k)) * (static_cast<double>(g.degree()) - 1.0);
    Dataset raw = incidence_embed(g);
    std::vector<double> scaled(raw.values().begin(), raw.values().end());
    double inv = 1.0 / std::sqrt(A);
    for (double& v : scaled) v *= inv;
    return GadgetInstance{KdeInstance(Dataset(raw.size(), raw.dim(), std::move(scaled)),
                                      KernelSpec::make(KernelKind::Box, 1.0)),
                          A, k};
}

Ball min_enclosing_ball(const std::vector<std::span<const double>>& points) {
    std::vector<std::span<const double>> pts = points;
    std::vector<std::span<const double>> boundary;
    return move_to_front(pts, pts.size(), boundary);
}

std::size_t max_covered(const GadgetInstance& gadget) {
    const Dataset& data = gadget.instance.data();
    const std::size_t n = data.size();
    if (n > kMaxCenters) {
        throw BudgetExceeded("exact subset search is limited to " + std::to_string(kMaxCenters) + " centers",
                             static_cast<double>(n));
    }
    // Two centers fit in a unit ball only if they are within distance 2.
    std::vector<char> close(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            close[i * n + j] = squared_distance(data.point(i), data.point(j)) <= 4.0 * (1.0 + kRadiusTol);

    std::vector<std::size_t> chosen;
    std::function<bool(std::size_t, std::size_t)> search = [&](std::size_t next, std::size_t size) -> bool {
        if (chosen.size() == size) {
            std::vector<std::span<const double>> pts;
            for (std::size_t c : chosen) pts.push_back(data.point(c));
            return min_enclosing_ball(pts).radius_sq <= 1.0 + kRadiusTol;
        }
        for (std::size_t v = next; v < n; ++v) {
            if (n - v < size - chosen.size()) return false;
            bool ok = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t u) { return close[u * n + v] != 0; });
            if (!ok) continue;
            chosen.push_back(v);
            if (search(v + 1, size)) return true;
            chosen.pop_back();
        }
        return false;
    };
    for (std::size_t size = n; size > 1; --size) {
        chosen.clear();
        if (search(0, size)) return size;
    }
    return 1;
}

bool has_clique(const RegularGraph& g, std::size_t k) {
    if (k == 0) return true;
    std::vector<std::size_t> chosen;
    return extend_clique(g, chosen, 0, k);
}

GadgetReport analyze_gadget(const RegularGraph& g, std::size_t k) {
    GadgetInstance gadget = build_gadget(g, k);
    GadgetReport r;
    r.scale_A = gadget.scale_A;
    r.n = gadget.instance.size();
    r.d = gadget.instance.dim();
    r.max_covered = max_covered(gadget);
    r.has_clique = has_clique(g, k);
    r.consistent = (r.max_covered >= k) == r.has_clique;
    return r;
}

bool verify_gadget(const RegularGraph& g, std::size_t k) { return analyze_gadget(g, k).consistent; }

}  // namespace kdemode
