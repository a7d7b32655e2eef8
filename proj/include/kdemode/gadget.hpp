#pragma once

#include "kdemode/kde.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace kdemode {

/// Simple undirected graph in which every vertex has the same degree.
class RegularGraph {
public:
    using Edge = std::pair<std::size_t, std::size_t>;

    /// Throws DomainError on self-loops, duplicate edges, out-of-range endpoints or unequal degrees.
    RegularGraph(std::size_t vertex_count, std::vector<Edge> edges);

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t degree() const noexcept { return degree_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool adjacent(std::size_t u, std::size_t v) const { return adjacency_[u * n_ + v] != 0; }

    static RegularGraph complete(std::size_t n);
    static RegularGraph complete_bipartite(std::size_t a);
    static RegularGraph petersen();
    /// Pairing model with rejection of loops and multi-edges.
    static RegularGraph random_regular(std::size_t n, std::size_t degree, std::uint64_t seed);

private:
    std::size_t n_;
    std::size_t degree_ = 0;
    std::vector<Edge> edges_;
    std::vector<char> adjacency_;
};

/// "u v" per line, 0-indexed; blank lines and '#' comments ignored.
RegularGraph read_edge_list(std::istream& in);

/// Vertex-edge incidence rows: point v has a 1 in coordinate e iff v is an endpoint of e.
Dataset incidence_embed(const RegularGraph& g);

/// Box-kernel instance whose mode value separates graphs with and without a k-clique.
struct GadgetInstance {
    KdeInstance instance;  // box kernel, sigma = 1, points = incidence rows / sqrt(A)
    double scale_A = 0.0;  // (1 - 1/k)(Delta - 1)
    std::size_t k = 0;
};

/// Throws DomainError for k < 2 and DegenerateScale for Delta < 2.
GadgetInstance build_gadget(const RegularGraph& g, std::size_t k);

struct Ball {
    std::vector<double> center;
    double radius_sq = -1.0;  // negative: empty ball
};

/// Exact smallest enclosing ball (move-to-front Welzl, circumspheres solved in the support
/// set's affine hull).
Ball min_enclosing_ball(const std::vector<std::span<const double>>& points);

/// Largest number of gadget centers inside one ball of radius 1 (the box-kernel mode value).
/// Exact subset search; throws BudgetExceeded for more than 25 centers.
std::size_t max_covered(const GadgetInstance& gadget);

/// Backtracking k-clique search.
bool has_clique(const RegularGraph& g, std::size_t k);

struct GadgetReport {
    double scale_A = 0.0;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t max_covered = 0;
    bool has_clique = false;
    bool consistent = false;  // (max_covered >= k) == has_clique
};

GadgetReport analyze_gadget(const RegularGraph& g, std::size_t k);

/// True iff the gadget's mode value decides k-clique correctly for g.
bool verify_gadget(const RegularGraph& g, std::size_t k);

}  // namespace kdemode
