#pragma once

#include "kdemode/kde.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdemode {

enum class JlFamily : std::uint8_t {
    GaussianEntries = 0,
    Rademacher = 1,
};

JlFamily parse_family(std::string_view text);
std::string_view family_name(JlFamily family);

/// Internal two-sided parameter gamma' = min(gamma, 1) / 3 used to realise the one-sided guarantee.
double internal_gamma(double gamma);

/// Expected ||Pi v||^2 / ||v||^2 of a drawn matrix: 1 / (1 - gamma').
double designed_scale(double gamma);

/// ceil(c_jl * ln((n + 1) / delta) / min(1, gamma^2)), at least 1.
std::size_t target_dim(std::size_t n, double gamma, double delta, double c_jl = 8.0);

/// Rows needed for a matrix drawn at gamma' to meet the one-sided bound for gamma:
/// target_dim evaluated at internal_gamma(gamma).
std::size_t designed_rows(std::size_t n, double gamma, double delta, double c_jl = 8.0);

/// Dense w x d Johnson-Lindenstrauss matrix, row-major.
///
/// Entries are a standard two-sided JL draw (variance 1/w) at internal parameter gamma' = gamma/3,
/// scaled by 1/sqrt(1 - gamma'). Squared distances then concentrate in [1, (1+gamma')/(1-gamma')],
/// which sits inside [1, 1 + gamma] for gamma <= 1.
class JlMatrix {
public:
    /// Deterministic in (seed, family, w, d).
    static JlMatrix draw(std::size_t d, std::size_t w, JlFamily family, double gamma_target, std::uint64_t seed);

    /// Test hook: the d x d identity.
    static JlMatrix identity(std::size_t d);

    /// Explicit entries (tests, deserialization).
    static JlMatrix from_entries(std::size_t w, std::size_t d, std::vector<double> entries,
                                 JlFamily family = JlFamily::GaussianEntries, double gamma_target = 0.0,
                                 std::uint64_t seed = 0);

    std::size_t rows() const noexcept { return w_; }
    std::size_t cols() const noexcept { return d_; }
    JlFamily family() const noexcept { return family_; }
    /// 0 when unknown (identity hook, matrices read back from disk).
    double gamma_target() const noexcept { return gamma_target_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const double> entries() const noexcept { return entries_; }
    std::span<const double> row(std::size_t r) const noexcept { return {entries_.data() + r * d_, d_}; }

    std::vector<double> apply(std::span<const double> v) const;

    friend bool operator==(const JlMatrix&, const JlMatrix&) = default;

private:
    JlMatrix(std::size_t w, std::size_t d, std::vector<double> entries, JlFamily family, double gamma_target,
             std::uint64_t seed);

    std::size_t w_;
    std::size_t d_;
    std::vector<double> entries_;
    JlFamily family_;
    double gamma_target_;
    std::uint64_t seed_;
};

/// A matrix together with the projected dataset Pi M.
struct SketchPair {
    JlMatrix pi;
    Dataset projected;
    std::uint64_t source_fingerprint = 0;
    int attempts = 1;
    /// Failure budget split: verified M-pairs vs. pairs involving the unknown mode.
    double verified_delta = 0.0;
    double residual_delta = 0.0;
};

SketchPair project(const JlMatrix& pi, const Dataset& data);

/// ||vi - vj||^2 <= ||Pi vi - Pi vj||^2 <= (1 + gamma) ||vi - vj||^2 for all pairs
/// (relative slack 1e-12 on both sides).
bool verify_one_sided(const JlMatrix& pi, const Dataset& points, double gamma);

/// Same check on an existing pair.
bool verify_one_sided(const SketchPair& pair, const Dataset& points, double gamma);

struct SketchOptions {
    double gamma = 0.5;
    double delta = 0.1;
    double c_jl = 8.0;
    JlFamily family = JlFamily::Rademacher;
    std::uint64_t seed = 0;
    int max_attempts = 10;
    /// Explicit row count; 0 means designed_rows(n, gamma, delta, c_jl).
    std::size_t rows = 0;
};

/// Draws matrices (seed, seed+1, ...) until verify_one_sided passes on the dataset points.
/// Throws SketchFailure after max_attempts.
SketchPair sketch_with_retry(const Dataset& data, const SketchOptions& options);

/// Binary layout, little-endian: "KJLS", u32 version (1), u64 w, u64 d, u8 family, u64 seed,
/// then w*d f64 row-major.
void write_sketch(std::ostream& out, const JlMatrix& pi);
JlMatrix read_sketch(std::istream& in);

}  // namespace kdemode
