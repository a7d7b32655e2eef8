#pragma once

#include "kdemode/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace kdemode {

/// n points in d dimensions, stored row-major. Immutable once built; n >= 1, d >= 1,
/// every coordinate finite.
class Dataset {
public:
    Dataset(std::size_t n, std::size_t d, std::vector<double> row_major);

    static Dataset from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    std::span<const double> point(std::size_t i) const noexcept { return {values_.data() + i * d_, d_}; }
    std::span<const double> values() const noexcept { return values_; }

    /// FNV-1a over (n, d, coordinate bits).
    std::uint64_t fingerprint() const noexcept;

    /// Per-dimension [min, max] over all points.
    std::vector<double> coordinate_min() const;
    std::vector<double> coordinate_max() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t n_;
    std::size_t d_;
    std::vector<double> values_;
};

/// CSV, one point per row, no header. Ragged rows, empty input and non-finite values are rejected.
Dataset read_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Dataset& data);

/// Explicit sum of squared differences (no ||a||^2 + ||b||^2 - 2ab expansion).
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Unnormalized KDE: sum over centers m of kappa(||x - m||^2 / sigma^2).
class KdeInstance {
public:
    KdeInstance(Dataset data, KernelSpec kernel) : data_(std::move(data)), kernel_(kernel) {}

    const Dataset& data() const noexcept { return data_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t dim() const noexcept { return data_.dim(); }

    /// Compensated summation in input order. Result lies in [0, n].
    double evaluate(std::span<const double> x) const;

    /// Elementwise evaluate, order preserved; runs across threads with bit-identical results.
    std::vector<double> evaluate_batch(const std::vector<std::vector<double>>& xs) const;

    /// Bandwidth-scaled t_m = ||x - m||^2 / sigma^2 for every center.
    std::vector<double> scaled_distances(std::span<const double> x) const;

private:
    void check_dim(std::span<const double> x) const;

    Dataset data_;
    KernelSpec kernel_;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double v) noexcept {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace kdemode
