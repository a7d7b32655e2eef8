#include "kdemode/kde.hpp"

#include "kdemode/error.hpp"
#include "kdemode/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace kdemode {

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> row_major)
    : n_(n), d_(d), values_(std::move(row_major)) {
    if (n_ == 0 || d_ == 0) throw DomainError("dataset needs n >= 1 points of dimension d >= 1");
    if (values_.size() != n_ * d_) {
        throw DomainError("dataset storage holds " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(n_ * d_));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("dataset contains a non-finite coordinate");
    }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DomainError("dataset needs at least one point");
    std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& row : rows) {
        if (row.size() != d) throw DomainError("all points must share one dimension");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Dataset(rows.size(), d, std::move(flat));
}

std::uint64_t Dataset::fingerprint() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t word) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(n_);
    feed(d_);
    for (double v : values_) feed(std::bit_cast<std::uint64_t>(v));
    return h;
}

std::vector<double> Dataset::coordinate_min() const {
    std::vector<double> out(point(0).begin(), point(0).end());
    for (std::size_t i = 1; i < n_; ++i) {
        auto p = point(i);
        for (std::size_t j = 0; j < d_; ++j) out[j] = std::min(out[j], p[j]);
    }
    return out;
}

std::vector<double> Dataset::coordinate_max() const {
    std::vector<double> out(point(0).begin(), point(0).end());
    for (std::size_t i = 1; i < n_; ++i) {
        auto p = point(i);
        for (std::size_t j = 0; j < d_; ++j) out[j] = std::max(out[j], p[j]);
    }
    return out;
}

Dataset read_csv(std::istream& in) {
    std::vector<double> flat;
    std::size_t d = 0;
    std::size_t n = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t fields = 0;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
                flat.push_back(v);
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
            }
            ++fields;
        }
        if (n == 0) {
            d = fields;
        } else if (fields != d) {
            throw ConfigError("line " + std::to_string(line_no) + ": ragged row with " + std::to_string(fields) +
                              " fields, expected " + std::to_string(d));
        }
        ++n;
    }
    if (n == 0) throw ConfigError("dataset file is empty");
    try {
        return Dataset(n, d, std::move(flat));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    auto old = out.precision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto p = data.point(i);
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out << ',';
            out << p[j];
        }
        out << '\n';
    }
    out.precision(old);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

void KdeInstance::check_dim(std::span<const double> x) const {
    if (x.size() != data_.dim()) {
        throw DomainError("query has dimension " + std::to_string(x.size()) + ", instance has " +
                          std::to_string(data_.dim()));
    }
}

double KdeInstance::evaluate(std::span<const double> x) const {
    check_dim(x);
    CompensatedSum sum;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        sum.add(kappa(kernel_, kernel_.scaled_argument(squared_distance(x, data_.point(i)))));
    }
    return sum.value();
}

std::vector<double> KdeInstance::evaluate_batch(const std::vector<std::vector<double>>& xs) const {
    for (const auto& x : xs) check_dim(x);
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = evaluate(xs[i]); }, 16);
    return out;
}

std::vector<double> KdeInstance::scaled_distances(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> t(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        t[i] = kernel_.scaled_argument(squared_distance(x, data_.point(i)));
    }
    return t;
}

}  // namespace kdemode
