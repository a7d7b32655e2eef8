#include "kdemode/sketch.hpp"

#include "kdemode/error.hpp"
#include "kdemode/parallel.hpp"
#include "kdemode/rng.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace kdemode {

namespace {

constexpr std::array<char, 4> kMagic = {'K', 'J', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
    using U = std::make_unsigned_t<T>;
    U bits = static_cast<U>(value);
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffU);
    out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigError("sketch file is truncated");
    std::make_unsigned_t<T> bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
    return static_cast<T>(bits);
}

}  // namespace

JlFamily parse_family(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "rademacher" || s == "sign") return JlFamily::Rademacher;
    if (s == "gaussian") return JlFamily::GaussianEntries;
    throw ConfigError("unknown JL family '" + std::string(text) + "' (expected rademacher or gaussian)");
}

std::string_view family_name(JlFamily family) {
    return family == JlFamily::Rademacher ? "rademacher" : "gaussian";
}

double internal_gamma(double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
    return std::min(gamma, 1.0) / 3.0;
}

double designed_scale(double gamma) { return 1.0 / (1.0 - internal_gamma(gamma)); }

std::size_t target_dim(std::size_t n, double gamma, double delta, double c_jl) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(delta > 0.0) || !(delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    if (!(c_jl > 0.0)) throw DomainError("c_jl must be positive");
    double raw = c_jl * std::log((static_cast<double>(n) + 1.0) / delta) / std::min(1.0, gamma * gamma);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw)));
}

std::size_t designed_rows(std::size_t n, double gamma, double delta, double c_jl) {
    return target_dim(n, internal_gamma(gamma), delta, c_jl);
}

JlMatrix::JlMatrix(std::size_t w, std::size_t d, std::vector<double> entries, JlFamily family, double gamma_target,
                   std::uint64_t seed)
    : w_(w), d_(d), entries_(std::move(entries)), family_(family), gamma_target_(gamma_target), seed_(seed) {
    if (w_ == 0 || d_ == 0) throw DomainError("JL matrix needs w >= 1 and d >= 1");
    if (entries_.size() != w_ * d_) throw DomainError("JL matrix entry count does not match w x d");
}

JlMatrix JlMatrix::draw(std::size_t d, std::size_t w, JlFamily family, double gamma_target, std::uint64_t seed) {
    if (w == 0 || d == 0) throw DomainError("JL matrix needs w >= 1 and d >= 1");
    double scale = std::sqrt(designed_scale(gamma_target) / static_cast<double>(w));
    std::vector<double> entries(w * d);
    std::mt19937_64 engine(derive_seed(seed, {static_cast<std::uint64_t>(family), w, d}));
    if (family == JlFamily::Rademacher) {
        std::uint64_t bits = 0;
        int left = 0;
        for (double& e : entries) {
            if (left == 0) {
                bits = engine();
                left = 64;
            }
            e = (bits & 1U) ? scale : -scale;
            bits >>= 1;
            --left;
        }
    } else {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& e : entries) e = scale * normal(engine);
    }
    return JlMatrix(w, d, std::move(entries), family, gamma_target, seed);
}

JlMatrix JlMatrix::identity(std::size_t d) {
    std::vector<double> entries(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) entries[i * d + i] = 1.0;
    return JlMatrix(d, d, std::move(entries), JlFamily::GaussianEntries, 0.0, 0);
}

JlMatrix JlMatrix::from_entries(std::size_t w, std::size_t d, std::vector<double> entries, JlFamily family,
                                double gamma_target, std::uint64_t seed) {
    return JlMatrix(w, d, std::move(entries), family, gamma_target, seed);
}

std::vector<double> JlMatrix::apply(std::span<const double> v) const {
    if (v.size() != d_) throw DomainError("vector dimension does not match JL matrix columns");
    std::vector<double> out(w_);
    for (std::size_t r = 0; r < w_; ++r) {
        const double* row_ptr = entries_.data() + r * d_;
        double s = 0.0;
        for (std::size_t c = 0; c < d_; ++c) s += row_ptr[c] * v[c];
        out[r] = s;
    }
    return out;
}

SketchPair project(const JlMatrix& pi, const Dataset& data) {
    if (data.dim() != pi.cols()) {
        throw DomainError("dataset dimension " + std::to_string(data.dim()) + " does not match JL matrix columns " +
                          std::to_string(pi.cols()));
    }
    std::size_t w = pi.rows();
    std::vector<double> flat(data.size() * w);
    parallel_for(data.size(), [&](std::size_t i) {
        std::vector<double> image = pi.apply(data.point(i));
        std::copy(image.begin(), image.end(), flat.begin() + static_cast<std::ptrdiff_t>(i * w));
    });
    return SketchPair{pi, Dataset(data.size(), w, std::move(flat)), data.fingerprint()};
}

bool verify_one_sided(const SketchPair& pair, const Dataset& points, double gamma) {
    if (points.dim() != pair.pi.cols() || points.size() != pair.projected.size()) {
        throw DomainError("points do not match the sketch");
    }
    constexpr double kRel = 1e-12;
    const Dataset& img = pair.projected;
    std::atomic<bool> ok{true};
    parallel_for(points.size(), [&](std::size_t i) {
        for (std::size_t j = i + 1; j < points.size() && ok.load(std::memory_order_relaxed); ++j) {
            double orig = squared_distance(points.point(i), points.point(j));
            double proj = squared_distance(img.point(i), img.point(j));
            if (proj < orig * (1.0 - kRel) || proj > (1.0 + gamma) * orig * (1.0 + kRel)) {
                ok.store(false, std::memory_order_relaxed);
            }
        }
    });
    return ok.load();
}

bool verify_one_sided(const JlMatrix& pi, const Dataset& points, double gamma) {
    return verify_one_sided(project(pi, points), points, gamma);
}

SketchPair sketch_with_retry(const Dataset& data, const SketchOptions& options) {
    if (options.max_attempts < 1) throw DomainError("max_attempts must be >= 1");
    std::size_t w = options.rows ? options.rows : designed_rows(data.size(), options.gamma, options.delta, options.c_jl);
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        JlMatrix pi = JlMatrix::draw(data.dim(), w, options.family, options.gamma,
                                     options.seed + static_cast<std::uint64_t>(attempt));
        SketchPair pair = project(pi, data);
        if (verify_one_sided(pair, data, options.gamma)) {
            pair.attempts = attempt + 1;
            pair.verified_delta = options.delta / 2.0;
            pair.residual_delta = options.delta / 2.0;
            return pair;
        }
    }
    throw SketchFailure("no sketch satisfied the one-sided bound after " + std::to_string(options.max_attempts) +
                            " attempts (w = " + std::to_string(w) + ")",
                        options.max_attempts);
}

void write_sketch(std::ostream& out, const JlMatrix& pi) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint64_t>(out, pi.rows());
    put_le<std::uint64_t>(out, pi.cols());
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(pi.family()));
    put_le<std::uint64_t>(out, pi.seed());
    for (double v : pi.entries()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw ConfigError("failed writing sketch");
}

JlMatrix read_sketch(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ConfigError("not a KJLS sketch file");
    auto version = get_le<std::uint32_t>(in);
    if (version != kVersion) throw ConfigError("unsupported sketch version " + std::to_string(version));
    auto w = get_le<std::uint64_t>(in);
    auto d = get_le<std::uint64_t>(in);
    auto family_raw = get_le<std::uint8_t>(in);
    if (family_raw > 1) throw ConfigError("unknown JL family code " + std::to_string(family_raw));
    auto seed = get_le<std::uint64_t>(in);
    if (w == 0 || d == 0 || w > (std::uint64_t{1} << 40) / d) throw ConfigError("implausible sketch dimensions");
    std::vector<double> entries(w * d);
    for (double& v : entries) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    return JlMatrix::from_entries(w, d, std::move(entries), static_cast<JlFamily>(family_raw), 0.0, seed);
}

}  // namespace kdemode
