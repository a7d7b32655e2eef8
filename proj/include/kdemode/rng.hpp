#pragma once

#include <cstdint>
#include <initializer_list>

namespace kdemode {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based child seed: the result depends only on the values, never on call order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : parts) {
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Purpose tags for derive_seed.
enum class SeedTag : std::uint64_t {
    Baseline = 1,
    Sketch = 2,
    SketchedSolve = 3,
    Restart = 4,
    Instance = 5,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedTag tag, std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
    return derive_seed(master, {static_cast<std::uint64_t>(tag), a, b});
}

}  // namespace kdemode
