#pragma once

#include <cstdint>

namespace sfiles {

/// Stateless 64-bit mix used to derive per-record seeds from a global seed.
/// Fixed for all time: outputs are part of the reproducibility contract.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based deterministic generator. Each (key, counter) pair maps to an
/// independent 64-bit value, so draws do not depend on call order elsewhere.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed, stream)) {}

    std::uint64_t next() { return mix64(key_, counter_++); }

    /// Uniform value in [0, bound). bound must be >= 1.
    std::uint64_t below(std::uint64_t bound) {
        // Multiply-shift range reduction; bias is below 2^-64 per draw.
        unsigned __int128 wide = static_cast<unsigned __int128>(next()) * bound;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace sfiles
