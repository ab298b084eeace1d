#pragma once

#include <cstdint>

namespace fixedk {

// 64-bit finalizer mix (splitmix64). Bijective, passes BigCrush when driven by
// a Weyl counter, which is exactly how CounterRng uses it below.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;  // 2^64 / phi

// Deterministic stream derivation: seeds for sub-streams (trials, grid points,
// paired samples) are mix64(master + golden * (index + 1)). Nested calls give
// independent streams for nested loops; the mapping is pure so results never
// depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + kGolden * (index + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

// Counter-based generator: output i is mix64(seed + golden * i). Stateless up
// to the counter, so any draw sequence is reproducible from (seed, counter).
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

}  // namespace fixedk
