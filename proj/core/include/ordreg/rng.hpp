#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ordreg::rng {

// All randomness in this library flows through the generator below rather
// than <random>, because the standard distributions are not specified
// bit-for-bit across implementations and seeded results must replay
// identically on every platform.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 step: advances `state` and returns one output word.
inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += kGolden;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One-shot finaliser over a single word.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    std::uint64_t s = x;
    return splitmix64(s);
}

// Deterministic stream splitting: child seed `id` of a master seed.
// Distinct ids give distinct seeds (mix64 is a bijection).
inline constexpr std::uint64_t substream_seed(std::uint64_t master,
                                              std::uint64_t id) noexcept {
    return mix64(master ^ mix64(id + 1));
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

// xoshiro256** engine, state seeded by four splitmix64 outputs.
class Engine {
public:
    explicit constexpr Engine(std::uint64_t seed) noexcept : state_{} {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    std::array<std::uint64_t, 4> state_;
};

// Engine plus the variate recipes used throughout. Normal draws come in
// Box-Muller pairs; the second of each pair is cached, so interleaving
// normal() with other variates is deterministic but consumes the cache.
class Generator {
public:
    explicit Generator(std::uint64_t seed) noexcept
        : engine_(seed), cached_(0.0), has_cached_(false) {}

    std::uint64_t next_u64() { return engine_.next(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on (u1, u2]; pairs are cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1]: keeps log finite
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    // Standard Cauchy via inverse CDF.
    double cauchy() { return std::tan(M_PI * (uniform01() - 0.5)); }

    // Uniform integer in [0, bound) without modulo bias
    // (Lemire multiply-shift; bound = 0 is the caller's bug).
    std::uint64_t below(std::uint64_t bound) {
        const auto wide = static_cast<unsigned __int128>(engine_.next());
        return static_cast<std::uint64_t>((wide * bound) >> 64);
    }

private:
    Engine engine_;
    double cached_;
    bool has_cached_;
};

} // namespace ordreg::rng
