#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rtstat {

/// One step of the splitmix64 generator. Used for seed mixing only; the
/// workhorse engine is std::mt19937_64, whose output sequence is pinned by
/// the standard.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a stream seed from a master seed and a stream index. Distinct
/// (master, stream) pairs map to well-separated seeds, so per-trial engines
/// never share state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

/// Deterministic random source. Wraps mt19937_64 with explicit, portable
/// conversions (no std::uniform_* distributions, whose output is
/// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log argument.
    double uniform_open() { return 1.0 - uniform(); }

    /// Unbiased uniform integer in [0, n), n >= 1. Rejection on the top bits.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t mask = mask_for(n - 1);
        for (;;) {
            const std::uint64_t v = eng_() & mask;
            if (v < n) return v;
        }
    }

    /// Unbiased uniform 128-bit integer in [0, n), n >= 1.
    unsigned __int128 below_u128(unsigned __int128 n) {
        if (n <= 1) return 0;
        const unsigned __int128 top = n - 1;
        const std::uint64_t hi = static_cast<std::uint64_t>(top >> 64);
        if (hi == 0) return below(static_cast<std::uint64_t>(top) + 1);
        const std::uint64_t hi_mask = mask_for(hi);
        for (;;) {
            unsigned __int128 v = static_cast<unsigned __int128>(eng_() & hi_mask) << 64;
            v |= eng_();
            if (v < n) return v;
        }
    }

    /// Geometric sample on {1, 2, ...} with success probability theta in
    /// (0, 1): P(W = w) = theta (1-theta)^(w-1). Inverse-CDF; exact up to
    /// double rounding.
    std::uint64_t geometric(double theta) {
        if (theta >= 1.0) return 1;
        const double u = uniform_open();
        const double w = std::floor(std::log(u) / std::log1p(-theta));
        if (w < 0.0) return 1;
        if (w >= 9.0e18) return UINT64_MAX;
        return static_cast<std::uint64_t>(w) + 1;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    static std::uint64_t mask_for(std::uint64_t v) {
        std::uint64_t m = v;
        m |= m >> 1;
        m |= m >> 2;
        m |= m >> 4;
        m |= m >> 8;
        m |= m >> 16;
        m |= m >> 32;
        return m;
    }

    std::mt19937_64 eng_;
};

}  // namespace rtstat
