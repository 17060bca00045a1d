#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qcert {

/// Deterministic counter-based generator (splitmix64 output function over a
/// 64-bit counter).  The same (seed, draw sequence) produces identical output
/// on every platform, which is what makes runs and sweeps reproducible.
/// Streams for parallel work are derived from the seed alone, so a derived
/// stream does not depend on how much the parent has already been consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    static constexpr const char* algorithm() { return "splitmix64ctr/v1"; }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        ++counter_;
        return mix(seed_ + counter_ * kGolden);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    /// Standard normal via Box-Muller (second value cached).
    double next_gauss() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Independent child stream.  Depends only on (seed, stream), never on
    /// the parent's counter.
    Rng derive(std::uint64_t stream) const {
        return Rng(mix(seed_ ^ mix(0xD2B74407B1CE6E93ull + stream * kGolden)));
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

namespace random {

/// One multinomial draw: n trials over the categories of `p` (need not be
/// normalized beyond ~1e-12; the last category absorbs rounding).
inline std::vector<std::uint64_t> multinomial(Rng& rng, std::span<const double> p, std::uint64_t n) {
    const std::size_t d = p.size();
    if (d < 1) throw std::invalid_argument("multinomial: empty distribution");
    std::vector<double> cdf(d);
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    std::vector<std::uint64_t> counts(d, 0);
    for (std::uint64_t t = 0; t < n; ++t) {
        const double u = rng.next_double() * acc;
        std::size_t lo = 0, hi = d - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cdf[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        ++counts[lo];
    }
    return counts;
}

}  // namespace random
}  // namespace qcert
