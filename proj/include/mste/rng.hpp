#pragma once
#include <cmath>
#include <cstdint>
#include <span>

namespace mste {

// Stream purposes keep independent random-number consumers from colliding
// on the same (seed, step, index) triple.
enum class RngPurpose : std::uint64_t {
    belief_init = 1,
    transition = 2,
    resample = 3,
    measurement = 4,
    clustering = 5,
    scenario = 6,
};

/// Deterministic, seedable PRNG (xoshiro256++) with explicitly derivable
/// substreams. Distribution sampling is implemented here rather than with
/// <random> so results are bit-reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    /// Independent substream for (seed, purpose, step, index).
    static Rng stream(std::uint64_t seed, RngPurpose purpose, std::uint64_t step,
                      std::uint64_t index) {
        std::uint64_t sm = seed;
        std::uint64_t h = splitmix64(sm);
        sm = h ^ (static_cast<std::uint64_t>(purpose) * 0x9E3779B97F4A7C15ULL);
        h = splitmix64(sm);
        sm = h ^ (step * 0xBF58476D1CE4E5B9ULL);
        h = splitmix64(sm);
        sm = h ^ (index * 0x94D049BB133111EBULL);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma(shape, scale) via Marsaglia-Tsang squeeze.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0, 1.0);
            double u = uniform();
            if (u <= 0.0) u = 0x1.0p-53;
            return scale * g * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform();
            if (u <= 0.0) u = 0x1.0p-53;
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return scale * d * v;
        }
    }

    /// One categorical draw from (possibly unnormalized) non-negative weights.
    int categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& s) {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

}  // namespace mste
