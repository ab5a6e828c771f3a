#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "csgad/errors.hpp"

namespace csgad {

/// splitmix64 finalizer. Used both as a standalone mixer (seed derivation)
/// and to expand a single seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic combine of a seed with stream identifiers (window index,
/// start node, walk index, ...). Order-sensitive.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    (void)splitmix64(s);
    s ^= b + 0xc2b2ae3d27d4eb4fULL;
    return splitmix64(s);
}

/// xoshiro256++ — small deterministic PRNG, identical output on every
/// platform (the standard <random> distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
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

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Poisson sample via Knuth's product-of-uniforms, chunked so large
    /// means stay exact (sum of independent Poissons).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw ComputeError("poisson: mean must be nonnegative");
        std::uint64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean > 30.0 ? 30.0 : mean;
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double product = 1.0;
            std::uint64_t count = 0;
            for (;;) {
                product *= uniform01();
                if (product <= limit) break;
                ++count;
            }
            total += count;
        }
        return total;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Walker alias table for O(1) sampling from a fixed discrete distribution.
class AliasTable {
public:
    AliasTable() = default;

    explicit AliasTable(const std::vector<double>& weights) { build(weights); }

    void build(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        if (n == 0) return;
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ComputeError("alias table: weights must be finite and nonnegative");
            total += w;
        }
        if (total <= 0.0) throw ComputeError("alias table: total weight must be positive");

        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

        std::vector<std::uint32_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (scaled[i] < 1.0)
                small.push_back(static_cast<std::uint32_t>(i));
            else
                large.push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t less = small.back();
            small.pop_back();
            const std::uint32_t more = large.back();
            large.pop_back();
            prob_[less] = scaled[less];
            alias_[less] = more;
            scaled[more] = scaled[more] + scaled[less] - 1.0;
            if (scaled[more] < 1.0)
                small.push_back(more);
            else
                large.push_back(more);
        }
        while (!large.empty()) {
            prob_[large.back()] = 1.0;
            large.pop_back();
        }
        while (!small.empty()) {
            prob_[small.back()] = 1.0;
            small.pop_back();
        }
    }

    bool empty() const { return prob_.empty(); }
    std::size_t size() const { return prob_.size(); }

    std::uint32_t sample(Rng& rng) const {
        const std::uint32_t column = static_cast<std::uint32_t>(rng.uniform_index(prob_.size()));
        return rng.uniform01() < prob_[column] ? column : alias_[column];
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace csgad
