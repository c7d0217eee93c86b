// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace n2s {

// Counter-based generator built on the splitmix64 finalizer. Every draw is a
// pure function of (seed, stream, counter), so per-element noise streams are
// reproducible across runs and independent of evaluation order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t raw(std::uint64_t stream, std::uint64_t counter) const {
        return mix(mix(mix(seed_) ^ stream) ^ counter);
    }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(raw(stream, counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n, std::uint64_t stream, std::uint64_t counter) const {
        return raw(stream, counter) % n;
    }

    /// Standard normal via Box-Muller; consumes two counters.
    double gaussian(std::uint64_t stream, std::uint64_t& counter) const {
        const double u1 = 1.0 - uniform(stream, counter++); // (0,1]
        const double u2 = uniform(stream, counter++);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Poisson draw with the given mean; consumes a variable number of counters.
    /// Inversion by uniform products for small means, PTRS rejection otherwise.
    std::uint64_t poisson(double mean, std::uint64_t stream, std::uint64_t& counter) const {
        if (mean <= 0.0) return 0;
        if (mean < 50.0) {
            const double limit = std::exp(-mean);
            double prod = 1.0;
            std::uint64_t n = 0;
            do {
                prod *= uniform(stream, counter++);
                ++n;
            } while (prod > limit);
            return n - 1;
        }
        // PTRS transformed rejection (Hormann), valid for mean >= 10.
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            double u = uniform(stream, counter++) - 0.5;
            double v = uniform(stream, counter++);
            double us = 0.5 - std::fabs(u);
            double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * log_mean - mean - std::lgamma(kf + 1.0))
                return static_cast<std::uint64_t>(kf);
        }
    }

private:
    std::uint64_t seed_;
};

} // namespace n2s
