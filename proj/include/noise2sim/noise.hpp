// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "noise2sim/rng.hpp"
#include "noise2sim/tensor.hpp"

namespace n2s {

enum class NoiseKind : std::uint8_t { Gaussian, Poisson };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Gaussian;
    double std = 25.0 / 255.0; // Gaussian std in image-value units
    double lambda = 30.0;      // Poisson photon scale
    std::uint64_t seed = 0;
};

/// out = clean + N(0, std^2), i.i.d. per element. Each element uses its own
/// counter stream keyed by flat index, so the result is order-independent.
inline Tensor add_gaussian(const Tensor& clean, double std, std::uint64_t seed) {
    if (std < 0.0) throw NegativeStd("gaussian std must be >= 0");
    Tensor out = clean;
    if (std == 0.0) return out;
    const CounterRng rng(seed);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t ctr = 0;
        out[i] = static_cast<float>(out[i] + std * rng.gaussian(i, ctr));
    }
    return out;
}

/// Elementwise x = Poisson(lambda * s) / lambda, so E[x] = s and
/// Var[x] = s / lambda.
inline Tensor add_poisson(const Tensor& clean, double lambda, std::uint64_t seed) {
    if (lambda <= 0.0) throw NegativeSignal("poisson lambda must be > 0");
    Tensor out = clean;
    const CounterRng rng(seed);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = clean[i];
        if (s < 0.0) throw NegativeSignal("poisson input must be >= 0 elementwise");
        std::uint64_t ctr = 0;
        out[i] = static_cast<float>(static_cast<double>(rng.poisson(lambda * s, i, ctr)) / lambda);
    }
    return out;
}

inline Tensor add_noise(const Tensor& clean, const NoiseSpec& spec) {
    return spec.kind == NoiseKind::Gaussian ? add_gaussian(clean, spec.std, spec.seed)
                                            : add_poisson(clean, spec.lambda, spec.seed);
}

} // namespace n2s
