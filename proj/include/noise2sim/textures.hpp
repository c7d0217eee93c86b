// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "noise2sim/rng.hpp"
#include "noise2sim/tensor.hpp"

// Procedural grayscale textures used as clean test signals for experiments
// and the bundled end-to-end pipeline. All generators are deterministic in
// the seed and emit values well inside [0,1].

namespace n2s {
namespace textures {

/// Sum of two oriented sinusoidal gratings.
inline Tensor waves(std::size_t h, std::size_t w, std::uint64_t seed) {
    const CounterRng rng(seed);
    const double a1 = rng.uniform(0, 0) * 3.14159265;
    const double a2 = rng.uniform(0, 1) * 3.14159265;
    const double f1 = 0.25 + 0.45 * rng.uniform(0, 2);
    const double f2 = 0.6 + 0.8 * rng.uniform(0, 3);
    const double p1 = rng.uniform(0, 4) * 6.2831853;
    Tensor t({h, w}, Domain::UnitInterval);
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            const double x = static_cast<double>(v), y = static_cast<double>(u);
            const double s = std::sin(f1 * (x * std::cos(a1) + y * std::sin(a1)) + p1) +
                             0.6 * std::sin(f2 * (x * std::cos(a2) + y * std::sin(a2)));
            t.at(u, v) = static_cast<float>(0.5 + 0.22 * s);
        }
    }
    return t;
}

/// Checkerboard with a smooth phase warp; sharp edges on curved boundaries.
inline Tensor checker(std::size_t h, std::size_t w, std::uint64_t seed) {
    const CounterRng rng(seed);
    const double cell = 5.0 + 6.0 * rng.uniform(1, 0);
    const double warp = 1.5 + 2.5 * rng.uniform(1, 1);
    const double wf = 0.15 + 0.15 * rng.uniform(1, 2);
    Tensor t({h, w}, Domain::UnitInterval);
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            const double x = v + warp * std::sin(wf * u);
            const double y = u + warp * std::cos(wf * v);
            const int cx = static_cast<int>(std::floor(x / cell));
            const int cy = static_cast<int>(std::floor(y / cell));
            t.at(u, v) = ((cx + cy) & 1) ? 0.72f : 0.28f;
        }
    }
    return t;
}

/// Smooth bumps on a jittered lattice.
inline Tensor blobs(std::size_t h, std::size_t w, std::uint64_t seed) {
    const CounterRng rng(seed);
    const double spacing = 12.0;
    Tensor t({h, w}, Domain::UnitInterval);
    const int gy = static_cast<int>(h / spacing) + 2;
    const int gx = static_cast<int>(w / spacing) + 2;
    for (std::size_t u = 0; u < h; ++u)
        for (std::size_t v = 0; v < w; ++v) t.at(u, v) = 0.25f;
    for (int by = -1; by < gy; ++by) {
        for (int bx = -1; bx < gx; ++bx) {
            const std::uint64_t stream = static_cast<std::uint64_t>(by + 1) * 1000 + (bx + 1);
            const double cy = by * spacing + spacing * rng.uniform(stream, 0);
            const double cx = bx * spacing + spacing * rng.uniform(stream, 1);
            const double r = 2.5 + 2.0 * rng.uniform(stream, 2);
            const double amp = 0.35 + 0.2 * rng.uniform(stream, 3);
            for (std::size_t u = 0; u < h; ++u) {
                for (std::size_t v = 0; v < w; ++v) {
                    const double d2 = (u - cy) * (u - cy) + (v - cx) * (v - cx);
                    t.at(u, v) += static_cast<float>(amp * std::exp(-d2 / (2.0 * r * r)));
                }
            }
        }
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0.05f) t[i] = 0.05f;
        if (t[i] > 0.95f) t[i] = 0.95f;
    }
    return t;
}

inline Tensor make(const std::string& kind, std::size_t h, std::size_t w, std::uint64_t seed) {
    if (kind == "waves") return waves(h, w, seed);
    if (kind == "checker") return checker(h, w, seed);
    if (kind == "blobs") return blobs(h, w, seed);
    throw OutOfBounds("unknown texture kind: " + kind);
}

/// Mixed bundle cycling through the generator kinds.
inline std::vector<Tensor> bundle(std::size_t count, std::size_t h, std::size_t w,
                                  std::uint64_t seed) {
    static const char* kinds[] = {"waves", "checker", "blobs"};
    std::vector<Tensor> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(make(kinds[i % 3], h, w, CounterRng::mix(seed + i)));
    return out;
}

} // namespace textures
} // namespace n2s
