// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "noise2sim/parallel.hpp"
#include "noise2sim/sim_search.hpp"
#include "noise2sim/tensor.hpp"

namespace n2s {

/// Classical non-local means parameters. h is the weighting scale in image
/// value units; the patch distance is normalized per element so a useful h
/// sits around the noise standard deviation.
struct NlmParams {
    double h = 0.1;
    int patch_size = 3;
    int search_radius = 10;

    void validate() const {
        if (h <= 0.0) throw OutOfBounds("nlm h must be > 0");
        if (patch_size < 1 || patch_size % 2 == 0)
            throw EvenPatchSize("nlm patch size must be odd and >= 1");
        if (search_radius < 1 || search_radius < patch_size / 2)
            throw OutOfBounds("nlm search radius must be >= patch radius");
    }
};

/// Weighted average of the pixels in the search window,
/// w = exp(-||patch_a - patch_b||^2 / (s^2 C h^2)), weights normalized to 1.
/// The reference pixel participates with weight 1.
inline Tensor nlm_denoise(const Tensor& img, const NlmParams& p) {
    p.validate();
    std::size_t h, w, c;
    img.image_dims(h, w, c);
    const int m = p.patch_size / 2;
    const detail::PaddedImage padded(img, static_cast<std::size_t>(m));
    const double norm = 1.0 / (static_cast<double>(p.patch_size) * p.patch_size * c);
    const double inv_h2 = 1.0 / (p.h * p.h);

    Tensor out = img;
    parallel_for(h, [&](std::size_t u) {
        std::vector<double> accum(c);
        for (std::size_t v = 0; v < w; ++v) {
            std::fill(accum.begin(), accum.end(), 0.0);
            double wsum = 0.0;
            const long ulo = std::max<long>(0, static_cast<long>(u) - p.search_radius);
            const long uhi = std::min<long>(static_cast<long>(h) - 1,
                                            static_cast<long>(u) + p.search_radius);
            const long vlo = std::max<long>(0, static_cast<long>(v) - p.search_radius);
            const long vhi = std::min<long>(static_cast<long>(w) - 1,
                                            static_cast<long>(v) + p.search_radius);
            for (long bu = ulo; bu <= uhi; ++bu) {
                for (long bv = vlo; bv <= vhi; ++bv) {
                    const double d2 = detail::patch_sqdist(padded, u, v,
                                                           static_cast<std::size_t>(bu),
                                                           static_cast<std::size_t>(bv),
                                                           p.patch_size) * norm;
                    const double weight = std::exp(-d2 * inv_h2);
                    const float* px = img.data() + (static_cast<std::size_t>(bu) * w + bv) * c;
                    for (std::size_t ch = 0; ch < c; ++ch) accum[ch] += weight * px[ch];
                    wsum += weight;
                }
            }
            float* dst = out.data() + (u * w + v) * c;
            for (std::size_t ch = 0; ch < c; ++ch)
                dst[ch] = static_cast<float>(accum[ch] / wsum);
        }
    });
    return out;
}

} // namespace n2s
