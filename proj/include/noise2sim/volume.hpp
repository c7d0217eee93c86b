// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "noise2sim/rng.hpp"
#include "noise2sim/tensor.hpp"

// Similar-slice sampling for CT volumes plus the patch-mean distance map,
// dissimilar mask and masked training loss.

namespace n2s {

/// Draws a training target slice j for reference slice i, uniform over the
/// in-bounds window [i-k, i+k] with i itself excluded.
struct SliceSampler {
    int num_slices = 0;
    int k = 2;
    std::uint64_t seed = 0;

    SliceSampler(int num_slices_, int k_, std::uint64_t seed_)
        : num_slices(num_slices_), k(k_), seed(seed_) {
        if (k < 1 || k >= num_slices)
            throw OutOfBounds("slice range k must satisfy 1 <= k < num_slices");
    }

    /// Deterministic per (seed, i, draw).
    int sample(int i, std::uint64_t draw) const {
        if (i < 0 || i >= num_slices) throw OutOfBounds("slice index out of range");
        const int lo = i - k < 0 ? 0 : i - k;
        const int hi = i + k >= num_slices ? num_slices - 1 : i + k;
        const int count = hi - lo; // window size minus the excluded i
        const CounterRng rng(seed);
        int j = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(count),
                                                static_cast<std::uint64_t>(i), draw));
        if (j >= i) ++j; // skip the reference slice
        return j;
    }
};

/// Binary spatial map; 1 marks a dissimilar pixel that must be excluded from
/// the training loss.
struct DissimilarMask {
    std::size_t height = 0, width = 0;
    float d_th = 0.0f;
    int patch_size = 0;
    std::vector<std::uint8_t> mask; // H*W, values 0/1

    std::uint8_t at(std::size_t u, std::size_t v) const { return mask[u * width + v]; }
    std::size_t excluded_count() const {
        std::size_t n = 0;
        for (auto m : mask) n += m;
        return n;
    }
    Tensor to_tensor() const {
        std::vector<float> data(mask.begin(), mask.end());
        return Tensor({height, width}, std::move(data), Domain::Raw);
    }
};

/// Distance map between two slices: per channel, the absolute s x s patch
/// mean of the difference (box filter with reflect padding), averaged over
/// channels. Equivalent to convolving the difference with an all-ones kernel
/// and scaling by 1/s^2.
inline Tensor distance_map(const Tensor& xi, const Tensor& xj, int s) {
    if (!xi.same_shape(xj)) throw DimMismatch("distance_map inputs must have equal dims");
    if (s < 1 || s % 2 == 0) throw EvenPatchSize("patch size must be odd and >= 1");
    std::size_t h, w, c;
    xi.image_dims(h, w, c);
    const int m = s / 2;

    std::vector<double> diff(h * w), rowsum(h * w), colsum(h * w);
    std::vector<double> acc(h * w, 0.0);
    const double inv_area = 1.0 / (static_cast<double>(s) * static_cast<double>(s));

    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t u = 0; u < h; ++u)
            for (std::size_t v = 0; v < w; ++v)
                diff[u * w + v] = static_cast<double>(xi.data()[(u * w + v) * c + ch]) -
                                  static_cast<double>(xj.data()[(u * w + v) * c + ch]);
        // horizontal then vertical box sums, reflect padded
        for (std::size_t u = 0; u < h; ++u) {
            for (std::size_t v = 0; v < w; ++v) {
                double sum = 0.0;
                for (int d = -m; d <= m; ++d)
                    sum += diff[u * w + reflect_index(static_cast<long>(v) + d, w)];
                rowsum[u * w + v] = sum;
            }
        }
        for (std::size_t u = 0; u < h; ++u) {
            for (std::size_t v = 0; v < w; ++v) {
                double sum = 0.0;
                for (int d = -m; d <= m; ++d)
                    sum += rowsum[reflect_index(static_cast<long>(u) + d, h) * w + v];
                colsum[u * w + v] = sum;
            }
        }
        for (std::size_t i = 0; i < h * w; ++i) acc[i] += std::fabs(colsum[i] * inv_area);
    }

    Tensor out({h, w}, xi.domain());
    const double inv_c = 1.0 / static_cast<double>(c);
    for (std::size_t i = 0; i < h * w; ++i) out[i] = static_cast<float>(acc[i] * inv_c);
    return out;
}

/// mask = 1 where d strictly exceeds the threshold.
inline DissimilarMask dissimilar_mask(const Tensor& d, float d_th, int patch_size = 0) {
    if (d.order() != 2) throw DimMismatch("distance map must be 2D");
    if (d_th < 0.0f) throw OutOfBounds("threshold must be >= 0");
    DissimilarMask m;
    m.height = d.dim(0);
    m.width = d.dim(1);
    m.d_th = d_th;
    m.patch_size = patch_size;
    m.mask.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.mask[i] = d[i] > d_th ? 1 : 0;
    return m;
}

enum class LossKind : std::uint8_t { MSE, L1 };

/// Mean per-element error over included (similar) pixels only; the spatial
/// mask broadcasts across channels. Throws when nothing is included so the
/// training loop can skip the degenerate pair.
inline double masked_loss(const Tensor& pred, const Tensor& target, const DissimilarMask& mask,
                          LossKind kind) {
    if (!pred.same_shape(target)) throw DimMismatch("pred/target dims differ");
    std::size_t h, w, c;
    pred.image_dims(h, w, c);
    if (h != mask.height || w != mask.width) throw DimMismatch("mask dims differ from images");

    double acc = 0.0;
    std::size_t included = 0;
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            if (mask.at(u, v)) continue;
            ++included;
            const float* p = pred.data() + (u * w + v) * c;
            const float* t = target.data() + (u * w + v) * c;
            for (std::size_t ch = 0; ch < c; ++ch) {
                const double e = static_cast<double>(p[ch]) - static_cast<double>(t[ch]);
                acc += kind == LossKind::MSE ? e * e : std::fabs(e);
            }
        }
    }
    if (included == 0) throw AllPixelsExcluded("mask excludes every pixel");
    return acc / (static_cast<double>(included) * static_cast<double>(c));
}

/// All-included mask helper for the unmasked training modes.
inline DissimilarMask full_mask(std::size_t h, std::size_t w) {
    DissimilarMask m;
    m.height = h;
    m.width = w;
    m.mask.assign(h * w, 0);
    return m;
}

} // namespace n2s
