// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "noise2sim/tensor.hpp"

namespace n2s {

/// 10 * log10(peak^2 / MSE); +inf for identical inputs.
inline double psnr(const Tensor& a, const Tensor& b, double peak = 1.0) {
    if (!a.same_shape(b)) throw DimMismatch("psnr inputs must have equal dims");
    if (peak <= 0.0) throw OutOfBounds("psnr peak must be > 0");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace detail {

inline const std::vector<double>& ssim_window() {
    // 11x11 Gaussian, sigma 1.5, normalized to sum 1
    static const std::vector<double> win = [] {
        std::vector<double> w(121);
        double sum = 0.0;
        for (int i = 0; i < 11; ++i) {
            for (int j = 0; j < 11; ++j) {
                const double du = i - 5, dv = j - 5;
                w[i * 11 + j] = std::exp(-(du * du + dv * dv) / (2.0 * 1.5 * 1.5));
                sum += w[i * 11 + j];
            }
        }
        for (auto& v : w) v /= sum;
        return w;
    }();
    return win;
}

inline double ssim_channel(const float* a, const float* b, std::size_t h, std::size_t w,
                           std::size_t stride, double peak) {
    const auto& win = ssim_window();
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t u = 5; u + 5 < h; ++u) {
        for (std::size_t v = 5; v + 5 < w; ++v) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int i = 0; i < 11; ++i) {
                for (int j = 0; j < 11; ++j) {
                    const double g = win[i * 11 + j];
                    const double xa = a[(u + i - 5) * stride + (v + j - 5)];
                    const double xb = b[(u + i - 5) * stride + (v + j - 5)];
                    mu_a += g * xa;
                    mu_b += g * xb;
                    aa += g * xa * xa;
                    bb += g * xb * xb;
                    ab += g * xa * xb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double val = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            total += val;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

} // namespace detail

/// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01,
/// K2=0.03, dynamic range = peak. Multi-channel inputs are averaged
/// per channel.
inline double ssim(const Tensor& a, const Tensor& b, double peak = 1.0) {
    if (!a.same_shape(b)) throw DimMismatch("ssim inputs must have equal dims");
    std::size_t h, w, c;
    a.image_dims(h, w, c);
    if (h < 11 || w < 11) throw DimMismatch("ssim needs images of at least 11x11");
    if (c == 1) return detail::ssim_channel(a.data(), b.data(), h, w, w, peak);
    // split channels into planar buffers and average
    double total = 0.0;
    std::vector<float> pa(h * w), pb(h * w);
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t p = 0; p < h * w; ++p) {
            pa[p] = a.data()[p * c + ch];
            pb[p] = b.data()[p * c + ch];
        }
        total += detail::ssim_channel(pa.data(), pb.data(), h, w, w, peak);
    }
    return total / static_cast<double>(c);
}

} // namespace n2s
