// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "noise2sim/parallel.hpp"
#include "noise2sim/rng.hpp"
#include "noise2sim/tensor.hpp"
#include "noise2sim/tensor_io.hpp"

// Two-step similar-image construction for 2D images with independent noise:
// per-pixel k-NN patch search over the whole image, materialization of the
// j-th nearest image, and the four input/target pairing strategies.

namespace n2s {

/// Per-pixel table of the k most similar pixel coordinates, sorted by
/// ascending patch distance. The reference pixel itself is never listed;
/// together with it each location has a set of k+1 similar pixels.
struct NearestImages {
    std::size_t height = 0, width = 0, channels = 1;
    int k = 0;
    int patch_size = 0;
    std::vector<std::uint32_t> coords; // H*W*k pairs (u,v)
    std::vector<float> dists;          // H*W*k

    std::size_t pixel_count() const { return height * width; }

    std::pair<std::uint32_t, std::uint32_t> neighbor(std::size_t u, std::size_t v, int j) const {
        const std::size_t base = ((u * width + v) * static_cast<std::size_t>(k) + j) * 2;
        return {coords[base], coords[base + 1]};
    }
    float dist(std::size_t u, std::size_t v, int j) const {
        return dists[(u * width + v) * static_cast<std::size_t>(k) + j];
    }
};

struct PairingMethod {
    enum Kind { OriginalToRandom = 1, RandomToOriginal = 2, SortedPair = 3, RandomToRandom = 4 };
    Kind kind = RandomToRandom;
    int j1 = 1, j2 = 2; // SortedPair only, 1-based

    static PairingMethod original_to_random() { return {OriginalToRandom, 0, 0}; }
    static PairingMethod random_to_original() { return {RandomToOriginal, 0, 0}; }
    static PairingMethod sorted_pair(int j1, int j2) {
        if (j1 < 1 || j2 < 1 || j1 == j2)
            throw IndexOutOfRange("sorted pair needs two distinct 1-based indices");
        return {SortedPair, j1, j2};
    }
    static PairingMethod random_to_random() { return {RandomToRandom, 0, 0}; }

    static PairingMethod from_number(int m) {
        switch (m) {
            case 1: return original_to_random();
            case 2: return random_to_original();
            case 3: return sorted_pair(1, 2);
            case 4: return random_to_random();
            default: throw IndexOutOfRange("pairing method must be 1..4");
        }
    }
};

namespace detail {

// Image padded by `margin` on each spatial side with symmetric reflection;
// keeps the k-NN inner loops branch-free and bit-identical to the
// reflect-indexed patch_distance below.
struct PaddedImage {
    std::size_t h, w, c, margin;
    std::vector<float> data;

    PaddedImage(const Tensor& img, std::size_t m) : margin(m) {
        img.image_dims(h, w, c);
        const std::size_t ph = h + 2 * m, pw = w + 2 * m;
        data.resize(ph * pw * c);
        for (std::size_t u = 0; u < ph; ++u) {
            const std::size_t su = reflect_index(static_cast<long>(u) - static_cast<long>(m), h);
            for (std::size_t v = 0; v < pw; ++v) {
                const std::size_t sv = reflect_index(static_cast<long>(v) - static_cast<long>(m), w);
                const float* src = img.data() + (su * w + sv) * c;
                float* dst = &data[(u * pw + v) * c];
                for (std::size_t ch = 0; ch < c; ++ch) dst[ch] = src[ch];
            }
        }
    }

    const float* at(std::size_t u, std::size_t v) const {
        return &data[((u + margin) * (w + 2 * margin) + (v + margin)) * c];
    }
    std::size_t row_stride() const { return (w + 2 * margin) * c; }
};

// Squared patch distance between centers a and b on a padded image, summed in
// fixed row-major (di, dj, channel) order with a double accumulator.
inline double patch_sqdist(const PaddedImage& p, std::size_t au, std::size_t av, std::size_t bu,
                           std::size_t bv, int s) {
    const std::size_t m = static_cast<std::size_t>(s / 2); // == p.margin
    const std::size_t stride = p.row_stride();
    const float* pa = p.at(au - m, av - m); // patch top-left; at() re-adds the margin
    const float* pb = p.at(bu - m, bv - m);
    double acc = 0.0;
    const std::size_t row_len = static_cast<std::size_t>(s) * p.c;
    for (int di = 0; di < s; ++di) {
        const float* ra = pa + static_cast<std::size_t>(di) * stride;
        const float* rb = pb + static_cast<std::size_t>(di) * stride;
        for (std::size_t t = 0; t < row_len; ++t) {
            const double d = static_cast<double>(ra[t]) - static_cast<double>(rb[t]);
            acc += d * d;
        }
    }
    return acc;
}

inline void check_patch_size(int s) {
    if (s < 1 || s % 2 == 0) throw EvenPatchSize("patch size must be odd and >= 1");
}

} // namespace detail

/// Euclidean distance between the s x s (x C) patches centered at (au,av) and
/// (bu,bv), with symmetric reflect padding at image borders.
inline float patch_distance(const Tensor& img, std::size_t au, std::size_t av, std::size_t bu,
                            std::size_t bv, int s) {
    detail::check_patch_size(s);
    std::size_t h, w, c;
    img.image_dims(h, w, c);
    if (au >= h || av >= w || bu >= h || bv >= w)
        throw OutOfBounds("patch center out of bounds");
    const detail::PaddedImage padded(img, static_cast<std::size_t>(s / 2));
    return static_cast<float>(std::sqrt(detail::patch_sqdist(padded, au, av, bu, bv, s)));
}

/// Exact k-nearest similar pixels per reference pixel under patch distance,
/// excluding the pixel itself. Ties are broken by row-major coordinate order,
/// which makes the result comparable to a brute-force oracle bit-for-bit.
inline NearestImages knn_similar_pixels(const Tensor& img, int k, int s) {
    detail::check_patch_size(s);
    std::size_t h, w, c;
    img.image_dims(h, w, c);
    const std::size_t n = h * w;
    if (k < 1) throw KTooLarge("k must be >= 1");
    if (static_cast<std::size_t>(k) >= n) throw KTooLarge("k must be smaller than the pixel count");

    NearestImages out;
    out.height = h;
    out.width = w;
    out.channels = c;
    out.k = k;
    out.patch_size = s;
    out.coords.resize(n * static_cast<std::size_t>(k) * 2);
    out.dists.resize(n * static_cast<std::size_t>(k));

    const detail::PaddedImage padded(img, static_cast<std::size_t>(s / 2));

    parallel_for(h, [&](std::size_t u) {
        std::vector<std::pair<float, std::uint32_t>> cand;
        cand.reserve(n - 1);
        for (std::size_t v = 0; v < w; ++v) {
            cand.clear();
            for (std::size_t bu = 0; bu < h; ++bu) {
                for (std::size_t bv = 0; bv < w; ++bv) {
                    if (bu == u && bv == v) continue;
                    const float d = static_cast<float>(
                        std::sqrt(detail::patch_sqdist(padded, u, v, bu, bv, s)));
                    cand.emplace_back(d, static_cast<std::uint32_t>(bu * w + bv));
                }
            }
            std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
            const std::size_t base = (u * w + v) * static_cast<std::size_t>(k);
            for (int j = 0; j < k; ++j) {
                out.dists[base + j] = cand[j].first;
                out.coords[(base + j) * 2] = cand[j].second / static_cast<std::uint32_t>(w);
                out.coords[(base + j) * 2 + 1] = cand[j].second % static_cast<std::uint32_t>(w);
            }
        }
    });
    return out;
}

/// Forms the j-th nearest image (1-based): every pixel replaced by its j-th
/// most similar pixel.
inline Tensor materialize_nearest_image(const NearestImages& n, const Tensor& img, int j) {
    if (j < 1 || j > n.k) throw IndexOutOfRange("nearest-image index must be in [1, k]");
    std::size_t h, w, c;
    img.image_dims(h, w, c);
    if (h != n.height || w != n.width || c != n.channels)
        throw DimMismatch("NearestImages does not match image dims");
    Tensor out = img;
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            const auto [nu, nv] = n.neighbor(u, v, j - 1);
            const float* src = img.data() + (static_cast<std::size_t>(nu) * w + nv) * c;
            float* dst = out.data() + (u * w + v) * c;
            for (std::size_t ch = 0; ch < c; ++ch) dst[ch] = src[ch];
        }
    }
    return out;
}

namespace detail {

// Draws every pixel from its similar set N(u,v) = {self, k neighbors}.
inline Tensor random_member_image(const NearestImages& n, const Tensor& img, const CounterRng& rng,
                                  std::uint64_t side) {
    std::size_t h, w, c;
    img.image_dims(h, w, c);
    Tensor out = img;
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            const std::size_t flat = u * w + v;
            const std::uint64_t pick = rng.below(static_cast<std::uint64_t>(n.k) + 1, flat, side);
            if (pick == 0) continue; // reference pixel itself
            const auto [nu, nv] = n.neighbor(u, v, static_cast<int>(pick) - 1);
            const float* src = img.data() + (static_cast<std::size_t>(nu) * w + nv) * c;
            float* dst = out.data() + flat * c;
            for (std::size_t ch = 0; ch < c; ++ch) dst[ch] = src[ch];
        }
    }
    return out;
}

} // namespace detail

/// Builds one (input, target) training pair from a similar-pixel table.
/// Deterministic for a fixed seed.
inline std::pair<Tensor, Tensor> construct_similar_pair(const NearestImages& n, const Tensor& img,
                                                        const PairingMethod& method,
                                                        std::uint64_t seed) {
    std::size_t h, w, c;
    img.image_dims(h, w, c);
    if (h != n.height || w != n.width || c != n.channels)
        throw DimMismatch("NearestImages does not match image dims");
    const CounterRng rng(seed);
    switch (method.kind) {
        case PairingMethod::OriginalToRandom:
            return {img, detail::random_member_image(n, img, rng, 0)};
        case PairingMethod::RandomToOriginal:
            return {detail::random_member_image(n, img, rng, 0), img};
        case PairingMethod::SortedPair:
            return {materialize_nearest_image(n, img, method.j1),
                    materialize_nearest_image(n, img, method.j2)};
        case PairingMethod::RandomToRandom:
        default:
            return {detail::random_member_image(n, img, rng, 0),
                    detail::random_member_image(n, img, rng, 1)};
    }
}

// --- N2SN neighbor-table container ---
// magic "N2SN" | version u32 | H,W,C u32 | k u32 | s u32 |
// per pixel, k entries of (u u32, v u32, d f32), all little-endian.

inline constexpr std::uint32_t kNeighborFormatVersion = 1;

inline std::string encode_neighbors(const NearestImages& n) {
    std::string out;
    out += "N2SN";
    detail::put_u32le(out, kNeighborFormatVersion);
    detail::put_u32le(out, static_cast<std::uint32_t>(n.height));
    detail::put_u32le(out, static_cast<std::uint32_t>(n.width));
    detail::put_u32le(out, static_cast<std::uint32_t>(n.channels));
    detail::put_u32le(out, static_cast<std::uint32_t>(n.k));
    detail::put_u32le(out, static_cast<std::uint32_t>(n.patch_size));
    const std::size_t entries = n.pixel_count() * static_cast<std::size_t>(n.k);
    for (std::size_t i = 0; i < entries; ++i) {
        detail::put_u32le(out, n.coords[2 * i]);
        detail::put_u32le(out, n.coords[2 * i + 1]);
        detail::put_f32le(out, n.dists[i]);
    }
    return out;
}

inline NearestImages decode_neighbors(const unsigned char* p, std::size_t len) {
    if (len < 4 || std::memcmp(p, "N2SN", 4) != 0) throw BadMagic("not an N2SN file");
    if (len < 28) throw TruncatedPayload("N2SN header truncated");
    if (detail::get_u32le(p + 4) != kNeighborFormatVersion)
        throw UnsupportedVersion("unsupported N2SN version");
    NearestImages n;
    n.height = detail::get_u32le(p + 8);
    n.width = detail::get_u32le(p + 12);
    n.channels = detail::get_u32le(p + 16);
    n.k = static_cast<int>(detail::get_u32le(p + 20));
    n.patch_size = static_cast<int>(detail::get_u32le(p + 24));
    if (n.height == 0 || n.width == 0 || n.channels == 0 || n.k < 1)
        throw TruncatedPayload("bad N2SN header fields");
    const std::size_t entries = n.pixel_count() * static_cast<std::size_t>(n.k);
    if (len != 28 + entries * 12) throw TruncatedPayload("N2SN payload length mismatch");
    n.coords.resize(entries * 2);
    n.dists.resize(entries);
    for (std::size_t i = 0; i < entries; ++i) {
        const unsigned char* e = p + 28 + i * 12;
        n.coords[2 * i] = detail::get_u32le(e);
        n.coords[2 * i + 1] = detail::get_u32le(e + 4);
        n.dists[i] = detail::get_f32le(e + 8);
    }
    return n;
}

inline void save_neighbors(const NearestImages& n, const std::string& path) {
    detail::write_file(path, encode_neighbors(n));
}

inline NearestImages load_neighbors(const std::string& path) {
    const auto buf = detail::read_file(path);
    return decode_neighbors(buf.data(), buf.size());
}

} // namespace n2s
