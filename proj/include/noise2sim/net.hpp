// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "noise2sim/rng.hpp"
#include "noise2sim/tensor.hpp"
#include "noise2sim/tensor_io.hpp"

// Small convolutional denoisers with hand-written forward/backward passes.
// All tensors are (H,W,C) row-major with the channel fastest; convolutions use
// symmetric reflect padding and stride 1.

namespace n2s {

using ParamGrads = std::vector<std::vector<float>>;

/// Square conv layer; weights laid out as [ki][kj][cin][cout].
struct Conv2d {
    int k = 3, cin = 1, cout = 1;
    std::vector<float> w;
    std::vector<float> b;

    Conv2d() = default;
    Conv2d(int k_, int cin_, int cout_) : k(k_), cin(cin_), cout(cout_) {
        w.assign(static_cast<std::size_t>(k) * k * cin * cout, 0.0f);
        b.assign(static_cast<std::size_t>(cout), 0.0f);
    }

    std::size_t fan_in() const { return static_cast<std::size_t>(k) * k * cin; }

    Tensor forward(const Tensor& x) const {
        std::size_t h, wd, c;
        x.image_dims(h, wd, c);
        if (c != static_cast<std::size_t>(cin)) throw ShapeMismatch("conv input channel mismatch");
        Tensor y({h, wd, static_cast<std::size_t>(cout)});
        const int m = k / 2;
        const std::size_t co_n = static_cast<std::size_t>(cout);
        for (std::size_t u = 0; u < h; ++u) {
            for (std::size_t v = 0; v < wd; ++v) {
                float* out = y.data() + (u * wd + v) * co_n;
                std::memcpy(out, b.data(), co_n * sizeof(float));
                for (int i = 0; i < k; ++i) {
                    const std::size_t uu = reflect_index(static_cast<long>(u) + i - m, h);
                    for (int j = 0; j < k; ++j) {
                        const std::size_t vv = reflect_index(static_cast<long>(v) + j - m, wd);
                        const float* px = x.data() + (uu * wd + vv) * c;
                        const float* wp = w.data() + ((static_cast<std::size_t>(i) * k + j) * c) * co_n;
                        for (std::size_t ci = 0; ci < c; ++ci) {
                            const float xv = px[ci];
                            const float* wr = wp + ci * co_n;
                            for (std::size_t co = 0; co < co_n; ++co) out[co] += xv * wr[co];
                        }
                    }
                }
            }
        }
        return y;
    }

    /// Accumulates parameter grads (and optionally input grads) for dL/dy.
    void backward(const Tensor& x, const Tensor& gy, std::vector<float>& gw, std::vector<float>& gb,
                  Tensor* gx) const {
        std::size_t h, wd, c;
        x.image_dims(h, wd, c);
        const std::size_t co_n = static_cast<std::size_t>(cout);
        if (gw.size() != w.size() || gb.size() != b.size())
            throw ShapeMismatch("gradient buffer shape mismatch");
        const int m = k / 2;
        for (std::size_t u = 0; u < h; ++u) {
            for (std::size_t v = 0; v < wd; ++v) {
                const float* g = gy.data() + (u * wd + v) * co_n;
                for (std::size_t co = 0; co < co_n; ++co) gb[co] += g[co];
                for (int i = 0; i < k; ++i) {
                    const std::size_t uu = reflect_index(static_cast<long>(u) + i - m, h);
                    for (int j = 0; j < k; ++j) {
                        const std::size_t vv = reflect_index(static_cast<long>(v) + j - m, wd);
                        const float* px = x.data() + (uu * wd + vv) * c;
                        const std::size_t wbase = (static_cast<std::size_t>(i) * k + j) * c;
                        for (std::size_t ci = 0; ci < c; ++ci) {
                            const float xv = px[ci];
                            float* gwr = gw.data() + (wbase + ci) * co_n;
                            double gxv = 0.0;
                            const float* wr = w.data() + (wbase + ci) * co_n;
                            for (std::size_t co = 0; co < co_n; ++co) {
                                gwr[co] += xv * g[co];
                                gxv += static_cast<double>(wr[co]) * g[co];
                            }
                            if (gx) gx->data()[(uu * wd + vv) * c + ci] += static_cast<float>(gxv);
                        }
                    }
                }
            }
        }
    }

    void init_he_uniform(const CounterRng& rng, std::uint64_t stream) {
        const float limit = std::sqrt(6.0f / static_cast<float>(fan_in()));
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = limit * (2.0f * static_cast<float>(rng.uniform(stream, i)) - 1.0f);
        for (auto& bv : b) bv = 0.0f;
    }
};

namespace netops {

inline Tensor relu(const Tensor& pre) {
    Tensor out = pre;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] < 0.0f) out[i] = 0.0f;
    return out;
}

inline Tensor relu_backward(const Tensor& pre, const Tensor& gy) {
    Tensor gx = gy;
    for (std::size_t i = 0; i < gx.size(); ++i)
        if (pre[i] <= 0.0f) gx[i] = 0.0f;
    return gx;
}

inline Tensor maxpool2(const Tensor& x, std::vector<std::uint8_t>& idx) {
    std::size_t h, w, c;
    x.image_dims(h, w, c);
    const std::size_t oh = h / 2, ow = w / 2;
    Tensor y({oh, ow, c});
    idx.assign(oh * ow * c, 0);
    for (std::size_t u = 0; u < oh; ++u) {
        for (std::size_t v = 0; v < ow; ++v) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                float best = x.at(2 * u, 2 * v, ch);
                std::uint8_t arg = 0;
                const std::array<float, 3> rest = {x.at(2 * u, 2 * v + 1, ch),
                                                   x.at(2 * u + 1, 2 * v, ch),
                                                   x.at(2 * u + 1, 2 * v + 1, ch)};
                for (std::uint8_t t = 0; t < 3; ++t) {
                    if (rest[t] > best) {
                        best = rest[t];
                        arg = static_cast<std::uint8_t>(t + 1);
                    }
                }
                y.at(u, v, ch) = best;
                idx[(u * ow + v) * c + ch] = arg;
            }
        }
    }
    return y;
}

inline Tensor maxpool2_backward(const Tensor& gy, const std::vector<std::uint8_t>& idx,
                                std::size_t h, std::size_t w) {
    std::size_t oh, ow, c;
    gy.image_dims(oh, ow, c);
    Tensor gx({h, w, c});
    for (std::size_t u = 0; u < oh; ++u) {
        for (std::size_t v = 0; v < ow; ++v) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                const std::uint8_t a = idx[(u * ow + v) * c + ch];
                const std::size_t du = a / 2, dv = a % 2;
                gx.at(2 * u + du, 2 * v + dv, ch) += gy.at(u, v, ch);
            }
        }
    }
    return gx;
}

inline Tensor upsample_nearest2(const Tensor& x) {
    std::size_t h, w, c;
    x.image_dims(h, w, c);
    Tensor y({2 * h, 2 * w, c});
    for (std::size_t u = 0; u < 2 * h; ++u)
        for (std::size_t v = 0; v < 2 * w; ++v)
            for (std::size_t ch = 0; ch < c; ++ch) y.at(u, v, ch) = x.at(u / 2, v / 2, ch);
    return y;
}

inline Tensor upsample_nearest2_backward(const Tensor& gy) {
    std::size_t h2, w2, c;
    gy.image_dims(h2, w2, c);
    Tensor gx({h2 / 2, w2 / 2, c});
    for (std::size_t u = 0; u < h2; ++u)
        for (std::size_t v = 0; v < w2; ++v)
            for (std::size_t ch = 0; ch < c; ++ch) gx.at(u / 2, v / 2, ch) += gy.at(u, v, ch);
    return gx;
}

inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
    std::size_t h, w, ca, hb, wb, cb;
    a.image_dims(h, w, ca);
    b.image_dims(hb, wb, cb);
    if (h != hb || w != wb) throw ShapeMismatch("concat spatial dims differ");
    Tensor y({h, w, ca + cb});
    for (std::size_t p = 0; p < h * w; ++p) {
        std::memcpy(y.data() + p * (ca + cb), a.data() + p * ca, ca * sizeof(float));
        std::memcpy(y.data() + p * (ca + cb) + ca, b.data() + p * cb, cb * sizeof(float));
    }
    return y;
}

inline void split_channels(const Tensor& g, std::size_t ca, Tensor& ga, Tensor& gb) {
    std::size_t h, w, c;
    g.image_dims(h, w, c);
    const std::size_t cb = c - ca;
    ga = Tensor({h, w, ca});
    gb = Tensor({h, w, cb});
    for (std::size_t p = 0; p < h * w; ++p) {
        std::memcpy(ga.data() + p * ca, g.data() + p * c, ca * sizeof(float));
        std::memcpy(gb.data() + p * cb, g.data() + p * c + ca, cb * sizeof(float));
    }
}

// reflect-pad by one row/column at the bottom/right so pooling dims are even
inline Tensor pad_even(const Tensor& x, bool pad_h, bool pad_w) {
    std::size_t h, w, c;
    x.image_dims(h, w, c);
    const std::size_t oh = h + (pad_h ? 1 : 0), ow = w + (pad_w ? 1 : 0);
    Tensor y({oh, ow, c});
    for (std::size_t u = 0; u < oh; ++u) {
        const std::size_t su = reflect_index(static_cast<long>(u), h);
        for (std::size_t v = 0; v < ow; ++v) {
            const std::size_t sv = reflect_index(static_cast<long>(v), w);
            for (std::size_t ch = 0; ch < c; ++ch) y.at(u, v, ch) = x.at(su, sv, ch);
        }
    }
    return y;
}

inline Tensor pad_even_backward(const Tensor& gpad, std::size_t h, std::size_t w) {
    std::size_t oh, ow, c;
    gpad.image_dims(oh, ow, c);
    Tensor gx({h, w, c});
    for (std::size_t u = 0; u < oh; ++u) {
        const std::size_t su = reflect_index(static_cast<long>(u), h);
        for (std::size_t v = 0; v < ow; ++v) {
            const std::size_t sv = reflect_index(static_cast<long>(v), w);
            for (std::size_t ch = 0; ch < c; ++ch) gx.at(su, sv, ch) += gpad.at(u, v, ch);
        }
    }
    return gx;
}

inline Tensor as_hwc(const Tensor& t) {
    if (t.order() == 3) return t;
    if (t.order() != 2) throw DimMismatch("model input must be 2D or 3D");
    Tensor out({t.dim(0), t.dim(1), 1}, t.values(), t.domain());
    return out;
}

inline Tensor match_order(Tensor hwc, const Tensor& like) {
    if (like.order() == 3) return hwc;
    Tensor out({hwc.dim(0), hwc.dim(1)}, std::move(hwc.values()), like.domain());
    return out;
}

} // namespace netops

/// Two-level residual encoder-decoder:
/// conv3x3+ReLU x2 -> maxpool -> conv3x3+ReLU x2 -> nearest upsample ->
/// skip concat -> conv3x3+ReLU x2 -> 1x1 conv, plus a global residual
/// connection. Zero parameters give an exact identity mapping.
struct ResUnet2 {
    static constexpr std::uint8_t kArchCode = 0;

    int cin = 1, w1 = 32, w2 = 64;
    Conv2d enc1a, enc1b, enc2a, enc2b, dec1a, dec1b, head;

    ResUnet2() : ResUnet2(1, 32, 64) {}
    ResUnet2(int cin_, int w1_, int w2_)
        : cin(cin_), w1(w1_), w2(w2_),
          enc1a(3, cin_, w1_), enc1b(3, w1_, w1_),
          enc2a(3, w1_, w2_), enc2b(3, w2_, w2_),
          dec1a(3, w1_ + w2_, w1_), dec1b(3, w1_, w1_),
          head(1, w1_, cin_) {}

    int in_channels() const { return cin; }
    std::array<std::uint32_t, 3> arch_params() const {
        return {static_cast<std::uint32_t>(cin), static_cast<std::uint32_t>(w1),
                static_cast<std::uint32_t>(w2)};
    }
    static ResUnet2 from_arch(const std::array<std::uint32_t, 3>& a) {
        return ResUnet2(static_cast<int>(a[0]), static_cast<int>(a[1]), static_cast<int>(a[2]));
    }

    /// He-uniform conv kernels, zero biases, zero final 1x1 conv so training
    /// starts from the identity mapping.
    void init(std::uint64_t seed) {
        const CounterRng rng(seed);
        enc1a.init_he_uniform(rng, 1);
        enc1b.init_he_uniform(rng, 2);
        enc2a.init_he_uniform(rng, 3);
        enc2b.init_he_uniform(rng, 4);
        dec1a.init_he_uniform(rng, 5);
        dec1b.init_he_uniform(rng, 6);
        std::fill(head.w.begin(), head.w.end(), 0.0f);
        std::fill(head.b.begin(), head.b.end(), 0.0f);
    }

    std::vector<std::vector<float>*> param_blocks() {
        return {&enc1a.w, &enc1a.b, &enc1b.w, &enc1b.b, &enc2a.w, &enc2a.b, &enc2b.w,
                &enc2b.b, &dec1a.w, &dec1a.b, &dec1b.w, &dec1b.b, &head.w, &head.b};
    }
    std::vector<const std::vector<float>*> param_blocks() const {
        return {&enc1a.w, &enc1a.b, &enc1b.w, &enc1b.b, &enc2a.w, &enc2a.b, &enc2b.w,
                &enc2b.b, &dec1a.w, &dec1a.b, &dec1b.w, &dec1b.b, &head.w, &head.b};
    }

    struct Cache {
        bool valid = false;
        bool pad_h = false, pad_w = false;
        std::size_t in_h = 0, in_w = 0;
        Tensor x;   // padded (H,W,C) input
        Tensor pre_e1a, post_e1a, pre_e1b, post_e1b;
        Tensor pooled;
        std::vector<std::uint8_t> pool_idx;
        Tensor pre_e2a, post_e2a, pre_e2b, post_e2b;
        Tensor cat;
        Tensor pre_d1a, post_d1a, pre_d1b, post_d1b;
    };

    Tensor forward(const Tensor& input) const {
        Cache cache;
        return forward(input, cache);
    }

    Tensor forward(const Tensor& input, Cache& c) const {
        Tensor x = netops::as_hwc(input);
        std::size_t h = x.dim(0), w = x.dim(1);
        if (h < 4 || w < 4) throw ShapeTooSmall("model input must be at least 4x4");
        c.in_h = h;
        c.in_w = w;
        c.pad_h = (h % 2) != 0;
        c.pad_w = (w % 2) != 0;
        if (c.pad_h || c.pad_w) x = netops::pad_even(x, c.pad_h, c.pad_w);
        c.x = std::move(x);

        c.pre_e1a = enc1a.forward(c.x);
        c.post_e1a = netops::relu(c.pre_e1a);
        c.pre_e1b = enc1b.forward(c.post_e1a);
        c.post_e1b = netops::relu(c.pre_e1b);

        c.pooled = netops::maxpool2(c.post_e1b, c.pool_idx);
        c.pre_e2a = enc2a.forward(c.pooled);
        c.post_e2a = netops::relu(c.pre_e2a);
        c.pre_e2b = enc2b.forward(c.post_e2a);
        c.post_e2b = netops::relu(c.pre_e2b);

        c.cat = netops::concat_channels(netops::upsample_nearest2(c.post_e2b), c.post_e1b);
        c.pre_d1a = dec1a.forward(c.cat);
        c.post_d1a = netops::relu(c.pre_d1a);
        c.pre_d1b = dec1b.forward(c.post_d1a);
        c.post_d1b = netops::relu(c.pre_d1b);

        Tensor out = head.forward(c.post_d1b);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c.x[i];

        c.valid = true;
        if (c.pad_h || c.pad_w) {
            Tensor cropped({c.in_h, c.in_w, static_cast<std::size_t>(cin)});
            const std::size_t pw = out.dim(1), cc = out.dim(2);
            for (std::size_t u = 0; u < c.in_h; ++u)
                std::memcpy(cropped.data() + u * c.in_w * cc, out.data() + u * pw * cc,
                            c.in_w * cc * sizeof(float));
            return netops::match_order(std::move(cropped), input);
        }
        return netops::match_order(std::move(out), input);
    }

    /// Exact gradients w.r.t. every parameter (accumulated into `grads`, which
    /// must match param_blocks() shapes) and optionally the input.
    void backward(const Cache& c, const Tensor& grad_out, ParamGrads& grads, Tensor* gx) const {
        if (!c.valid) throw MissingForwardCache("forward pass must cache activations first");
        if (grads.size() != 14) throw ShapeMismatch("gradient block count mismatch");
        Tensor g = netops::as_hwc(grad_out);
        const std::size_t ph = c.x.dim(0), pw = c.x.dim(1);
        if (c.pad_h || c.pad_w) {
            Tensor gpad({ph, pw, static_cast<std::size_t>(cin)});
            const std::size_t cc = static_cast<std::size_t>(cin);
            for (std::size_t u = 0; u < c.in_h; ++u)
                std::memcpy(gpad.data() + u * pw * cc, g.data() + u * c.in_w * cc,
                            c.in_w * cc * sizeof(float));
            g = std::move(gpad);
        }

        // head
        Tensor g_d1b_post({ph, pw, static_cast<std::size_t>(w1)});
        head.backward(c.post_d1b, g, grads[12], grads[13], &g_d1b_post);
        // dec block
        Tensor g_d1b = netops::relu_backward(c.pre_d1b, g_d1b_post);
        Tensor g_d1a_post({ph, pw, static_cast<std::size_t>(w1)});
        dec1b.backward(c.post_d1a, g_d1b, grads[10], grads[11], &g_d1a_post);
        Tensor g_d1a = netops::relu_backward(c.pre_d1a, g_d1a_post);
        Tensor g_cat({ph, pw, static_cast<std::size_t>(w1 + w2)});
        dec1a.backward(c.cat, g_d1a, grads[8], grads[9], &g_cat);

        Tensor g_up, g_e1_skip;
        netops::split_channels(g_cat, static_cast<std::size_t>(w2), g_up, g_e1_skip);
        Tensor g_e2_post = netops::upsample_nearest2_backward(g_up);

        // enc level 2
        Tensor g_e2b = netops::relu_backward(c.pre_e2b, g_e2_post);
        Tensor g_e2a_post({ph / 2, pw / 2, static_cast<std::size_t>(w2)});
        enc2b.backward(c.post_e2a, g_e2b, grads[6], grads[7], &g_e2a_post);
        Tensor g_e2a = netops::relu_backward(c.pre_e2a, g_e2a_post);
        Tensor g_pooled({ph / 2, pw / 2, static_cast<std::size_t>(w1)});
        enc2a.backward(c.pooled, g_e2a, grads[4], grads[5], &g_pooled);

        Tensor g_e1_post = netops::maxpool2_backward(g_pooled, c.pool_idx, ph, pw);
        for (std::size_t i = 0; i < g_e1_post.size(); ++i) g_e1_post[i] += g_e1_skip[i];

        // enc level 1
        Tensor g_e1b = netops::relu_backward(c.pre_e1b, g_e1_post);
        Tensor g_e1a_post({ph, pw, static_cast<std::size_t>(w1)});
        enc1b.backward(c.post_e1a, g_e1b, grads[2], grads[3], &g_e1a_post);
        Tensor g_e1a = netops::relu_backward(c.pre_e1a, g_e1a_post);

        if (gx) {
            Tensor g_x({ph, pw, static_cast<std::size_t>(cin)});
            enc1a.backward(c.x, g_e1a, grads[0], grads[1], &g_x);
            for (std::size_t i = 0; i < g_x.size(); ++i) g_x[i] += g[i]; // residual path
            if (c.pad_h || c.pad_w) g_x = netops::pad_even_backward(g_x, c.in_h, c.in_w);
            *gx = std::move(g_x);
        } else {
            enc1a.backward(c.x, g_e1a, grads[0], grads[1], nullptr);
        }
    }
};

/// Single 3x3 convolution with bias, no activation, no residual.
struct LinearConv {
    static constexpr std::uint8_t kArchCode = 1;

    Conv2d conv;

    LinearConv() : LinearConv(1, 3) {}
    LinearConv(int cin, int k) : conv(k, cin, cin) {}

    int in_channels() const { return conv.cin; }
    std::array<std::uint32_t, 3> arch_params() const {
        return {static_cast<std::uint32_t>(conv.cin), static_cast<std::uint32_t>(conv.k), 0};
    }
    static LinearConv from_arch(const std::array<std::uint32_t, 3>& a) {
        return LinearConv(static_cast<int>(a[0]), static_cast<int>(a[1]));
    }

    void init(std::uint64_t seed) { conv.init_he_uniform(CounterRng(seed), 1); }

    std::vector<std::vector<float>*> param_blocks() { return {&conv.w, &conv.b}; }
    std::vector<const std::vector<float>*> param_blocks() const { return {&conv.w, &conv.b}; }

    struct Cache {
        bool valid = false;
        Tensor x;
    };

    Tensor forward(const Tensor& input) const {
        Cache cache;
        return forward(input, cache);
    }
    Tensor forward(const Tensor& input, Cache& c) const {
        c.x = netops::as_hwc(input);
        c.valid = true;
        return netops::match_order(conv.forward(c.x), input);
    }
    void backward(const Cache& c, const Tensor& grad_out, ParamGrads& grads, Tensor* gx) const {
        if (!c.valid) throw MissingForwardCache("forward pass must cache activations first");
        if (grads.size() != 2) throw ShapeMismatch("gradient block count mismatch");
        const Tensor g = netops::as_hwc(grad_out);
        if (gx) *gx = Tensor({c.x.dim(0), c.x.dim(1), c.x.dim(2)});
        conv.backward(c.x, g, grads[0], grads[1], gx);
    }
};

/// Predicts a single learnable constant regardless of the input.
struct ConstantModel {
    static constexpr std::uint8_t kArchCode = 2;

    std::vector<float> value{0.0f};

    int in_channels() const { return 1; }
    std::array<std::uint32_t, 3> arch_params() const { return {0, 0, 0}; }
    static ConstantModel from_arch(const std::array<std::uint32_t, 3>&) { return ConstantModel{}; }
    void init(std::uint64_t) { value[0] = 0.0f; }

    std::vector<std::vector<float>*> param_blocks() { return {&value}; }
    std::vector<const std::vector<float>*> param_blocks() const { return {&value}; }

    struct Cache {
        bool valid = false;
        std::vector<std::size_t> dims;
    };

    Tensor forward(const Tensor& input) const {
        Cache cache;
        return forward(input, cache);
    }
    Tensor forward(const Tensor& input, Cache& c) const {
        c.dims = input.dims();
        c.valid = true;
        Tensor out(input.dims(), input.domain());
        std::fill(out.values().begin(), out.values().end(), value[0]);
        return out;
    }
    void backward(const Cache& c, const Tensor& grad_out, ParamGrads& grads, Tensor*) const {
        if (!c.valid) throw MissingForwardCache("forward pass must cache activations first");
        double acc = 0.0;
        for (std::size_t i = 0; i < grad_out.size(); ++i) acc += grad_out[i];
        grads[0][0] += static_cast<float>(acc);
    }
};

template <class Model>
ParamGrads make_zero_grads(const Model& m) {
    ParamGrads g;
    for (const auto* blk : m.param_blocks()) g.emplace_back(blk->size(), 0.0f);
    return g;
}

} // namespace n2s
