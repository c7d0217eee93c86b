// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "noise2sim/net.hpp"

namespace n2s {

/// lr0 * 0.5 * (1 + cos(pi * step / total)).
inline double cosine_lr(long step, long total, double lr0) {
    if (total <= 0 || step < 0 || step > total)
        throw ShapeMismatch("cosine schedule requires 0 <= step <= total, total > 0");
    return lr0 * 0.5 * (1.0 + std::cos(3.14159265358979323846 * static_cast<double>(step) /
                                       static_cast<double>(total)));
}

/// Adam moments plus the cosine schedule state.
struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double lr0 = 5e-4; // initial learning rate
    long horizon = 1;  // schedule length T
    long step = 0;
    std::vector<std::vector<float>> m, v;

    template <class Model>
    static AdamState for_model(const Model& model, double lr0_, long horizon_) {
        AdamState st;
        st.lr0 = lr0_;
        st.horizon = horizon_ > 0 ? horizon_ : 1;
        for (const auto* blk : model.param_blocks()) {
            st.m.emplace_back(blk->size(), 0.0f);
            st.v.emplace_back(blk->size(), 0.0f);
        }
        return st;
    }

    double current_lr() const { return cosine_lr(step < horizon ? step : horizon, horizon, lr0); }
};

/// One bias-corrected Adam update at the current scheduled learning rate.
template <class Model>
void adam_step(Model& model, const ParamGrads& grads, AdamState& st) {
    auto blocks = model.param_blocks();
    if (grads.size() != blocks.size() || st.m.size() != blocks.size())
        throw ShapeMismatch("gradient/optimizer block count mismatch");
    const double lr = st.current_lr();
    const long t = ++st.step;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(t));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto& w = *blocks[b];
        if (grads[b].size() != w.size()) throw ShapeMismatch("gradient block shape mismatch");
        auto& m = st.m[b];
        auto& v = st.v[b];
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double g = grads[b][i];
            const double mi = st.beta1 * m[i] + (1.0 - st.beta1) * g;
            const double vi = st.beta2 * v[i] + (1.0 - st.beta2) * g * g;
            m[i] = static_cast<float>(mi);
            v[i] = static_cast<float>(vi);
            w[i] = static_cast<float>(w[i] - lr * (mi / bc1) / (std::sqrt(vi / bc2) + st.eps));
        }
    }
}

} // namespace n2s
