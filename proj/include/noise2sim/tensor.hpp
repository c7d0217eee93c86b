// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "noise2sim/errors.hpp"

namespace n2s {

/// Value semantics of the stored samples. UnitInterval images live in [0,1],
/// Hounsfield values are kept unscaled so HU thresholds apply directly.
enum class Domain : std::uint8_t { UnitInterval = 0, Hounsfield = 1, Raw = 2 };

/// Semantic tag per tensor dimension.
enum class Axis : std::uint8_t { Height = 0, Width = 1, Channel = 2, Slice = 3 };

inline const char* to_string(Domain d) {
    switch (d) {
        case Domain::UnitInterval: return "unit";
        case Domain::Hounsfield: return "hu";
        default: return "raw";
    }
}

/// Dense row-major float tensor of order 1..4, last dimension fastest.
/// Immutable-by-convention after construction: library functions never
/// mutate their inputs, so tensors can be shared read-only across threads.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> dims, Domain domain = Domain::Raw)
        : dims_(std::move(dims)), domain_(domain) {
        validate_dims();
        data_.assign(element_count(), 0.0f);
        labels_ = default_labels(dims_.size());
    }

    Tensor(std::vector<std::size_t> dims, std::vector<float> data, Domain domain = Domain::Raw)
        : dims_(std::move(dims)), data_(std::move(data)), domain_(domain) {
        validate_dims();
        if (data_.size() != element_count())
            throw ShapeMismatch("tensor data length does not match dims product");
        labels_ = default_labels(dims_.size());
    }

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t i) const { return dims_[i]; }
    std::size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& values() { return data_; }
    const std::vector<float>& values() const { return data_; }

    Domain domain() const { return domain_; }
    void set_domain(Domain d) { domain_ = d; }

    const std::vector<Axis>& axis_labels() const { return labels_; }
    void relabel(std::vector<Axis> labels) {
        if (labels.size() != dims_.size())
            throw ShapeMismatch("axis label count does not match tensor order");
        labels_ = std::move(labels);
    }

    float& operator[](std::size_t i) { return data_[i]; }
    float operator[](std::size_t i) const { return data_[i]; }

    // 2D (H,W)
    float& at(std::size_t u, std::size_t v) { return data_[u * dims_[1] + v]; }
    float at(std::size_t u, std::size_t v) const { return data_[u * dims_[1] + v]; }
    // 3D (H,W,C)
    float& at(std::size_t u, std::size_t v, std::size_t c) {
        return data_[(u * dims_[1] + v) * dims_[2] + c];
    }
    float at(std::size_t u, std::size_t v, std::size_t c) const {
        return data_[(u * dims_[1] + v) * dims_[2] + c];
    }

    bool same_shape(const Tensor& o) const { return dims_ == o.dims_; }

    /// Height/width/channel view of a 2D or 3D image tensor (C=1 for 2D).
    void image_dims(std::size_t& h, std::size_t& w, std::size_t& c) const {
        if (order() == 2) {
            h = dims_[0]; w = dims_[1]; c = 1;
        } else if (order() == 3) {
            h = dims_[0]; w = dims_[1]; c = dims_[2];
        } else {
            throw DimMismatch("expected a 2D or 3D image tensor");
        }
    }

    static std::vector<Axis> default_labels(std::size_t order) {
        switch (order) {
            case 1: return {Axis::Width};
            case 2: return {Axis::Height, Axis::Width};
            case 3: return {Axis::Height, Axis::Width, Axis::Channel};
            default: return {Axis::Slice, Axis::Height, Axis::Width, Axis::Channel};
        }
    }

private:
    void validate_dims() const {
        if (dims_.empty() || dims_.size() > 4)
            throw ShapeMismatch("tensor order must be 1..4");
        for (std::size_t d : dims_)
            if (d == 0) throw ShapeMismatch("tensor dims must be positive");
    }

    std::size_t element_count() const {
        std::size_t n = 1;
        for (std::size_t d : dims_) n *= d;
        return n;
    }

    std::vector<std::size_t> dims_;
    std::vector<float> data_;
    Domain domain_ = Domain::Raw;
    std::vector<Axis> labels_;
};

/// Symmetric reflection of index i into [0, n): -1 -> 0, n -> n-1.
inline std::size_t reflect_index(long i, std::size_t n) {
    if (n == 1) return 0;
    const long period = 2 * static_cast<long>(n);
    i %= period;
    if (i < 0) i += period;
    return static_cast<std::size_t>(i < static_cast<long>(n) ? i : period - 1 - i);
}

/// True when the first axis is tagged as the slice direction.
inline bool is_volume(const Tensor& t) {
    return t.order() >= 3 && !t.axis_labels().empty() && t.axis_labels()[0] == Axis::Slice;
}

inline std::size_t slice_count(const Tensor& t) {
    if (!is_volume(t)) throw DimMismatch("tensor is not slice-major; relabel axes first");
    return t.dim(0);
}

/// Extracts slice i of a (S,H,W) or (S,H,W,C) volume as an (H,W) or (H,W,C) image.
inline Tensor extract_slice(const Tensor& vol, std::size_t i) {
    const std::size_t n = slice_count(vol);
    if (i >= n) throw OutOfBounds("slice index out of range");
    const std::size_t stride = vol.size() / n;
    std::vector<std::size_t> dims(vol.dims().begin() + 1, vol.dims().end());
    std::vector<float> data(vol.data() + i * stride, vol.data() + (i + 1) * stride);
    Tensor out(std::move(dims), std::move(data), vol.domain());
    return out;
}

/// Writes an image back into slice i of a volume with matching slice shape.
inline void insert_slice(Tensor& vol, std::size_t i, const Tensor& img) {
    const std::size_t n = slice_count(vol);
    if (i >= n) throw OutOfBounds("slice index out of range");
    const std::size_t stride = vol.size() / n;
    if (img.size() != stride) throw DimMismatch("slice size mismatch");
    std::copy(img.data(), img.data() + stride, vol.data() + i * stride);
}

} // namespace n2s
