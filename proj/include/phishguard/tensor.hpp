#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phishguard/error.hpp"
#include "phishguard/fp16.hpp"

namespace phishguard {

enum class DType : std::uint8_t { f32 = 0, f16 = 1 };

constexpr std::size_t dtype_size(DType d) noexcept { return d == DType::f16 ? 2 : 4; }
constexpr const char* to_string(DType d) noexcept { return d == DType::f16 ? "f16" : "f32"; }

/// Product of extents; throws dim-overflow when it does not fit in size_t.
inline std::size_t element_count(std::span<const std::size_t> dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw Error(ErrorCode::invalid_dims, "tensor extents must be positive");
        if (n > std::numeric_limits<std::size_t>::max() / d)
            throw Error(ErrorCode::dim_overflow, "element count overflows size_t");
        n *= d;
    }
    return n;
}

/// Dense row-major tensor. Storage is always widened to float; `dtype` records
/// the precision the values live on. An f16 tensor only ever holds values that
/// are exactly representable in binary16.
class Tensor {
public:
    Tensor() = default;

    Tensor(std::vector<std::size_t> dims, std::vector<float> data, DType dtype = DType::f32)
        : dims_(std::move(dims)), data_(std::move(data)), dtype_(dtype) {
        if (element_count(dims_) != data_.size())
            throw Error(ErrorCode::shape_mismatch, "buffer length " + std::to_string(data_.size()) +
                                                       " does not match extents (" + shape_string() + ")");
        for (float& v : data_) {
            if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "tensor contains NaN or Inf");
            if (dtype_ == DType::f16) {
                v = round_to_half(v);
                if (!std::isfinite(v))
                    throw Error(ErrorCode::overflow_to_infinity, "value exceeds the f16 range");
            }
        }
    }

    static Tensor zeros(std::vector<std::size_t> dims, DType dtype = DType::f32) {
        const std::size_t n = element_count(dims);
        return Tensor(std::move(dims), std::vector<float>(n, 0.0f), dtype);
    }

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
    std::size_t size() const noexcept { return data_.size(); }
    DType dtype() const noexcept { return dtype_; }
    std::span<const float> data() const noexcept { return data_; }
    float operator[](std::size_t i) const noexcept { return data_[i]; }

    std::string shape_string() const {
        std::string s;
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (i) s += 'x';
            s += std::to_string(dims_[i]);
        }
        return s.empty() ? "scalar" : s;
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> dims_{};
    std::vector<float> data_{};
    DType dtype_ = DType::f32;
};

/// Named tensors in insertion order. Insertion order is the serialization order.
class WeightStore {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    WeightStore() = default;

    void insert(std::string name, Tensor tensor) {
        if (name.empty() || name.size() > std::numeric_limits<std::uint16_t>::max())
            throw Error(ErrorCode::invalid_name, "tensor name must be 1..65535 bytes");
        for (unsigned char c : name)
            if (c < 0x20 || c > 0x7e) throw Error(ErrorCode::invalid_name, "tensor name '" + name + "' is not printable ASCII");
        if (index_.contains(name)) throw Error(ErrorCode::duplicate_name, "tensor '" + name + "' already present");
        index_.emplace(name, entries_.size());
        entries_.emplace_back(std::move(name), std::move(tensor));
    }

    const Tensor* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &entries_[it->second].second;
    }

    const Tensor& at(const std::string& name) const {
        if (const Tensor* t = find(name)) return *t;
        throw Error(ErrorCode::missing_weight, "tensor '" + name + "' not found");
    }

    bool contains(const std::string& name) const { return index_.contains(name); }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<std::pair<std::string, Tensor>>& entries() const noexcept { return entries_; }

    std::uint32_t format_version() const noexcept { return format_version_; }

    friend bool operator==(const WeightStore& a, const WeightStore& b) {
        return a.format_version_ == b.format_version_ && a.entries_ == b.entries_;
    }

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::uint32_t format_version_ = kFormatVersion;
};

/// Converts every tensor to `target` with round-to-nearest-even.
inline WeightStore quantize(const WeightStore& store, DType target) {
    WeightStore out;
    for (const auto& [name, tensor] : store.entries()) {
        std::vector<float> values(tensor.data().begin(), tensor.data().end());
        try {
            out.insert(name, Tensor(tensor.dims(), std::move(values), target));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::overflow_to_infinity)
                throw Error(ErrorCode::overflow_to_infinity, "tensor '" + name + "' has a value beyond the f16 range");
            throw;
        }
    }
    return out;
}

} // namespace phishguard
