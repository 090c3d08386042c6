#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "phishguard/error.hpp"
#include "phishguard/tensor.hpp"

namespace phishguard {

enum class Activation { relu, none };

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation = Activation::none;
};

/// Fully connected stack. Layer i reads "layer{i}.w" (in x out) and
/// "layer{i}.b" (out) from a WeightStore. Dropout is training metadata and is
/// never applied at inference.
struct MlpSpec {
    std::vector<LayerSpec> layers;
    double dropout_rate = 0.0;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }

    void validate() const {
        if (layers.empty()) throw Error(ErrorCode::invalid_argument, "MLP needs at least one layer");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
            throw Error(ErrorCode::invalid_argument, "dropout_rate must lie in [0,1)");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (layers[i].in_dim == 0 || layers[i].out_dim == 0)
                throw Error(ErrorCode::invalid_argument, "layer " + std::to_string(i) + " has a zero dimension");
            if (i + 1 < layers.size() && layers[i].out_dim != layers[i + 1].in_dim)
                throw Error(ErrorCode::shape_mismatch, "layer " + std::to_string(i) + " output does not feed layer " +
                                                           std::to_string(i + 1));
        }
        if (layers.back().activation != Activation::none)
            throw Error(ErrorCode::invalid_argument, "final layer must emit raw logits");
    }

    /// Derives the layer list from the weight shapes: ReLU between layers, none on the last.
    static MlpSpec from_weights(const WeightStore& weights, double dropout_rate = 0.0) {
        MlpSpec spec;
        spec.dropout_rate = dropout_rate;
        for (std::size_t i = 0;; ++i) {
            const Tensor* w = weights.find("layer" + std::to_string(i) + ".w");
            if (!w) break;
            if (w->rank() != 2)
                throw Error(ErrorCode::shape_mismatch, "layer" + std::to_string(i) + ".w must be rank 2");
            spec.layers.push_back({w->dim(0), w->dim(1), Activation::relu});
        }
        if (spec.layers.empty()) throw Error(ErrorCode::missing_weight, "tensor 'layer0.w' not found");
        spec.layers.back().activation = Activation::none;
        spec.validate();
        return spec;
    }
};

/// Per layer y = activation(x W + b), batched over the leading axis of `input`.
/// Dot products accumulate in double in a fixed order, so the result depends
/// only on the arguments.
inline Tensor mlp_forward(const MlpSpec& spec, const WeightStore& weights, const Tensor& input) {
    spec.validate();
    if (input.rank() != 2 || input.dim(1) != spec.input_dim())
        throw Error(ErrorCode::shape_mismatch, "input " + input.shape_string() + " does not match MLP input dim " +
                                                   std::to_string(spec.input_dim()));
    const std::size_t batch = input.dim(0);

    std::vector<float> x(input.data().begin(), input.data().end());
    std::vector<double> acc;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerSpec& layer = spec.layers[li];
        const std::string prefix = "layer" + std::to_string(li);
        const Tensor& w = weights.at(prefix + ".w");
        const Tensor& b = weights.at(prefix + ".b");
        if (w.dims() != std::vector<std::size_t>{layer.in_dim, layer.out_dim})
            throw Error(ErrorCode::shape_mismatch, prefix + ".w is " + w.shape_string() + ", expected " +
                                                       std::to_string(layer.in_dim) + "x" + std::to_string(layer.out_dim));
        if (b.dims() != std::vector<std::size_t>{layer.out_dim})
            throw Error(ErrorCode::shape_mismatch, prefix + ".b is " + b.shape_string() + ", expected " +
                                                       std::to_string(layer.out_dim));

        const auto wd = w.data();
        const auto bd = b.data();
        std::vector<float> y(batch * layer.out_dim);
        acc.assign(layer.out_dim, 0.0);
        for (std::size_t n = 0; n < batch; ++n) {
            std::fill(acc.begin(), acc.end(), 0.0);
            const float* row = x.data() + n * layer.in_dim;
            for (std::size_t i = 0; i < layer.in_dim; ++i) {
                const double xi = row[i];
                if (xi == 0.0) continue;
                const float* wrow = wd.data() + i * layer.out_dim;
                for (std::size_t j = 0; j < layer.out_dim; ++j) acc[j] += xi * static_cast<double>(wrow[j]);
            }
            for (std::size_t j = 0; j < layer.out_dim; ++j) {
                double v = acc[j] + static_cast<double>(bd[j]);
                if (layer.activation == Activation::relu) v = std::max(v, 0.0);
                y[n * layer.out_dim + j] = static_cast<float>(v);
            }
        }
        x = std::move(y);
    }
    for (float v : x)
        if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "MLP produced a non-finite output");
    return Tensor({batch, spec.output_dim()}, std::move(x));
}

/// Row-wise softmax over a (B, C) tensor, max-subtracted.
inline Tensor softmax(const Tensor& logits) {
    if (logits.rank() != 2) throw Error(ErrorCode::shape_mismatch, "softmax expects a (B, C) tensor");
    const std::size_t rows = logits.dim(0), cols = logits.dim(1);
    std::vector<float> out(rows * cols);
    std::vector<double> e(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const float* row = logits.data().data() + r * cols;
        const double mx = *std::max_element(row, row + cols);
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) sum += (e[c] = std::exp(static_cast<double>(row[c]) - mx));
        for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = static_cast<float>(e[c] / sum);
    }
    return Tensor({rows, cols}, std::move(out));
}

/// Index of the largest element of a row; lowest index on ties.
inline std::size_t argmax(std::span<const float> row) {
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

} // namespace phishguard
