#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "falldet/loss.hpp"
#include "falldet/matrix.hpp"

namespace falldet {

/// Conv2D (valid, stride 1) -> ReLU -> MaxPool2D -> flatten -> dense -> sigmoid.
/// Defaults are the tuned architecture for (63, 251) spectrograms.
struct CnnShape {
    std::size_t in_h = 63;
    std::size_t in_w = 251;
    std::size_t filters = 240;
    std::size_t kernel_h = 63;
    std::size_t kernel_w = 145;
    std::size_t pool_h = 1;
    std::size_t pool_w = 4;

    std::size_t conv_h() const { return in_h - kernel_h + 1; }
    std::size_t conv_w() const { return in_w - kernel_w + 1; }
    std::size_t pooled_h() const { return conv_h() / pool_h; }
    std::size_t pooled_w() const { return conv_w() / pool_w; }
    std::size_t kernel_size() const { return kernel_h * kernel_w; }
    /// Dense input length, filter-major then row-major over the pooled map.
    std::size_t flat_len() const { return filters * pooled_h() * pooled_w(); }
    std::size_t param_count() const { return filters * kernel_size() + filters + flat_len() + 1; }

    /// Throws InvalidArgument when the kernel does not fit or pooling leaves nothing.
    void validate() const;
    bool operator==(const CnnShape&) const = default;
};

struct CnnModel {
    CnnShape shape;
    std::vector<double> conv_weights;  // filters x kernel_h x kernel_w
    std::vector<double> conv_bias;     // filters
    std::vector<double> dense_weights; // flat_len
    double dense_bias = 0.0;
    /// Inputs are mapped to (x - input_mean) / input_scale before the conv.
    double input_mean = 0.0;
    double input_scale = 1.0;
    /// Stage-2 decision threshold chosen at training time.
    double threshold = 0.5;

    /// All parameters zero.
    explicit CnnModel(const CnnShape& s = {});
    void validate() const;
    bool operator==(const CnnModel&) const = default;
};

/// He-style uniform initialization, limit sqrt(6 / fan_in); biases zero.
CnnModel init_cnn(const CnnShape& shape, std::uint64_t seed);

/// Valid cross-correlation (no kernel flip) plus per-filter bias. Output is
/// filters x (H - kh + 1) x (W - kw + 1), flattened filter-major.
std::vector<double> conv2d_forward(const Matrix& input, std::span<const double> weights,
                                   std::span<const double> bias, std::size_t filters,
                                   std::size_t kernel_h, std::size_t kernel_w);

void relu_inplace(std::span<double> x);
std::vector<double> relu(std::span<const double> x);

struct PoolResult {
    std::vector<double> values;
    /// Flat index into the input maps of each pooled maximum (first on ties).
    std::vector<std::size_t> argmax;
    std::size_t out_h = 0;
    std::size_t out_w = 0;
};

/// Non-overlapping max pooling over `maps` maps of h x w; trailing rows and
/// columns that do not fill a region are dropped.
PoolResult maxpool2d(std::span<const double> input, std::size_t maps, std::size_t h, std::size_t w,
                     std::size_t pool_h, std::size_t pool_w);

struct ForwardCache {
    std::vector<double> conv;  // post-ReLU activations
    PoolResult pool;
    double logit = 0.0;
    double score = 0.5;
};

ForwardCache cnn_forward_cached(const CnnModel& model, const Matrix& input);
double cnn_forward(const CnnModel& model, const Matrix& input);
double cnn_logit(const CnnModel& model, const Matrix& input);

/// Same layout as the model's parameter tensors.
struct CnnGradients {
    std::vector<double> conv_weights;
    std::vector<double> conv_bias;
    std::vector<double> dense_weights;
    double dense_bias = 0.0;

    explicit CnnGradients(const CnnShape& s = {});
    void zero();
    void add(const CnnGradients& other);
    void scale(double factor);
};

/// Reverse-mode gradients of loss(kind, cnn_forward(input), label) with
/// respect to every parameter; accumulated into `grads`. Returns the loss.
double cnn_backward(const CnnModel& model, const Matrix& input, int label, LossKind kind,
                    const FocalParams& focal, CnnGradients& grads);

}  // namespace falldet
