#include "falldet/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "falldet/error.hpp"
#include "falldet/random.hpp"

namespace falldet {

void CnnShape::validate() const {
    if (in_h == 0 || in_w == 0 || filters == 0 || kernel_h == 0 || kernel_w == 0 || pool_h == 0 || pool_w == 0)
        throw InvalidArgument("CNN dimensions must be non-zero");
    if (kernel_h > in_h || kernel_w > in_w)
        throw InvalidArgument("kernel (" + std::to_string(kernel_h) + ", " + std::to_string(kernel_w) +
                              ") larger than input (" + std::to_string(in_h) + ", " + std::to_string(in_w) + ")");
    if (pooled_h() == 0 || pooled_w() == 0) throw InvalidArgument("pooling region larger than the conv output");
}

CnnModel::CnnModel(const CnnShape& s)
    : shape(s),
      conv_weights(s.filters * s.kernel_size(), 0.0),
      conv_bias(s.filters, 0.0),
      dense_weights(s.flat_len(), 0.0) {}

void CnnModel::validate() const {
    shape.validate();
    if (conv_weights.size() != shape.filters * shape.kernel_size() || conv_bias.size() != shape.filters ||
        dense_weights.size() != shape.flat_len())
        throw InvalidArgument("CNN parameter sizes do not match its shape");
    if (!(input_scale > 0.0)) throw InvalidArgument("CNN input scale must be positive");
}

CnnModel init_cnn(const CnnShape& shape, std::uint64_t seed) {
    shape.validate();
    CnnModel m(shape);
    Rng rng(seed);
    const double conv_limit = std::sqrt(6.0 / static_cast<double>(shape.kernel_size()));
    std::uniform_real_distribution<double> conv(-conv_limit, conv_limit);
    for (auto& w : m.conv_weights) w = conv(rng);
    const double dense_limit = std::sqrt(6.0 / static_cast<double>(shape.flat_len()));
    std::uniform_real_distribution<double> dense(-dense_limit, dense_limit);
    for (auto& w : m.dense_weights) w = dense(rng);
    return m;
}

std::vector<double> conv2d_forward(const Matrix& input, std::span<const double> weights,
                                   std::span<const double> bias, std::size_t filters,
                                   std::size_t kernel_h, std::size_t kernel_w) {
    const std::size_t H = input.rows(), W = input.cols();
    if (kernel_h == 0 || kernel_w == 0 || kernel_h > H || kernel_w > W)
        throw InvalidArgument("convolution kernel larger than input");
    if (weights.size() != filters * kernel_h * kernel_w || bias.size() != filters)
        throw InvalidArgument("convolution parameter sizes do not match");
    const std::size_t oh = H - kernel_h + 1, ow = W - kernel_w + 1;
    std::vector<double> out(filters * oh * ow);
    const double* in = input.values().data();
    for (std::size_t k = 0; k < filters; ++k) {
        const double* wk = weights.data() + k * kernel_h * kernel_w;
        for (std::size_t oy = 0; oy < oh; ++oy) {
            double* dst = out.data() + (k * oh + oy) * ow;
            std::fill(dst, dst + ow, bias[k]);
            for (std::size_t ky = 0; ky < kernel_h; ++ky) {
                const double* src_row = in + (oy + ky) * W;
                for (std::size_t kx = 0; kx < kernel_w; ++kx) {
                    const double wv = wk[ky * kernel_w + kx];
                    const double* src = src_row + kx;
                    for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] += wv * src[ox];
                }
            }
        }
    }
    return out;
}

void relu_inplace(std::span<double> x) {
    for (auto& v : x) v = v > 0.0 ? v : 0.0;
}

std::vector<double> relu(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    relu_inplace(out);
    return out;
}

PoolResult maxpool2d(std::span<const double> input, std::size_t maps, std::size_t h, std::size_t w,
                     std::size_t pool_h, std::size_t pool_w) {
    if (pool_h == 0 || pool_w == 0) throw InvalidArgument("pool region must be non-zero");
    if (input.size() != maps * h * w) throw InvalidArgument("pool input size does not match its shape");
    PoolResult r;
    r.out_h = h / pool_h;
    r.out_w = w / pool_w;
    r.values.resize(maps * r.out_h * r.out_w);
    r.argmax.resize(r.values.size());
    std::size_t o = 0;
    for (std::size_t m = 0; m < maps; ++m) {
        for (std::size_t py = 0; py < r.out_h; ++py) {
            for (std::size_t px = 0; px < r.out_w; ++px, ++o) {
                std::size_t best = (m * h + py * pool_h) * w + px * pool_w;
                for (std::size_t dy = 0; dy < pool_h; ++dy) {
                    for (std::size_t dx = 0; dx < pool_w; ++dx) {
                        const std::size_t idx = (m * h + py * pool_h + dy) * w + px * pool_w + dx;
                        if (input[idx] > input[best]) best = idx;
                    }
                }
                r.values[o] = input[best];
                r.argmax[o] = best;
            }
        }
    }
    return r;
}

namespace {

Matrix normalized_input(const CnnModel& model, const Matrix& input) {
    if (input.rows() != model.shape.in_h || input.cols() != model.shape.in_w)
        throw InvalidArgument("input shape (" + std::to_string(input.rows()) + ", " + std::to_string(input.cols()) +
                              ") does not match model (" + std::to_string(model.shape.in_h) + ", " +
                              std::to_string(model.shape.in_w) + ")");
    if (model.input_mean == 0.0 && model.input_scale == 1.0) return input;
    Matrix x = input;
    for (auto& v : x.values()) v = (v - model.input_mean) / model.input_scale;
    return x;
}

ForwardCache forward_normalized(const CnnModel& model, const Matrix& x) {
    const CnnShape& s = model.shape;
    ForwardCache c;
    c.conv = conv2d_forward(x, model.conv_weights, model.conv_bias, s.filters, s.kernel_h, s.kernel_w);
    relu_inplace(c.conv);
    c.pool = maxpool2d(c.conv, s.filters, s.conv_h(), s.conv_w(), s.pool_h, s.pool_w);
    double z = model.dense_bias;
    for (std::size_t i = 0; i < c.pool.values.size(); ++i) z += model.dense_weights[i] * c.pool.values[i];
    c.logit = z;
    c.score = sigmoid(z);
    return c;
}

}  // namespace

ForwardCache cnn_forward_cached(const CnnModel& model, const Matrix& input) {
    return forward_normalized(model, normalized_input(model, input));
}

double cnn_forward(const CnnModel& model, const Matrix& input) { return cnn_forward_cached(model, input).score; }

double cnn_logit(const CnnModel& model, const Matrix& input) { return cnn_forward_cached(model, input).logit; }

CnnGradients::CnnGradients(const CnnShape& s)
    : conv_weights(s.filters * s.kernel_size(), 0.0), conv_bias(s.filters, 0.0), dense_weights(s.flat_len(), 0.0) {}

void CnnGradients::zero() {
    std::fill(conv_weights.begin(), conv_weights.end(), 0.0);
    std::fill(conv_bias.begin(), conv_bias.end(), 0.0);
    std::fill(dense_weights.begin(), dense_weights.end(), 0.0);
    dense_bias = 0.0;
}

void CnnGradients::add(const CnnGradients& o) {
    for (std::size_t i = 0; i < conv_weights.size(); ++i) conv_weights[i] += o.conv_weights[i];
    for (std::size_t i = 0; i < conv_bias.size(); ++i) conv_bias[i] += o.conv_bias[i];
    for (std::size_t i = 0; i < dense_weights.size(); ++i) dense_weights[i] += o.dense_weights[i];
    dense_bias += o.dense_bias;
}

void CnnGradients::scale(double f) {
    for (auto& g : conv_weights) g *= f;
    for (auto& g : conv_bias) g *= f;
    for (auto& g : dense_weights) g *= f;
    dense_bias *= f;
}

double cnn_backward(const CnnModel& model, const Matrix& input, int label, LossKind kind,
                    const FocalParams& focal, CnnGradients& grads) {
    const CnnShape& s = model.shape;
    const Matrix x = normalized_input(model, input);
    const ForwardCache c = forward_normalized(model, x);
    const double dz = loss_gradient(kind, c.score, label, focal);

    grads.dense_bias += dz;
    const std::size_t conv_plane = s.conv_h() * s.conv_w();
    const std::size_t ow = s.conv_w();
    const std::size_t W = s.in_w;
    const double* in = x.values().data();
    for (std::size_t i = 0; i < c.pool.values.size(); ++i) {
        grads.dense_weights[i] += dz * c.pool.values[i];
        // Pool routes to its argmax; ReLU passes only strictly positive activations.
        const std::size_t src = c.pool.argmax[i];
        if (!(c.conv[src] > 0.0)) continue;
        const double g = dz * model.dense_weights[i];
        const std::size_t k = src / conv_plane;
        const std::size_t oy = (src % conv_plane) / ow;
        const std::size_t ox = src % ow;
        grads.conv_bias[k] += g;
        double* gw = grads.conv_weights.data() + k * s.kernel_size();
        for (std::size_t ky = 0; ky < s.kernel_h; ++ky) {
            const double* row = in + (oy + ky) * W + ox;
            double* gw_row = gw + ky * s.kernel_w;
            for (std::size_t kx = 0; kx < s.kernel_w; ++kx) gw_row[kx] += g * row[kx];
        }
    }
    return loss(kind, c.score, label, focal);
}

}  // namespace falldet
