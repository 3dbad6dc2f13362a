#pragma once

// Central-difference gradient checking for small CNNs, shared by the unit
// tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "falldet/cnn.hpp"
#include "falldet/loss.hpp"
#include "oracles.hpp"

namespace gradcheck {

inline falldet::Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> normal;
    falldet::Matrix m(r, c);
    for (auto& v : m.values()) v = normal(rng);
    return m;
}

/// True when no ReLU input or pooling comparison sits within `margin` of a
/// kink, so a finite difference does not cross one.
inline bool smooth_at(const falldet::CnnModel& m, const falldet::Matrix& x, double margin) {
    using namespace falldet;
    const auto& s = m.shape;
    const auto pre = conv2d_forward(x, m.conv_weights, m.conv_bias, s.filters, s.kernel_h, s.kernel_w);
    for (double v : pre)
        if (std::abs(v) < margin) return false;
    const auto act = relu(pre);
    const std::size_t ch = s.conv_h(), cw = s.conv_w();
    for (std::size_t f = 0; f < s.filters; ++f)
        for (std::size_t ph = 0; ph < s.pooled_h(); ++ph)
            for (std::size_t pw = 0; pw < s.pooled_w(); ++pw) {
                std::vector<double> region;
                for (std::size_t i = 0; i < s.pool_h; ++i)
                    for (std::size_t j = 0; j < s.pool_w; ++j)
                        region.push_back(act[f * ch * cw + (ph * s.pool_h + i) * cw + pw * s.pool_w + j]);
                std::sort(region.begin(), region.end());
                const double top = region.back();
                const double next = region.size() > 1 ? region[region.size() - 2] : -1.0;
                if (top > 0.0 && top - next < margin) return false;
            }
    return true;
}

/// Random parameters (biases included) and a random input, redrawn until the
/// model is smooth at that input.
inline falldet::CnnModel smooth_model(std::mt19937_64& rng, const falldet::CnnShape& shape, falldet::Matrix& input) {
    while (true) {
        falldet::CnnModel m = falldet::init_cnn(shape, rng());
        std::normal_distribution<double> normal(0.0, 0.3);
        for (auto& b : m.conv_bias) b = normal(rng);
        m.dense_bias = normal(rng);
        input = random_matrix(rng, shape.in_h, shape.in_w);
        if (smooth_at(m, input, 1e-2)) return m;
    }
}

/// Max relative error between analytic and central-difference (h = 1e-4)
/// gradients over every parameter.
inline double gradient_check(falldet::CnnModel m, const falldet::Matrix& x, int y, falldet::LossKind kind) {
    using namespace falldet;
    const FocalParams focal;
    CnnGradients g(m.shape);
    cnn_backward(m, x, y, kind, focal, g);
    const double h = 1e-4;
    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + h;
        const double up = loss(kind, cnn_forward(m, x), y, focal);
        param = saved - h;
        const double down = loss(kind, cnn_forward(m, x), y, focal);
        param = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, oracle::relative_error(analytic, numeric, 1e-7));
    };
    for (std::size_t i = 0; i < m.conv_weights.size(); ++i) probe(m.conv_weights[i], g.conv_weights[i]);
    for (std::size_t i = 0; i < m.conv_bias.size(); ++i) probe(m.conv_bias[i], g.conv_bias[i]);
    for (std::size_t i = 0; i < m.dense_weights.size(); ++i) probe(m.dense_weights[i], g.dense_weights[i]);
    probe(m.dense_bias, g.dense_bias);
    return worst;
}

}  // namespace gradcheck
