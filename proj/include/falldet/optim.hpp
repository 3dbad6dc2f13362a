#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace falldet {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment estimates for one parameter tensor.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update of one tensor.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config);

void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate);

}  // namespace falldet
