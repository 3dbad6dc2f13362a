#include "falldet/optim.hpp"

#include <cmath>

#include "falldet/error.hpp"

namespace falldet {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
    if (grads.size() != params.size()) throw InvalidArgument("adam: gradient size does not match parameters");
    if (state.m.empty() && state.v.empty() && state.step == 0) state = AdamState(params.size());
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw InvalidArgument("adam: state size does not match parameters");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate) {
    if (grads.size() != params.size()) throw InvalidArgument("sgd: gradient size does not match parameters");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grads[i];
}

}  // namespace falldet
