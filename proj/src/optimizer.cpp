#include "amil/optimizer.hpp"

#include <cmath>

#include "amil/errors.hpp"

namespace amil::net {

AdamState::AdamState(std::size_t n_params, AdamConfig config)
    : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grad, double lr) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw ShapeError("adam state does not match the parameter vector");
    for (double g : grad)
        if (!std::isfinite(g))
            throw InvalidValueError("non-finite gradient in adam step");

    ++t_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        const double g = grad[i];
        m_[i] = b1 * m_[i] + (1.0 - b1) * g;
        v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
}

} // namespace amil::net
