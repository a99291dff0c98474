#include "ccae/nadam.hpp"

#include <cmath>

#include "ccae/errors.hpp"

namespace ccae {

Nadam::Nadam(const std::vector<ParamRef>& params, NadamConfig config)
    : config_(config) {
    if (!(config_.learning_rate > 0)) throw ConfigError("nadam learning rate must be > 0");
    if (!(config_.beta1 > 0 && config_.beta1 < 1) ||
        !(config_.beta2 > 0 && config_.beta2 < 1))
        throw ConfigError("nadam betas must lie in (0,1)");
    if (!(config_.epsilon > 0)) throw ConfigError("nadam epsilon must be > 0");
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
        m_.push_back(Tensor::zeros(p.value->shape));
        v_.push_back(Tensor::zeros(p.value->shape));
    }
}

void Nadam::step(const std::vector<ParamRef>& params) {
    if (params.size() != m_.size())
        throw ShapeError("nadam parameter list changed size");
    const double t = static_cast<double>(step_ + 1);
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double b1_t = std::pow(b1, t);
    const double b1_t1 = b1_t * b1;
    const double b2_t = std::pow(b2, t);
    const double lr = config_.learning_rate, eps = config_.epsilon;

    for (std::size_t i = 0; i < params.size(); ++i) {
        const ParamRef& p = params[i];
        if (!p.trainable) continue;
        if (!p.value->same_shape(m_[i]))
            throw ShapeError("nadam moment/parameter shape mismatch for " + p.name);
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (std::size_t j = 0; j < p.value->size(); ++j) {
            const double g = (*p.grad)[j];
            if (!std::isfinite(g))
                throw DivergenceError("non-finite gradient in " + p.name);
            m[j] = b1 * m[j] + (1.0 - b1) * g;
            v[j] = b2 * v[j] + (1.0 - b2) * g * g;
            const double m_bar =
                b1 * m[j] / (1.0 - b1_t1) + (1.0 - b1) * g / (1.0 - b1_t);
            const double v_hat = v[j] / (1.0 - b2_t);
            (*p.value)[j] -= lr * m_bar / (std::sqrt(v_hat) + eps);
        }
    }
    ++step_;
}

} // namespace ccae
