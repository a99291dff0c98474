#ifndef CCAE_NADAM_HPP
#define CCAE_NADAM_HPP

#include <cstdint>
#include <vector>

#include "ccae/layers.hpp"
#include "ccae/tensor.hpp"

namespace ccae {

struct NadamConfig {
    double learning_rate = 2e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Nesterov-accelerated Adam. Step t (1-based) applies, per parameter x with
/// gradient g:
///   m <- b1 m + (1-b1) g
///   v <- b2 v + (1-b2) g^2
///   x <- x - lr * (b1 m / (1 - b1^(t+1)) + (1-b1) g / (1 - b1^t))
///             / (sqrt(v / (1 - b2^t)) + eps)
/// i.e. the bias-corrected first moment is replaced by its Nesterov
/// look-ahead combination with the current gradient.
class Nadam {
public:
    Nadam(const std::vector<ParamRef>& params, NadamConfig config = {});

    /// One update over the same parameter list the optimizer was built from
    /// (shapes are checked). Throws DivergenceError on non-finite gradients.
    void step(const std::vector<ParamRef>& params);

    std::uint64_t step_count() const { return step_; }
    const NadamConfig& config() const { return config_; }

    std::vector<Tensor>& first_moments() { return m_; }
    std::vector<Tensor>& second_moments() { return v_; }
    const std::vector<Tensor>& first_moments() const { return m_; }
    const std::vector<Tensor>& second_moments() const { return v_; }
    void set_step_count(std::uint64_t t) { step_ = t; }

private:
    NadamConfig config_;
    std::uint64_t step_ = 0;
    std::vector<Tensor> m_, v_;
};

} // namespace ccae

#endif
