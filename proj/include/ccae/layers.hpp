#ifndef CCAE_LAYERS_HPP
#define CCAE_LAYERS_HPP

#include <memory>
#include <string>
#include <vector>

#include "ccae/rng.hpp"
#include "ccae/tensor.hpp"

namespace ccae {

enum class Mode { train, infer };
enum class Padding { same, valid };

/// Named view of one parameter tensor and its gradient slot.
struct ParamRef {
    std::string name;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;
    bool trainable = true;
};

/// Non-trainable state that still belongs in a checkpoint (batch-norm
/// running statistics).
struct StateRef {
    std::string name;
    Tensor* value = nullptr;
};

/// One step of a sequential stack. forward() caches whatever backward()
/// needs; backward() consumes the cache, accumulates parameter gradients and
/// returns the gradient w.r.t. its input. A layer instance is owned by a
/// single training loop at a time.
class Layer {
public:
    virtual ~Layer() = default;

    virtual Tensor forward(const Tensor& input, Mode mode) = 0;
    virtual Tensor backward(const Tensor& grad_output) = 0;

    virtual std::vector<ParamRef> params() { return {}; }
    virtual std::vector<StateRef> state() { return {}; }
    virtual std::string kind() const = 0;

    virtual void init_params(Rng&) {}
    void zero_grads();
};

/// 1-D cross-correlation over [batch, length, channels] input.
/// Weights are laid out [kernel, in_channels, filters].
class Conv1d : public Layer {
public:
    Conv1d(std::size_t kernel, std::size_t in_channels, std::size_t filters,
           std::size_t stride = 1, Padding padding = Padding::same);

    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::vector<ParamRef> params() override;
    std::string kind() const override { return "conv1d"; }
    void init_params(Rng& rng) override;

    std::size_t out_length(std::size_t in_length) const;

    std::size_t kernel, in_channels, filters, stride;
    Padding padding;
    Tensor w, b, gw, gb;

private:
    std::size_t pad_left(std::size_t in_length) const;
    Tensor cached_input_;
};

/// Non-overlapping window max per channel; ties route the gradient to the
/// first maximal position of the window.
class MaxPool1d : public Layer {
public:
    explicit MaxPool1d(std::size_t pool_size);

    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::string kind() const override { return "maxpool1d"; }

    std::size_t pool_size;

private:
    std::vector<std::size_t> argmax_;
    std::vector<std::size_t> in_shape_;
};

/// Nearest-neighbor repetition along the time axis; backward sums each
/// repeated group.
class Upsample1d : public Layer {
public:
    explicit Upsample1d(std::size_t factor);

    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::string kind() const override { return "upsample1d"; }

    std::size_t factor;

private:
    std::vector<std::size_t> in_shape_;
};

/// Per-channel batch normalization over [batch, length, channels].
/// Training normalizes by batch statistics and updates running statistics
/// with `momentum` weight on the new batch; inference applies the running
/// statistics. Running variance is stored biased, consistent with the
/// normalizer.
class BatchNorm1d : public Layer {
public:
    explicit BatchNorm1d(std::size_t channels, double epsilon = 1e-5,
                         double momentum = 0.1);

    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::vector<ParamRef> params() override;
    std::vector<StateRef> state() override;
    std::string kind() const override { return "batchnorm1d"; }

    std::size_t channels;
    double epsilon, momentum;
    Tensor gain, shift, ggain, gshift;
    Tensor running_mean, running_var;

private:
    Tensor cached_norm_;      // normalized activations
    std::vector<double> cached_mean_, cached_inv_std_;
    std::size_t cached_count_ = 0;
    Mode cached_mode_ = Mode::train;
};

class ReLU : public Layer {
public:
    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::string kind() const override { return "relu"; }

private:
    Tensor cached_input_;
};

/// Affine map on [batch, features]: y = x W + b with W laid out [in, units].
class Dense : public Layer {
public:
    Dense(std::size_t in_features, std::size_t units);

    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::vector<ParamRef> params() override;
    std::string kind() const override { return "dense"; }
    void init_params(Rng& rng) override;

    std::size_t in_features, units;
    Tensor w, b, gw, gb;

private:
    Tensor cached_input_;
};

/// [batch, length, channels] -> [batch, length*channels].
class Flatten : public Layer {
public:
    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::string kind() const override { return "flatten"; }

private:
    std::vector<std::size_t> in_shape_;
};

/// [batch, n] -> [batch, length, channels] with n = length*channels.
class Reshape : public Layer {
public:
    Reshape(std::size_t length, std::size_t channels);

    Tensor forward(const Tensor& input, Mode mode) override;
    Tensor backward(const Tensor& grad_output) override;
    std::string kind() const override { return "reshape"; }

    std::size_t length, channels;

private:
    std::vector<std::size_t> in_shape_;
};

/// Ordered stack of layers sharing one forward/backward pass.
class Sequential {
public:
    Sequential() = default;
    Sequential(Sequential&&) = default;
    Sequential& operator=(Sequential&&) = default;

    template <typename L, typename... Args>
    L* add(Args&&... args) {
        auto layer = std::make_unique<L>(std::forward<Args>(args)...);
        L* raw = layer.get();
        layers_.push_back(std::move(layer));
        return raw;
    }

    Tensor forward(Tensor x, Mode mode);
    /// Propagates the loss gradient back through every layer, filling
    /// parameter gradients; returns the gradient w.r.t. the stack input.
    Tensor backward(Tensor grad);

    /// Parameter views named "<index>.<kind>.<tensor>"; order is stable.
    std::vector<ParamRef> params();
    std::vector<StateRef> state();
    void zero_grads();
    void init_params(Rng& rng);

    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

} // namespace ccae

#endif
