#include "ccae/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ccae/errors.hpp"

namespace ccae {

namespace {

void require_rank3(const Tensor& t, const char* who) {
    if (t.rank() != 3)
        throw ShapeError(std::string(who) + " expects [batch, length, channels], got " +
                         t.shape_string());
}

void require_rank2(const Tensor& t, const char* who) {
    if (t.rank() != 2)
        throw ShapeError(std::string(who) + " expects [batch, features], got " +
                         t.shape_string());
}

} // namespace

void Layer::zero_grads() {
    for (auto& p : params())
        if (p.grad) p.grad->fill(0.0);
}

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(std::size_t kernel_, std::size_t in_channels_, std::size_t filters_,
               std::size_t stride_, Padding padding_)
    : kernel(kernel_), in_channels(in_channels_), filters(filters_), stride(stride_),
      padding(padding_) {
    if (kernel < 1 || in_channels < 1 || filters < 1 || stride < 1)
        throw ConfigError("conv1d geometry must be positive");
    w = Tensor::zeros({kernel, in_channels, filters});
    b = Tensor::zeros({filters});
    gw = Tensor::zeros(w.shape);
    gb = Tensor::zeros(b.shape);
}

void Conv1d::init_params(Rng& rng) {
    const double std = std::sqrt(2.0 / static_cast<double>(kernel * in_channels));
    for (double& v : w.data) v = rng.normal() * std;
    b.fill(0.0);
}

std::size_t Conv1d::out_length(std::size_t in_length) const {
    if (padding == Padding::same) return (in_length + stride - 1) / stride;
    if (in_length < kernel)
        throw ShapeError("conv1d valid padding needs length >= kernel");
    return (in_length - kernel) / stride + 1;
}

std::size_t Conv1d::pad_left(std::size_t in_length) const {
    if (padding == Padding::valid) return 0;
    const std::size_t out = out_length(in_length);
    const std::size_t span = (out - 1) * stride + kernel;
    const std::size_t total = span > in_length ? span - in_length : 0;
    return total / 2;
}

Tensor Conv1d::forward(const Tensor& input, Mode) {
    require_rank3(input, "conv1d");
    if (input.dim(2) != in_channels)
        throw ShapeError("conv1d channel mismatch: input has " +
                         std::to_string(input.dim(2)) + ", weights expect " +
                         std::to_string(in_channels));
    const std::size_t batch = input.dim(0), length = input.dim(1);
    const std::size_t out_len = out_length(length);
    const std::size_t pl = pad_left(length);

    Tensor out = Tensor::zeros({batch, out_len, filters});
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t t = 0; t < out_len; ++t) {
            for (std::size_t k = 0; k < kernel; ++k) {
                const std::ptrdiff_t src =
                    static_cast<std::ptrdiff_t>(t * stride + k) -
                    static_cast<std::ptrdiff_t>(pl);
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(length)) continue;
                for (std::size_t c = 0; c < in_channels; ++c) {
                    const double x = input.at(bi, static_cast<std::size_t>(src), c);
                    for (std::size_t f = 0; f < filters; ++f)
                        out.at(bi, t, f) += x * w.at(k, c, f);
                }
            }
            for (std::size_t f = 0; f < filters; ++f) out.at(bi, t, f) += b[f];
        }
    }
    cached_input_ = input;
    return out;
}

Tensor Conv1d::backward(const Tensor& grad_output) {
    const Tensor& x = cached_input_;
    if (x.size() == 0) throw ShapeError("conv1d backward before forward");
    const std::size_t batch = x.dim(0), length = x.dim(1);
    const std::size_t out_len = out_length(length);
    if (grad_output.rank() != 3 || grad_output.dim(0) != batch ||
        grad_output.dim(1) != out_len || grad_output.dim(2) != filters)
        throw ShapeError("conv1d backward gradient shape " + grad_output.shape_string());
    const std::size_t pl = pad_left(length);

    Tensor gx = Tensor::zeros(x.shape);
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t t = 0; t < out_len; ++t) {
            for (std::size_t f = 0; f < filters; ++f)
                gb[f] += grad_output.at(bi, t, f);
            for (std::size_t k = 0; k < kernel; ++k) {
                const std::ptrdiff_t src =
                    static_cast<std::ptrdiff_t>(t * stride + k) -
                    static_cast<std::ptrdiff_t>(pl);
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(length)) continue;
                for (std::size_t c = 0; c < in_channels; ++c) {
                    const double xv = x.at(bi, static_cast<std::size_t>(src), c);
                    double acc = 0;
                    for (std::size_t f = 0; f < filters; ++f) {
                        const double g = grad_output.at(bi, t, f);
                        gw.at(k, c, f) += xv * g;
                        acc += g * w.at(k, c, f);
                    }
                    gx.at(bi, static_cast<std::size_t>(src), c) += acc;
                }
            }
        }
    }
    return gx;
}

std::vector<ParamRef> Conv1d::params() {
    return {{"w", &w, &gw, true}, {"b", &b, &gb, true}};
}

// ------------------------------------------------------------- MaxPool1d

MaxPool1d::MaxPool1d(std::size_t pool_size_) : pool_size(pool_size_) {
    if (pool_size < 1) throw ConfigError("pool size must be >= 1");
}

Tensor MaxPool1d::forward(const Tensor& input, Mode) {
    require_rank3(input, "maxpool1d");
    const std::size_t batch = input.dim(0), length = input.dim(1), ch = input.dim(2);
    if (length % pool_size != 0)
        throw ShapeError("maxpool1d length " + std::to_string(length) +
                         " not divisible by pool size " + std::to_string(pool_size));
    const std::size_t out_len = length / pool_size;
    Tensor out = Tensor::zeros({batch, out_len, ch});
    argmax_.assign(out.size(), 0);
    in_shape_ = input.shape;
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t t = 0; t < out_len; ++t) {
            for (std::size_t c = 0; c < ch; ++c) {
                std::size_t best = t * pool_size;
                double best_v = input.at(bi, best, c);
                for (std::size_t j = 1; j < pool_size; ++j) {
                    const double v = input.at(bi, t * pool_size + j, c);
                    if (v > best_v) { // strict: ties keep the first index
                        best_v = v;
                        best = t * pool_size + j;
                    }
                }
                out.at(bi, t, c) = best_v;
                argmax_[(bi * out_len + t) * ch + c] = best;
            }
        }
    }
    return out;
}

Tensor MaxPool1d::backward(const Tensor& grad_output) {
    if (in_shape_.empty()) throw ShapeError("maxpool1d backward before forward");
    const std::size_t batch = in_shape_[0], ch = in_shape_[2];
    const std::size_t out_len = in_shape_[1] / pool_size;
    if (grad_output.rank() != 3 || grad_output.dim(0) != batch ||
        grad_output.dim(1) != out_len || grad_output.dim(2) != ch)
        throw ShapeError("maxpool1d backward gradient shape " + grad_output.shape_string());
    Tensor gx = Tensor::zeros(in_shape_);
    for (std::size_t bi = 0; bi < batch; ++bi)
        for (std::size_t t = 0; t < out_len; ++t)
            for (std::size_t c = 0; c < ch; ++c)
                gx.at(bi, argmax_[(bi * out_len + t) * ch + c], c) +=
                    grad_output.at(bi, t, c);
    return gx;
}

// ------------------------------------------------------------ Upsample1d

Upsample1d::Upsample1d(std::size_t factor_) : factor(factor_) {
    if (factor < 1) throw ConfigError("upsample factor must be >= 1");
}

Tensor Upsample1d::forward(const Tensor& input, Mode) {
    require_rank3(input, "upsample1d");
    const std::size_t batch = input.dim(0), length = input.dim(1), ch = input.dim(2);
    in_shape_ = input.shape;
    Tensor out = Tensor::zeros({batch, length * factor, ch});
    for (std::size_t bi = 0; bi < batch; ++bi)
        for (std::size_t t = 0; t < length; ++t)
            for (std::size_t j = 0; j < factor; ++j)
                for (std::size_t c = 0; c < ch; ++c)
                    out.at(bi, t * factor + j, c) = input.at(bi, t, c);
    return out;
}

Tensor Upsample1d::backward(const Tensor& grad_output) {
    if (in_shape_.empty()) throw ShapeError("upsample1d backward before forward");
    const std::size_t batch = in_shape_[0], length = in_shape_[1], ch = in_shape_[2];
    if (grad_output.rank() != 3 || grad_output.dim(0) != batch ||
        grad_output.dim(1) != length * factor || grad_output.dim(2) != ch)
        throw ShapeError("upsample1d backward gradient shape " +
                         grad_output.shape_string());
    Tensor gx = Tensor::zeros(in_shape_);
    for (std::size_t bi = 0; bi < batch; ++bi)
        for (std::size_t t = 0; t < length; ++t)
            for (std::size_t j = 0; j < factor; ++j)
                for (std::size_t c = 0; c < ch; ++c)
                    gx.at(bi, t, c) += grad_output.at(bi, t * factor + j, c);
    return gx;
}

// ----------------------------------------------------------- BatchNorm1d

BatchNorm1d::BatchNorm1d(std::size_t channels_, double epsilon_, double momentum_)
    : channels(channels_), epsilon(epsilon_), momentum(momentum_) {
    if (channels < 1) throw ConfigError("batchnorm needs >= 1 channel");
    if (!(epsilon > 0)) throw ConfigError("batchnorm epsilon must be positive");
    if (!(momentum > 0 && momentum < 1))
        throw ConfigError("batchnorm momentum must lie in (0,1)");
    gain = Tensor::zeros({channels});
    gain.fill(1.0);
    shift = Tensor::zeros({channels});
    ggain = Tensor::zeros({channels});
    gshift = Tensor::zeros({channels});
    running_mean = Tensor::zeros({channels});
    running_var = Tensor::zeros({channels});
    running_var.fill(1.0);
}

Tensor BatchNorm1d::forward(const Tensor& input, Mode mode) {
    require_rank3(input, "batchnorm1d");
    if (input.dim(2) != channels)
        throw ShapeError("batchnorm1d channel mismatch: " + input.shape_string());
    const std::size_t batch = input.dim(0), length = input.dim(1);
    const std::size_t m = batch * length;
    Tensor out = Tensor::zeros(input.shape);
    cached_mode_ = mode;

    if (mode == Mode::infer) {
        for (std::size_t c = 0; c < channels; ++c) {
            const double inv = 1.0 / std::sqrt(running_var[c] + epsilon);
            for (std::size_t bi = 0; bi < batch; ++bi)
                for (std::size_t t = 0; t < length; ++t)
                    out.at(bi, t, c) =
                        gain[c] * (input.at(bi, t, c) - running_mean[c]) * inv + shift[c];
        }
        return out;
    }

    if (m < 2)
        throw NumericError("batchnorm1d degenerate batch: need batch*length >= 2");
    cached_mean_.assign(channels, 0.0);
    cached_inv_std_.assign(channels, 0.0);
    cached_norm_ = Tensor::zeros(input.shape);
    cached_count_ = m;
    for (std::size_t c = 0; c < channels; ++c) {
        double mean = 0;
        for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t t = 0; t < length; ++t) mean += input.at(bi, t, c);
        mean /= static_cast<double>(m);
        double var = 0;
        for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t t = 0; t < length; ++t) {
                const double d = input.at(bi, t, c) - mean;
                var += d * d;
            }
        var /= static_cast<double>(m);
        const double inv = 1.0 / std::sqrt(var + epsilon);
        cached_mean_[c] = mean;
        cached_inv_std_[c] = inv;
        for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t t = 0; t < length; ++t) {
                const double xh = (input.at(bi, t, c) - mean) * inv;
                cached_norm_.at(bi, t, c) = xh;
                out.at(bi, t, c) = gain[c] * xh + shift[c];
            }
        running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * mean;
        running_var[c] = (1.0 - momentum) * running_var[c] + momentum * var;
    }
    return out;
}

Tensor BatchNorm1d::backward(const Tensor& grad_output) {
    if (cached_mode_ != Mode::train || cached_norm_.size() == 0)
        throw ShapeError("batchnorm1d backward requires a preceding train-mode forward");
    if (!grad_output.same_shape(cached_norm_))
        throw ShapeError("batchnorm1d backward gradient shape " +
                         grad_output.shape_string());
    const std::size_t batch = cached_norm_.dim(0), length = cached_norm_.dim(1);
    const double m = static_cast<double>(cached_count_);
    Tensor gx = Tensor::zeros(cached_norm_.shape);
    for (std::size_t c = 0; c < channels; ++c) {
        double sum_g = 0, sum_g_xh = 0;
        for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t t = 0; t < length; ++t) {
                const double g = grad_output.at(bi, t, c);
                sum_g += g;
                sum_g_xh += g * cached_norm_.at(bi, t, c);
            }
        ggain[c] += sum_g_xh;
        gshift[c] += sum_g;
        const double scale = gain[c] * cached_inv_std_[c] / m;
        for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t t = 0; t < length; ++t) {
                const double g = grad_output.at(bi, t, c);
                const double xh = cached_norm_.at(bi, t, c);
                gx.at(bi, t, c) = scale * (m * g - sum_g - xh * sum_g_xh);
            }
    }
    return gx;
}

std::vector<ParamRef> BatchNorm1d::params() {
    return {{"gain", &gain, &ggain, true}, {"shift", &shift, &gshift, true}};
}

std::vector<StateRef> BatchNorm1d::state() {
    return {{"running_mean", &running_mean}, {"running_var", &running_var}};
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(const Tensor& input, Mode) {
    cached_input_ = input;
    Tensor out = input;
    for (double& v : out.data) v = v > 0 ? v : 0.0;
    return out;
}

Tensor ReLU::backward(const Tensor& grad_output) {
    if (!grad_output.same_shape(cached_input_))
        throw ShapeError("relu backward gradient shape " + grad_output.shape_string());
    Tensor gx = grad_output;
    for (std::size_t i = 0; i < gx.size(); ++i)
        if (!(cached_input_[i] > 0)) gx[i] = 0.0; // subgradient 0 at exactly 0
    return gx;
}

// ----------------------------------------------------------------- Dense

Dense::Dense(std::size_t in_features_, std::size_t units_)
    : in_features(in_features_), units(units_) {
    if (in_features < 1 || units < 1) throw ConfigError("dense geometry must be positive");
    w = Tensor::zeros({in_features, units});
    b = Tensor::zeros({units});
    gw = Tensor::zeros(w.shape);
    gb = Tensor::zeros(b.shape);
}

void Dense::init_params(Rng& rng) {
    const double std = std::sqrt(2.0 / static_cast<double>(in_features));
    for (double& v : w.data) v = rng.normal() * std;
    b.fill(0.0);
}

Tensor Dense::forward(const Tensor& input, Mode) {
    require_rank2(input, "dense");
    if (input.dim(1) != in_features)
        throw ShapeError("dense expects " + std::to_string(in_features) +
                         " inputs, got " + input.shape_string());
    const std::size_t batch = input.dim(0);
    Tensor out = Tensor::zeros({batch, units});
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t n = 0; n < in_features; ++n) {
            const double x = input.at(bi, n);
            if (x == 0.0) continue;
            for (std::size_t u = 0; u < units; ++u) out.at(bi, u) += x * w.at(n, u);
        }
        for (std::size_t u = 0; u < units; ++u) out.at(bi, u) += b[u];
    }
    cached_input_ = input;
    return out;
}

Tensor Dense::backward(const Tensor& grad_output) {
    const Tensor& x = cached_input_;
    if (x.size() == 0) throw ShapeError("dense backward before forward");
    const std::size_t batch = x.dim(0);
    if (grad_output.rank() != 2 || grad_output.dim(0) != batch ||
        grad_output.dim(1) != units)
        throw ShapeError("dense backward gradient shape " + grad_output.shape_string());
    Tensor gx = Tensor::zeros(x.shape);
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t u = 0; u < units; ++u) gb[u] += grad_output.at(bi, u);
        for (std::size_t n = 0; n < in_features; ++n) {
            const double xv = x.at(bi, n);
            double acc = 0;
            for (std::size_t u = 0; u < units; ++u) {
                const double g = grad_output.at(bi, u);
                gw.at(n, u) += xv * g;
                acc += g * w.at(n, u);
            }
            gx.at(bi, n) = acc;
        }
    }
    return gx;
}

std::vector<ParamRef> Dense::params() {
    return {{"w", &w, &gw, true}, {"b", &b, &gb, true}};
}

// --------------------------------------------------------------- Flatten

Tensor Flatten::forward(const Tensor& input, Mode) {
    require_rank3(input, "flatten");
    in_shape_ = input.shape;
    return input.reshaped({input.dim(0), input.dim(1) * input.dim(2)});
}

Tensor Flatten::backward(const Tensor& grad_output) {
    if (in_shape_.empty()) throw ShapeError("flatten backward before forward");
    return grad_output.reshaped(in_shape_);
}

// --------------------------------------------------------------- Reshape

Reshape::Reshape(std::size_t length_, std::size_t channels_)
    : length(length_), channels(channels_) {
    if (length < 1 || channels < 1) throw ConfigError("reshape target must be positive");
}

Tensor Reshape::forward(const Tensor& input, Mode) {
    require_rank2(input, "reshape");
    if (input.dim(1) != length * channels)
        throw ShapeError("reshape expects " + std::to_string(length * channels) +
                         " features, got " + input.shape_string());
    in_shape_ = input.shape;
    return input.reshaped({input.dim(0), length, channels});
}

Tensor Reshape::backward(const Tensor& grad_output) {
    if (in_shape_.empty()) throw ShapeError("reshape backward before forward");
    return grad_output.reshaped(in_shape_);
}

// ------------------------------------------------------------ Sequential

Tensor Sequential::forward(Tensor x, Mode mode) {
    for (auto& layer : layers_) x = layer->forward(x, mode);
    return x;
}

Tensor Sequential::backward(Tensor grad) {
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
        grad = (*it)->backward(grad);
    return grad;
}

std::vector<ParamRef> Sequential::params() {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (auto p : layers_[i]->params()) {
            p.name = std::to_string(i) + "." + layers_[i]->kind() + "." + p.name;
            out.push_back(p);
        }
    }
    return out;
}

std::vector<StateRef> Sequential::state() {
    std::vector<StateRef> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (auto s : layers_[i]->state()) {
            s.name = std::to_string(i) + "." + layers_[i]->kind() + "." + s.name;
            out.push_back(s);
        }
    }
    return out;
}

void Sequential::zero_grads() {
    for (auto& layer : layers_) layer->zero_grads();
}

void Sequential::init_params(Rng& rng) {
    for (auto& layer : layers_) layer->init_params(rng);
}

} // namespace ccae
