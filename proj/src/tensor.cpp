#include "ccae/tensor.hpp"

#include <sstream>

#include "ccae/errors.hpp"

namespace ccae {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("zero-sized tensor dimension");
        n *= d;
    }
    return n;
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    Tensor t;
    const std::size_t n = shape_size(shape);
    t.shape = std::move(shape);
    t.data.assign(n, 0.0);
    return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values) {
    if (shape_size(shape) != values.size())
        throw ShapeError("value count does not match shape");
    Tensor t;
    t.shape = std::move(shape);
    t.data = std::move(values);
    return t;
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
    if (shape_size(new_shape) != size())
        throw ShapeError("reshape changes element count: " + shape_string());
    Tensor t;
    t.shape = std::move(new_shape);
    t.data = data;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

void Tensor::fill(double v) {
    for (double& x : data) x = v;
}

std::string Tensor::shape_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

double mse_loss(const Tensor& prediction, const Tensor& target) {
    if (!prediction.same_shape(target))
        throw ShapeError("mse_loss shape mismatch: " + prediction.shape_string() +
                         " vs " + target.shape_string());
    double sum = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction[i] - target[i];
        sum += d * d;
    }
    return sum / static_cast<double>(prediction.size());
}

Tensor mse_grad(const Tensor& prediction, const Tensor& target) {
    if (!prediction.same_shape(target))
        throw ShapeError("mse_grad shape mismatch: " + prediction.shape_string() +
                         " vs " + target.shape_string());
    Tensor g = Tensor::zeros(prediction.shape);
    const double scale = 2.0 / static_cast<double>(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i)
        g[i] = scale * (prediction[i] - target[i]);
    return g;
}

} // namespace ccae
