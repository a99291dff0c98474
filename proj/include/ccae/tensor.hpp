#ifndef CCAE_TENSOR_HPP
#define CCAE_TENSOR_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ccae {

/// Dense row-major tensor of 64-bit reals. Shapes are small (rank <= 3 in
/// practice), so indexing helpers are plain inline arithmetic.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    double& at(std::size_t i, std::size_t j) {
        assert(rank() == 2);
        return data[i * shape[1] + j];
    }
    double at(std::size_t i, std::size_t j) const {
        assert(rank() == 2);
        return data[i * shape[1] + j];
    }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        assert(rank() == 3);
        return data[(i * shape[1] + j) * shape[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        assert(rank() == 3);
        return data[(i * shape[1] + j) * shape[2] + k];
    }

    /// Same data reinterpreted under a new shape of equal element count.
    Tensor reshaped(std::vector<std::size_t> new_shape) const;

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;
    void fill(double v);

    std::string shape_string() const;
};

/// product(shape); throws ShapeError on a zero dimension.
std::size_t shape_size(const std::vector<std::size_t>& shape);

/// Mean of squared element differences over all elements.
double mse_loss(const Tensor& prediction, const Tensor& target);

/// d(mse)/d(prediction) = 2 (prediction - target) / element_count.
Tensor mse_grad(const Tensor& prediction, const Tensor& target);

} // namespace ccae

#endif
