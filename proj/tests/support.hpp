#ifndef CCAE_TESTS_SUPPORT_HPP
#define CCAE_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ccae/rng.hpp"
#include "ccae/tensor.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() {
    return std::filesystem::path(CCAE_DATA_DIR);
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("ccae_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline ccae::Tensor random_tensor(std::vector<std::size_t> shape, ccae::Rng& rng,
                                  double scale = 1.0) {
    ccae::Tensor t = ccae::Tensor::zeros(std::move(shape));
    for (double& v : t.data) v = rng.normal() * scale;
    return t;
}

inline double dot(const ccae::Tensor& a, const ccae::Tensor& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Central finite differences of `scalar_fn` w.r.t. every entry of `t`.
template <typename F>
std::vector<double> numeric_grad(ccae::Tensor& t, F&& scalar_fn, double h = 1e-5) {
    std::vector<double> g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double orig = t[i];
        t[i] = orig + h;
        const double fp = scalar_fn();
        t[i] = orig - h;
        const double fm = scalar_fn();
        t[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, 1e-3); the floor keeps finite
/// difference noise on near-zero gradients from blowing up the ratio.
inline double max_rel_err(const std::vector<double>& analytic,
                          const std::vector<double>& numeric) {
    double worst = 0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom =
            std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

/// Literal double-loop correlation integral, kept independent of the library
/// implementation it checks.
inline double naive_correlation_integral(const std::vector<double>& x, std::size_t dim,
                                         double eps) {
    const std::size_t m = x.size() - dim + 1;
    std::uint64_t close = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double maxd = 0;
            for (std::size_t d = 0; d < dim; ++d)
                maxd = std::max(maxd, std::abs(x[i + d] - x[j + d]));
            if (maxd < eps) ++close;
        }
    }
    return static_cast<double>(close) /
           (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

/// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    int ka = 0, kb = 0;
    for (int v : a) ka = std::max(ka, v + 1);
    for (int v : b) kb = std::max(kb, v + 1);
    std::vector<std::vector<double>> table(static_cast<std::size_t>(ka),
                                           std::vector<double>(static_cast<std::size_t>(kb), 0));
    for (std::size_t i = 0; i < n; ++i)
        table[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1;
    auto choose2 = [](double m) { return m * (m - 1) / 2.0; };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    std::vector<double> row_sums(static_cast<std::size_t>(ka), 0),
        col_sums(static_cast<std::size_t>(kb), 0);
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) {
            const double m = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            sum_ij += choose2(m);
            row_sums[static_cast<std::size_t>(i)] += m;
            col_sums[static_cast<std::size_t>(j)] += m;
        }
    for (double r : row_sums) sum_a += choose2(r);
    for (double c : col_sums) sum_b += choose2(c);
    const double total = choose2(static_cast<double>(n));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_ij - expected) / (max_index - expected);
}

/// Independent symmetric eigensolver: power iteration with Hotelling
/// deflation. Accurate when eigenvalues are separated, which the callers
/// arrange; used only as an oracle.
inline std::vector<double> power_iteration_eigenvalues(std::vector<double> m,
                                                       std::size_t dim,
                                                       std::size_t count,
                                                       std::size_t iterations = 20000) {
    std::vector<double> eigenvalues;
    ccae::Rng rng(977);
    for (std::size_t e = 0; e < count; ++e) {
        std::vector<double> v(dim);
        for (double& x : v) x = rng.normal();
        double lambda = 0;
        for (std::size_t it = 0; it < iterations; ++it) {
            std::vector<double> w(dim, 0.0);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) w[i] += m[i * dim + j] * v[j];
            double norm = 0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm == 0) break;
            for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / norm;
            double next = 0;
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) next += v[i] * m[i * dim + j] * v[j];
            if (it > 100 && std::abs(next - lambda) < 1e-15 * std::max(1.0, std::abs(next)))
                { lambda = next; break; }
            lambda = next;
        }
        eigenvalues.push_back(lambda);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) m[i * dim + j] -= lambda * v[i] * v[j];
    }
    return eigenvalues;
}

} // namespace testsupport

#endif
