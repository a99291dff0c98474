#ifndef CCAE_LATENT_HPP
#define CCAE_LATENT_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ccae {

/// Per-coin bottleneck features: one row per symbol, row-major.
struct LatentMatrix {
    std::vector<std::string> symbols;
    std::size_t dim = 0;
    std::vector<double> values;

    std::size_t count() const { return symbols.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * dim + col]; }
    double& at(std::size_t row, std::size_t col) { return values[row * dim + col]; }
    const double* row(std::size_t r) const { return values.data() + r * dim; }
};

/// CSV form: header `symbol,f0,...,f<dim-1>`, one row per coin.
void write_latent_csv(const LatentMatrix& m, const std::filesystem::path& path);
LatentMatrix read_latent_csv(const std::filesystem::path& path);

} // namespace ccae

#endif
