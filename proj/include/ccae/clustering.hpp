#ifndef CCAE_CLUSTERING_HPP
#define CCAE_CLUSTERING_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ccae/latent.hpp"

namespace ccae {

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<int> labels;        // per point, in [0, k)
    std::vector<double> centroids;  // row-major [k x dim]
    std::vector<std::size_t> counts;
    double inertia = 0;             // sum of squared distances to assigned centroids
    std::size_t reseed_events = 0;  // empty clusters re-seeded to the farthest point
    std::vector<double> inertia_trace; // per Lloyd iteration of the winning run
};

struct Embedding2D {
    std::vector<std::array<double, 2>> coordinates;
    std::array<double, 2> explained_variance_ratio{0, 0};
};

/// Lloyd's algorithm from k-means++ seeding; the best of `restarts`
/// independent runs by inertia wins (ties keep the earlier restart). A run
/// stops when assignments stabilize or after 300 iterations. Empty clusters
/// are re-seeded to the point farthest from its centroid.
ClusterAssignment kmeans(const LatentMatrix& points, std::size_t k, std::uint64_t seed,
                         std::size_t restarts = 10);

/// Mean-centered projection onto the top-2 eigenvectors of the sample
/// covariance (Jacobi rotations on the dim x dim matrix). Component signs
/// follow the largest-magnitude loading. Throws NumericError when all points
/// coincide.
Embedding2D pca_2d(const LatentMatrix& points);

/// Mean silhouette over all points; singleton clusters score 0.
double silhouette(const LatentMatrix& points, const std::vector<int>& labels);

/// The k in [k_lo, k_hi] with the highest mean silhouette under kmeans;
/// ties resolve to the smaller k.
std::size_t select_k(const LatentMatrix& points, std::size_t k_lo, std::size_t k_hi,
                     std::uint64_t seed, std::size_t restarts = 10);

/// Symmetric eigendecomposition by cyclic Jacobi rotations; returns
/// eigenvalues in descending order with matching eigenvectors (rows of
/// `eigenvectors`, each of length `dim`).
void jacobi_eigen_symmetric(const std::vector<double>& matrix, std::size_t dim,
                            std::vector<double>& eigenvalues,
                            std::vector<double>& eigenvectors);

/// `symbol,label,pc1,pc2` rows, the data behind the per-period scatter plots.
void write_cluster_csv(const LatentMatrix& points, const ClusterAssignment& clusters,
                       const Embedding2D& embedding, const std::filesystem::path& path);

/// Summary sidecar: k, inertia, cluster sizes, explained variance ratio.
void write_cluster_json(const ClusterAssignment& clusters, const Embedding2D& embedding,
                        const std::filesystem::path& path);

} // namespace ccae

#endif
