#include "ccae/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"
#include "ccae/rng.hpp"

namespace ccae {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct KmeansRun {
    ClusterAssignment assignment;
};

void seed_plus_plus(const LatentMatrix& pts, std::size_t k, Rng& rng,
                    std::vector<double>& centroids) {
    const std::size_t n = pts.count(), dim = pts.dim;
    centroids.assign(k * dim, 0.0);
    std::size_t first = rng.index(n);
    std::copy(pts.row(first), pts.row(first) + dim, centroids.begin());

    std::vector<double> min_d2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        min_d2[i] = sq_dist(pts.row(i), centroids.data(), dim);

    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(min_d2.begin(), min_d2.end(), 0.0);
        std::size_t chosen;
        if (total <= 0) {
            chosen = rng.index(n); // all points coincide with a centroid
        } else {
            const double target = rng.uniform() * total;
            double acc = 0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_d2[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy(pts.row(chosen), pts.row(chosen) + dim, centroids.begin() + c * dim);
        for (std::size_t i = 0; i < n; ++i)
            min_d2[i] = std::min(min_d2[i], sq_dist(pts.row(i), pts.row(chosen), dim));
    }
}

void assign_labels(const LatentMatrix& pts, const std::vector<double>& centroids,
                   std::size_t k, std::vector<int>& labels) {
    const std::size_t n = pts.count(), dim = pts.dim;
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_d = sq_dist(pts.row(i), centroids.data(), dim);
        for (std::size_t c = 1; c < k; ++c) {
            const double d = sq_dist(pts.row(i), centroids.data() + c * dim, dim);
            if (d < best_d) { // ties keep the lower cluster index
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[i] = best;
    }
}

double total_inertia(const LatentMatrix& pts, const std::vector<double>& centroids,
                     const std::vector<int>& labels) {
    double s = 0;
    for (std::size_t i = 0; i < pts.count(); ++i)
        s += sq_dist(pts.row(i), centroids.data() +
                                     static_cast<std::size_t>(labels[i]) * pts.dim,
                     pts.dim);
    return s;
}

KmeansRun kmeans_single(const LatentMatrix& pts, std::size_t k, std::uint64_t seed) {
    constexpr std::size_t kMaxIterations = 300;
    const std::size_t n = pts.count(), dim = pts.dim;
    Rng rng(seed);

    KmeansRun run;
    auto& a = run.assignment;
    a.k = k;
    a.labels.assign(n, 0);
    seed_plus_plus(pts, k, rng, a.centroids);

    std::vector<int> prev_labels(n, -1);
    for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
        assign_labels(pts, a.centroids, k, a.labels);

        a.counts.assign(k, 0);
        for (int lbl : a.labels) ++a.counts[static_cast<std::size_t>(lbl)];
        for (std::size_t c = 0; c < k; ++c) {
            if (a.counts[c] > 0) continue;
            // Re-seed an empty cluster to the point farthest from its
            // current centroid, then re-assign.
            std::size_t farthest = 0;
            double far_d = -1;
            for (std::size_t i = 0; i < n; ++i) {
                const double d =
                    sq_dist(pts.row(i),
                            a.centroids.data() +
                                static_cast<std::size_t>(a.labels[i]) * dim,
                            dim);
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            std::copy(pts.row(farthest), pts.row(farthest) + dim,
                      a.centroids.begin() + c * dim);
            ++a.reseed_events;
            assign_labels(pts, a.centroids, k, a.labels);
            a.counts.assign(k, 0);
            for (int lbl : a.labels) ++a.counts[static_cast<std::size_t>(lbl)];
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (a.counts[c] == 0) continue; // duplicates can leave a cluster empty
            double* cent = a.centroids.data() + c * dim;
            std::fill(cent, cent + dim, 0.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(a.labels[i]);
            double* cent = a.centroids.data() + c * dim;
            for (std::size_t j = 0; j < dim; ++j) cent[j] += pts.at(i, j);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (a.counts[c] == 0) continue;
            double* cent = a.centroids.data() + c * dim;
            for (std::size_t j = 0; j < dim; ++j)
                cent[j] /= static_cast<double>(a.counts[c]);
        }

        a.inertia_trace.push_back(total_inertia(pts, a.centroids, a.labels));
        if (a.labels == prev_labels) break;
        prev_labels = a.labels;
    }
    a.inertia = a.inertia_trace.back();
    return run;
}

} // namespace

ClusterAssignment kmeans(const LatentMatrix& points, std::size_t k, std::uint64_t seed,
                         std::size_t restarts) {
    const std::size_t n = points.count();
    if (k < 1) throw ConfigError("kmeans needs k >= 1");
    if (k > n)
        throw ConfigError("kmeans k=" + std::to_string(k) + " exceeds point count " +
                          std::to_string(n));
    if (restarts < 1) throw ConfigError("kmeans needs at least one restart");
    for (double v : points.values)
        if (!std::isfinite(v)) throw DataError("kmeans input contains non-finite values");

    ClusterAssignment best;
    bool have = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        KmeansRun run = kmeans_single(points, k, mix_seed(seed, r));
        if (!have || run.assignment.inertia < best.inertia) {
            best = std::move(run.assignment);
            have = true;
        }
    }
    return best;
}

void jacobi_eigen_symmetric(const std::vector<double>& matrix, std::size_t dim,
                            std::vector<double>& eigenvalues,
                            std::vector<double>& eigenvectors) {
    if (matrix.size() != dim * dim) throw ShapeError("eigen: matrix size mismatch");
    std::vector<double> a = matrix;
    std::vector<double> v(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) v[i * dim + i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < dim; ++p)
            for (std::size_t q = p + 1; q < dim; ++q) off += a[p * dim + q] * a[p * dim + q];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < dim; ++p) {
            for (std::size_t q = p + 1; q < dim; ++q) {
                const double apq = a[p * dim + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * dim + p], aqq = a[q * dim + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double aip = a[i * dim + p], aiq = a[i * dim + q];
                    a[i * dim + p] = c * aip - s * aiq;
                    a[i * dim + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    const double api = a[p * dim + i], aqi = a[q * dim + i];
                    a[p * dim + i] = c * api - s * aqi;
                    a[q * dim + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    const double vip = v[i * dim + p], viq = v[i * dim + q];
                    v[i * dim + p] = c * vip - s * viq;
                    v[i * dim + q] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a[x * dim + x] > a[y * dim + y];
    });
    eigenvalues.assign(dim, 0.0);
    eigenvectors.assign(dim * dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
        eigenvalues[r] = a[order[r] * dim + order[r]];
        for (std::size_t i = 0; i < dim; ++i)
            eigenvectors[r * dim + i] = v[i * dim + order[r]];
    }
}

Embedding2D pca_2d(const LatentMatrix& points) {
    const std::size_t n = points.count(), dim = points.dim;
    if (n < 2) throw InsufficientDataError("pca_2d needs at least 2 points");
    if (dim < 2) throw ConfigError("pca_2d needs feature dimension >= 2");

    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += points.at(i, j);
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<double> cov(dim * dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < dim; ++p) {
            const double dp = points.at(i, p) - mean[p];
            for (std::size_t q = p; q < dim; ++q)
                cov[p * dim + q] += dp * (points.at(i, q) - mean[q]);
        }
    }
    for (std::size_t p = 0; p < dim; ++p)
        for (std::size_t q = p; q < dim; ++q) {
            cov[p * dim + q] /= static_cast<double>(n - 1);
            cov[q * dim + p] = cov[p * dim + q];
        }

    double trace = 0;
    for (std::size_t p = 0; p < dim; ++p) trace += cov[p * dim + p];
    if (!(trace > 0)) throw NumericError("pca_2d degenerate: all points coincide");

    std::vector<double> eigenvalues, eigenvectors;
    jacobi_eigen_symmetric(cov, dim, eigenvalues, eigenvectors);

    Embedding2D out;
    out.coordinates.resize(n);
    double total = 0;
    for (double ev : eigenvalues) total += std::max(ev, 0.0);
    for (std::size_t comp = 0; comp < 2; ++comp) {
        double* vec = eigenvectors.data() + comp * dim;
        std::size_t arg = 0;
        for (std::size_t j = 1; j < dim; ++j)
            if (std::abs(vec[j]) > std::abs(vec[arg])) arg = j;
        if (vec[arg] < 0)
            for (std::size_t j = 0; j < dim; ++j) vec[j] = -vec[j];
        for (std::size_t i = 0; i < n; ++i) {
            double proj = 0;
            for (std::size_t j = 0; j < dim; ++j)
                proj += (points.at(i, j) - mean[j]) * vec[j];
            out.coordinates[i][comp] = proj;
        }
        out.explained_variance_ratio[comp] =
            total > 0 ? std::max(eigenvalues[comp], 0.0) / total : 0.0;
    }
    return out;
}

double silhouette(const LatentMatrix& points, const std::vector<int>& labels) {
    const std::size_t n = points.count();
    if (labels.size() != n) throw ConfigError("silhouette: label count mismatch");
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    const std::size_t k = static_cast<std::size_t>(max_label + 1);
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    std::size_t nonempty = 0;
    for (std::size_t c : counts) nonempty += c > 0 ? 1 : 0;
    if (nonempty < 2 || nonempty > n - 1)
        throw ConfigError("silhouette needs 2..n-1 non-empty clusters");

    double total = 0;
    std::vector<double> mean_dist(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = static_cast<std::size_t>(labels[i]);
        if (counts[own] == 1) continue; // singleton scores 0
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[static_cast<std::size_t>(labels[j])] +=
                std::sqrt(sq_dist(points.row(i), points.row(j), points.dim));
        }
        const double a = mean_dist[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, mean_dist[c] / static_cast<double>(counts[c]));
        }
        const double denom = std::max(a, b);
        total += denom > 0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

std::size_t select_k(const LatentMatrix& points, std::size_t k_lo, std::size_t k_hi,
                     std::uint64_t seed, std::size_t restarts) {
    const std::size_t n = points.count();
    if (k_lo > k_hi) throw ConfigError("select_k: empty k range");
    if (k_lo < 2 || k_hi > n - 1)
        throw ConfigError("select_k: range must lie within [2, points-1]");

    std::size_t best_k = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const ClusterAssignment a = kmeans(points, k, mix_seed(seed, k), restarts);
        double score;
        try {
            score = silhouette(points, a.labels);
        } catch (const ConfigError&) {
            continue; // degenerate assignment (duplicates collapsed clusters)
        }
        if (score > best_score) { // strict: ties resolve to the smaller k
            best_score = score;
            best_k = k;
        }
    }
    if (best_k == 0) throw NumericError("select_k: no k produced a valid clustering");
    return best_k;
}

void write_cluster_csv(const LatentMatrix& points, const ClusterAssignment& clusters,
                       const Embedding2D& embedding, const std::filesystem::path& path) {
    if (clusters.labels.size() != points.count() ||
        embedding.coordinates.size() != points.count())
        throw ShapeError("cluster export: size mismatch");
    std::string out = "symbol,label,pc1,pc2\n";
    for (std::size_t i = 0; i < points.count(); ++i) {
        out += points.symbols[i];
        out += ',' + std::to_string(clusters.labels[i]);
        out += ',' + format_double(embedding.coordinates[i][0]);
        out += ',' + format_double(embedding.coordinates[i][1]);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_cluster_json(const ClusterAssignment& clusters, const Embedding2D& embedding,
                        const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["k"] = clusters.k;
    doc["inertia"] = clusters.inertia;
    doc["cluster_sizes"] = clusters.counts;
    doc["reseed_events"] = clusters.reseed_events;
    doc["explained_variance_ratio"] = {embedding.explained_variance_ratio[0],
                                       embedding.explained_variance_ratio[1]};
    write_file_atomic(path, doc.dump(2) + "\n");
}

} // namespace ccae
