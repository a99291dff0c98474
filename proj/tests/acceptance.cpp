// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ccae/cae.hpp"
#include "ccae/clustering.hpp"
#include "ccae/efficiency.hpp"
#include "ccae/errors.hpp"
#include "ccae/market_data.hpp"
#include "ccae/pipeline.hpp"
#include "ccae/rng.hpp"
#include "ccae/sha256.hpp"
#include "ccae/special_functions.hpp"
#include "support.hpp"

using namespace ccae;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome outcome;
    void require(bool ok, const std::string& what) {
        if (!ok && outcome.pass) {
            outcome.pass = false;
            outcome.detail = what;
        }
    }
    void note(const std::string& what) {
        if (outcome.detail.empty()) outcome.detail = what;
    }
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// ------------------------------------------------------------ criterion 1

Outcome gradient_correctness() {
    Check ck;
    const double t0 = now_seconds();
    Rng meta(20250101);
    double worst_layer = 0, worst_model = 0;

    for (int config_i = 0; config_i < 100; ++config_i) {
        Rng rng(meta.next_u64());
        const std::size_t batch = 1 + rng.index(2);
        const std::size_t length = 4 + 2 * rng.index(4);
        const std::size_t channels = 1 + rng.index(2);

        auto check_layer = [&](Layer& layer, Tensor x) {
            const Tensor out = layer.forward(x, Mode::train);
            const Tensor c = testsupport::random_tensor(out.shape, rng);
            auto scalar = [&]() { return testsupport::dot(layer.forward(x, Mode::train), c); };
            layer.zero_grads();
            layer.forward(x, Mode::train);
            const Tensor gin = layer.backward(c);
            worst_layer = std::max(
                worst_layer,
                testsupport::max_rel_err(gin.data, testsupport::numeric_grad(x, scalar)));
            for (const auto& p : layer.params())
                worst_layer = std::max(
                    worst_layer, testsupport::max_rel_err(
                                     p.grad->data, testsupport::numeric_grad(*p.value, scalar)));
        };

        {
            Conv1d conv(1 + 2 * rng.index(2), channels, 1 + rng.index(4), 1,
                        config_i % 2 ? Padding::same : Padding::valid);
            conv.init_params(rng);
            for (double& v : conv.b.data) v = 0.3 * rng.normal();
            check_layer(conv, testsupport::random_tensor({batch, length, channels}, rng));
        }
        {
            MaxPool1d pool(2);
            check_layer(pool, testsupport::random_tensor({batch, length, channels}, rng));
        }
        {
            Upsample1d up(1 + rng.index(3));
            check_layer(up, testsupport::random_tensor({batch, length, channels}, rng));
        }
        {
            BatchNorm1d bn(channels);
            for (double& v : bn.gain.data) v = 0.5 + rng.uniform();
            for (double& v : bn.shift.data) v = rng.normal();
            check_layer(bn, testsupport::random_tensor({batch, length, channels}, rng));
        }
        {
            ReLU relu;
            check_layer(relu, testsupport::random_tensor({batch, length, channels}, rng));
        }
        {
            Dense dense(2 + rng.index(5), 1 + rng.index(4));
            dense.init_params(rng);
            for (double& v : dense.b.data) v = 0.3 * rng.normal();
            check_layer(dense, testsupport::random_tensor({batch, dense.in_features}, rng));
        }
        {
            Flatten flatten;
            check_layer(flatten, testsupport::random_tensor({batch, length, channels}, rng));
        }
        {
            Reshape reshape(length / 2, 2 * channels);
            check_layer(reshape,
                        testsupport::random_tensor({batch, length * channels}, rng));
        }

        // Whole toy CAE: d(loss)/d(parameters) against finite differences.
        ArchitectureSpec spec;
        spec.pool_factor = 2;
        const std::size_t nblocks = 1 + rng.index(2);
        spec.input_length = (nblocks == 1 ? 2 : 4) * (1 + rng.index(3));
        spec.input_channels = 1 + rng.index(2);
        for (std::size_t b = 0; b < nblocks; ++b)
            spec.blocks.push_back({1 + rng.index(5), 3});
        spec.feature_dim = 1 + rng.index(3);
        CAEModel model(spec, rng.next_u64());
        Tensor x = testsupport::random_tensor({2, spec.input_length, spec.input_channels},
                                              rng);
        auto loss_fn = [&]() {
            const Tensor h = model.encoder().forward(x, Mode::train);
            return mse_loss(model.decoder().forward(h, Mode::train), x);
        };
        model.encoder().zero_grads();
        model.decoder().zero_grads();
        const Tensor h = model.encoder().forward(x, Mode::train);
        const Tensor pred = model.decoder().forward(h, Mode::train);
        model.encoder().backward(model.decoder().backward(mse_grad(pred, x)));
        for (const auto& p : model.parameters())
            worst_model = std::max(
                worst_model, testsupport::max_rel_err(
                                 p.grad->data, testsupport::numeric_grad(*p.value, loss_fn)));
    }

    const double elapsed = now_seconds() - t0;
    ck.require(worst_layer < 1e-5, "layer gradient max rel err " + std::to_string(worst_layer));
    ck.require(worst_model < 1e-4, "model gradient max rel err " + std::to_string(worst_model));
    ck.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s exceeds 60s");
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "layer err %.2e, end-to-end err %.2e, 100 configs in %.1fs",
                  worst_layer, worst_model, elapsed);
    ck.note(buf);
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 2

Outcome architecture_contract() {
    Check ck;
    const ArchitectureSpec spec = ArchitectureSpec::full_scale(3);
    CAEModel model(spec, 1);
    Rng rng(2);
    const Tensor h = model.encode(testsupport::random_tensor({1, 192, 3}, rng));
    ck.require(h.shape == std::vector<std::size_t>{1, 10}, "latent dimension != 10");
    ck.require(model.layer_count() == 25,
               "layer count " + std::to_string(model.layer_count()));

    // Three toy specs against hand-computed parameter sums.
    {
        ArchitectureSpec s;
        s.input_length = 8;
        s.input_channels = 1;
        s.blocks = {{4, 3}};
        s.feature_dim = 2;
        s.pool_factor = 2;
        CAEModel m(s, 1);
        const std::size_t expected = (3 * 1 * 4 + 4) + (2 * 4) + (16 * 2 + 2) +
                                     (2 * 16 + 16) + (3 * 4 * 1 + 1);
        ck.require(m.param_count() == expected, "toy spec 1 param count");
    }
    {
        ArchitectureSpec s;
        s.input_length = 12;
        s.input_channels = 2;
        s.blocks = {};
        s.feature_dim = 3;
        CAEModel m(s, 1);
        ck.require(m.param_count() == (24 * 3 + 3) + (3 * 24 + 24),
                   "dense-only param count");
    }
    {
        ArchitectureSpec s;
        s.input_length = 16;
        s.input_channels = 2;
        s.blocks = {{3, 5}, {6, 3}};
        s.feature_dim = 4;
        s.pool_factor = 2;
        CAEModel m(s, 1);
        // encoder: conv(5*2*3+3) bn(6) conv(3*3*6+6) bn(12) dense(24*4+4)
        // decoder: dense(4*24+24) up conv(3*6*3+3) bn(6) up conv(5*3*2+2)
        // (kernel sizes mirror in reverse, so the final conv uses kernel 5)
        const std::size_t expected = (5 * 2 * 3 + 3) + 6 + (3 * 3 * 6 + 6) + 12 +
                                     (24 * 4 + 4) + (4 * 24 + 24) + (3 * 6 * 3 + 3) + 6 +
                                     (5 * 3 * 2 + 2);
        ck.require(m.param_count() == expected, "two-block param count");
    }
    ck.note("latent dim 10, 25 layers, 3 hand-counted specs (20.1M total excluded: "
            "kernel geometry unpublished)");
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 3

Outcome training_behavior() {
    Check ck;
    const double t0 = now_seconds();
    ArchitectureSpec spec;
    spec.input_length = 32;
    spec.input_channels = 1;
    spec.blocks = {{8, 3}, {8, 3}};
    spec.feature_dim = 4;
    spec.pool_factor = 2;

    Tensor data = Tensor::zeros({8, 32, 1});
    for (std::size_t i = 0; i < 8; ++i) {
        const double freq = 1.0 + 0.5 * static_cast<double>(i);
        const double phase = 0.37 * static_cast<double>(i);
        for (std::size_t t = 0; t < 32; ++t)
            data.at(i, t, 0) = std::sin(2.0 * 3.14159265358979323846 * freq *
                                            static_cast<double>(t) / 32.0 +
                                        phase);
    }

    TrainConfig config;
    config.epochs = 300;
    config.batch_size = 8;
    config.seed = 7;

    CAEModel model(spec, 55);
    const TrainReport report = model.train(data, config);
    ck.require(report.final_loss < 0.05 * report.loss_curve.front(),
               "final loss " + std::to_string(report.final_loss) + " vs epoch-0 " +
                   std::to_string(report.loss_curve.front()));

    CAEModel again(spec, 55);
    const TrainReport report2 = again.train(data, config);
    ck.require(report.loss_curve == report2.loss_curve,
               "loss curves differ across identically seeded runs");

    const double elapsed = now_seconds() - t0;
    ck.require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s exceeds 2min");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "loss %.3g -> %.3g over 300 epochs in %.1fs",
                  report.loss_curve.front(), report.final_loss, elapsed);
    ck.note(buf);
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 4

Outcome statistical_oracles() {
    Check ck;
    Rng rng(888);

    // correlation_integral vs the naive double loop, bitwise.
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 30 + rng.index(471);
        std::vector<double> x(n);
        for (double& v : x) v = rng.normal();
        const std::size_t dim = 1 + rng.index(5);
        const double eps = rng.uniform(0.1, 2.0);
        if (correlation_integral(x, dim, eps) !=
            testsupport::naive_correlation_integral(x, dim, eps)) {
            ck.require(false, "correlation integral mismatch at trial " +
                                  std::to_string(trial));
            break;
        }
    }

    // Ljung-Box Q against direct recomputation.
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(200 + rng.index(300));
        for (double& v : x) v = rng.normal();
        const std::size_t h = 1 + rng.index(10);
        const auto [q, p] = ljung_box_at_lag(x, h);
        double mean = 0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double denom = 0;
        for (double v : x) denom += (v - mean) * (v - mean);
        double q_direct = 0;
        for (std::size_t k = 1; k <= h; ++k) {
            double num = 0;
            for (std::size_t t = 0; t + k < x.size(); ++t)
                num += (x[t] - mean) * (x[t + k] - mean);
            const double r = num / denom;
            q_direct += r * r / static_cast<double>(x.size() - k);
        }
        q_direct *= static_cast<double>(x.size()) * static_cast<double>(x.size() + 2);
        ck.require(std::abs(q - q_direct) < 1e-10,
                   "Ljung-Box Q deviates from direct formula");
    }

    // Runs z against the closed form on 20 hand-dichotomized fixtures.
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(20 + rng.index(200));
        for (double& v : x) v = rng.normal();
        double mean = 0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double n1 = 0, n2 = 0, runs = 0;
        int prev = 0;
        for (double v : x) {
            if (v == mean) continue;
            const int s = v > mean ? 1 : -1;
            (s > 0 ? n1 : n2) += 1;
            if (s != prev) runs += 1;
            prev = s;
        }
        const double total = n1 + n2;
        const double mu = 2 * n1 * n2 / total + 1;
        const double var = 2 * n1 * n2 * (2 * n1 * n2 - n1 - n2) /
                           (total * total * (total - 1));
        const double z = (runs - mu) / std::sqrt(var);
        ck.require(std::abs(runs_test(x).statistic - z) < 1e-10,
                   "runs z deviates from closed form");
    }

    const double chi = chi_square_sf(18.307, 10);
    ck.require(std::abs(chi - 0.05) < 1e-4,
               "chi_square_sf(18.307,10) = " + std::to_string(chi));
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "50 bitwise C_m, 20 LB, 20 runs fixtures; chi2 sf = %.6f", chi);
    ck.note(buf);
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 5

Outcome power_and_calibration() {
    Check ck;
    const double t0 = now_seconds();

    // Power: deterministic chaos must be rejected.
    std::vector<double> chaos;
    double v = 0.3456;
    for (int i = 0; i < 1000; ++i) {
        v = 4.0 * v * (1.0 - v);
        chaos.push_back(v);
    }
    const double chaos_p = bds_test(chaos).p_value;
    ck.require(chaos_p < 0.01, "logistic-map mean p " + std::to_string(chaos_p));

    // Calibration: false rejections at the 1% level over 200 Gaussian runs.
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(40000 + seed);
        std::vector<double> x(1000);
        for (double& w : x) w = rng.normal();
        if (bds_test(x).p_value < 0.01) ++rejections;
    }
    ck.require(rejections <= 10, // 5% of 200
               "BDS 1%-level rejections " + std::to_string(rejections) + "/200");

    // Single-lag Ljung-Box p uniformity over 1000 replications.
    std::vector<double> ps;
    ps.reserve(1000);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(90000 + seed);
        std::vector<double> x(500);
        for (double& w : x) w = rng.normal();
        ps.push_back(ljung_box_at_lag(x, 1).second);
    }
    std::sort(ps.begin(), ps.end());
    double ks = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double hi = static_cast<double>(i + 1) / 1000.0;
        const double lo = static_cast<double>(i) / 1000.0;
        ks = std::max({ks, std::abs(hi - ps[i]), std::abs(ps[i] - lo)});
    }
    ck.require(ks < 0.1, "KS distance from uniform " + std::to_string(ks));

    const double elapsed = now_seconds() - t0;
    ck.require(elapsed < 300.0, "runtime " + std::to_string(elapsed) + "s exceeds 5min");
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "chaos p %.4f, %d/200 false rejections, LB KS %.3f, %.1fs", chaos_p,
                  rejections, ks, elapsed);
    ck.note(buf);
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 6

Outcome clustering_pca() {
    Check ck;
    Rng rng(606);

    // Exhaustive-enumeration optimum on 100 small instances.
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.index(5);
        const std::size_t k = 2 + rng.index(2);
        LatentMatrix pts;
        pts.dim = 2;
        for (std::size_t i = 0; i < n; ++i) {
            pts.symbols.push_back("p" + std::to_string(i));
            pts.values.push_back(rng.uniform(-5, 5));
            pts.values.push_back(rng.uniform(-5, 5));
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t combos = 1;
        for (std::size_t i = 0; i < n; ++i) combos *= k;
        std::vector<int> labels(n);
        for (std::size_t code = 0; code < combos; ++code) {
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                labels[i] = static_cast<int>(c % k);
                c /= k;
            }
            std::vector<double> centroid(k * 2, 0.0);
            std::vector<std::size_t> counts(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                ++counts[static_cast<std::size_t>(labels[i])];
                centroid[static_cast<std::size_t>(labels[i]) * 2] += pts.at(i, 0);
                centroid[static_cast<std::size_t>(labels[i]) * 2 + 1] += pts.at(i, 1);
            }
            bool empty = false;
            for (std::size_t cc = 0; cc < k; ++cc) {
                if (counts[cc] == 0) {
                    empty = true;
                    break;
                }
                centroid[cc * 2] /= static_cast<double>(counts[cc]);
                centroid[cc * 2 + 1] /= static_cast<double>(counts[cc]);
            }
            if (empty) continue;
            double inertia = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = pts.at(i, 0) - centroid[static_cast<std::size_t>(labels[i]) * 2];
                const double dy = pts.at(i, 1) - centroid[static_cast<std::size_t>(labels[i]) * 2 + 1];
                inertia += dx * dx + dy * dy;
            }
            best = std::min(best, inertia);
        }
        const ClusterAssignment a = kmeans(pts, k, rng.next_u64(), 32);
        if (!(a.inertia <= best + 1e-9 * std::max(1.0, best))) {
            ck.require(false, "kmeans missed the global optimum at trial " +
                                  std::to_string(trial));
            break;
        }
    }

    // ARI on 10-sigma-separated blobs.
    {
        LatentMatrix pts;
        pts.dim = 3;
        std::vector<int> truth;
        Rng blob_rng(707);
        const double centers[3][3] = {{0, 0, 0}, {10, 0, 0}, {0, 10, 0}};
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 20; ++i) {
                pts.symbols.push_back("b");
                truth.push_back(c);
                for (int j = 0; j < 3; ++j)
                    pts.values.push_back(centers[c][j] + blob_rng.normal());
            }
        const ClusterAssignment a = kmeans(pts, 3, 11, 10);
        ck.require(testsupport::adjusted_rand_index(a.labels, truth) == 1.0,
                   "blob ARI below 1");
    }

    // PCA projected variance vs independent eigensolver.
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 3 + rng.index(8);
        const std::size_t n = 30 + rng.index(50);
        LatentMatrix pts;
        pts.dim = dim;
        for (std::size_t i = 0; i < n; ++i) {
            pts.symbols.push_back("v");
            for (std::size_t j = 0; j < dim; ++j)
                pts.values.push_back(rng.normal() * (1.0 + 2.0 * static_cast<double>(j)));
        }
        std::vector<double> mean(dim, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) mean[j] += pts.at(i, j);
        for (double& m : mean) m /= static_cast<double>(n);
        std::vector<double> cov(dim * dim, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < dim; ++p)
                for (std::size_t q = 0; q < dim; ++q)
                    cov[p * dim + q] +=
                        (pts.at(i, p) - mean[p]) * (pts.at(i, q) - mean[q]);
        for (double& c : cov) c /= static_cast<double>(n - 1);
        const auto oracle = testsupport::power_iteration_eigenvalues(cov, dim, 2);
        const Embedding2D e = pca_2d(pts);
        double var0 = 0, var1 = 0;
        for (const auto& c : e.coordinates) {
            var0 += c[0] * c[0];
            var1 += c[1] * c[1];
        }
        var0 /= static_cast<double>(n - 1);
        var1 /= static_cast<double>(n - 1);
        ck.require(std::abs(var0 - oracle[0]) < 1e-10 * std::max(1.0, oracle[0]) &&
                       std::abs(var1 - oracle[1]) < 1e-10 * std::max(1.0, oracle[0]),
                   "PCA variance mismatch vs brute eigenvalues");
    }
    ck.note("100 exhaustive instances, ARI 1.0, 20 PCA oracle comparisons");
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 7

const char* kReferenceTable[11][9] = {
    // LB, Runs, BDS per period; "--" marks unavailable.
    /*BTC*/ {"0.00", "0.12", "0.00", "0.52", "0.09", "0.00", "0.07", "0.38", "0.02"},
    /*ETH*/ {"0.00", "0.49", "0.21", "0.67", "0.57", "0.00", "0.01", "0.17", "0.14"},
    /*LTC*/ {"0.00", "0.02", "0.00", "0.04", "0.04", "0.00", "0.38", "0.03", "0.13"},
    /*XRP*/ {"0.00", "0.00", "0.00", "0.00", "0.00", "0.00", "0.41", "0.01", "0.00"},
    /*XLM*/ {"0.00", "0.00", "0.00", "0.00", "0.78", "0.00", "0.35", "0.72", "0.07"},
    /*XMR*/ {"0.18", "0.79", "0.00", "0.00", "0.22", "0.00", "0.03", "0.00", "0.03"},
    /*DASH*/ {"0.35", "0.03", "0.00", "0.14", "0.31", "0.00", "0.02", "0.04", "0.03"},
    /*USDT*/ {"0.00", "0.00", "0.47", "0.00", "0.11", "0.00", "0.00", "0.01", "0.00"},
    /*BNB*/ {"--", "--", "--", "0.00", "0.71", "0.00", "0.01", "0.58", "0.00"},
    /*TRX*/ {"--", "--", "--", "0.00", "0.15", "0.00", "0.00", "0.29", "0.00"},
    /*EUR*/ {"0.80", "0.54", "0.02", "0.12", "0.33", "0.25", "0.40", "0.81", "0.70"},
};
const char* kReferenceSymbols[11] = {"BTC", "ETH", "LTC", "XRP", "XLM", "XMR",
                                  "DASH", "USDT", "BNB", "TRX", "EUR"};

Outcome table_reproduction() {
    Check ck;
    const char* env = std::getenv("CCAE_REAL_SNAPSHOT");
    std::filesystem::path snapshot =
        env ? std::filesystem::path(env) : testsupport::data_dir() / "real_snapshot";
    if (!std::filesystem::is_directory(snapshot)) {
        ck.note("SKIP: no historical snapshot provided; replaced by criteria 4-5 "
                "per the stated fallback");
        return ck.outcome;
    }

    const auto coins = load_snapshot_dir(snapshot);
    // The published periods close the day before each 18-month boundary.
    const std::vector<PeriodWindow> windows = {
        {0, Date(2015, 1, 1), Date(2016, 6, 30)},
        {1, Date(2016, 7, 1), Date(2017, 12, 31)},
        {2, Date(2018, 1, 1), Date(2019, 6, 30)},
    };
    const auto samples = collect_return_samples(coins, windows);
    const EfficiencyTable table = efficiency_table(samples);

    std::map<std::pair<std::string, int>, const EfficiencyCell*> cells;
    for (const auto& row : table.rows)
        cells[{row.symbol, row.window.index}] = &row.cell;

    int compared = 0;
    for (int s = 0; s < 11; ++s) {
        for (int w = 0; w < 3; ++w) {
            const auto it = cells.find({kReferenceSymbols[s], w});
            if (it == cells.end()) {
                ck.require(false, std::string(kReferenceSymbols[s]) + " missing from table");
                continue;
            }
            for (int t = 0; t < 3; ++t) {
                const std::string expected = kReferenceTable[s][w * 3 + t];
                if (expected == "--") {
                    ck.require(!it->second->available,
                               std::string(kReferenceSymbols[s]) + " period " +
                                   std::to_string(w) + " should be unavailable");
                    continue;
                }
                ck.require(it->second->available, std::string(kReferenceSymbols[s]) +
                                                      " period " + std::to_string(w) +
                                                      " unexpectedly unavailable");
                if (!it->second->available) continue;
                const double want = std::atof(expected.c_str());
                const double got = t == 0   ? it->second->lb.p_value
                                   : t == 1 ? it->second->runs.p_value
                                            : it->second->bds.p_value;
                ++compared;
                ck.require(std::abs(got - want) <= 0.05 + 1e-12,
                           std::string(kReferenceSymbols[s]) + " period " +
                               std::to_string(w) + " test " + std::to_string(t) +
                               ": got " + std::to_string(got) + " want " + expected);
            }
        }
    }
    ck.note("compared " + std::to_string(compared) + " cells against the published table");
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 8

Outcome pipeline_determinism() {
    Check ck;
    const double t0 = now_seconds();
    PipelineConfig config;
    config.snapshot_dir = testsupport::data_dir() / "synthetic_snapshot";
    config.anchor_date = Date(2013, 5, 15);
    config.period_months = 6;
    config.period_count = 12;
    config.channels = {Channel::returns, Channel::hl_ratio, Channel::volume};
    config.architecture.input_length = 192;
    config.architecture.input_channels = 3;
    config.architecture.blocks = {{8, 3}, {8, 3}};
    config.architecture.feature_dim = 4;
    config.architecture.pool_factor = 2;
    config.architecture.min_filters = 1;
    config.train.epochs = 6;
    config.train.batch_size = 4;
    config.train.seed = 11;
    config.cluster.k = 2;
    config.cluster.seed = 3;
    config.cluster.restarts = 6;

    const auto dir1 = testsupport::scratch_dir("acc_run1");
    const auto dir2 = testsupport::scratch_dir("acc_run2");
    const RunManifest m1 = run_pipeline(config, dir1, 3);
    const RunManifest m2 = run_pipeline(config, dir2, 1);

    ck.require(m1.exit_code() == 0, "first run exit code " + std::to_string(m1.exit_code()));
    std::map<std::string, std::string> d1, d2;
    for (const auto& p : m1.periods)
        for (const auto& o : p.outputs) d1[o.path] = o.digest;
    for (const auto& p : m2.periods)
        for (const auto& o : p.outputs) d2[o.path] = o.digest;
    ck.require(!d1.empty(), "no outputs produced");
    ck.require(d1 == d2, "output digests differ between reruns");

    const double elapsed = now_seconds() - t0;
    ck.require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s exceeds 2min");
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%zu outputs byte-identical across runs, %.1fs",
                  d1.size(), elapsed);
    ck.note(buf);
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    return ck.outcome;
}

// ------------------------------------------------------------ criterion 9

Outcome telescoping_returns() {
    Check ck;
    Rng rng(909);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.index(120);
        CoinSeries s;
        s.symbol = "T";
        Date d(2015, 1, 1);
        double price = rng.uniform(0.001, 5000.0);
        for (std::size_t i = 0; i < n; ++i) {
            s.records.push_back({d, price, price, price, price, 0.0});
            price *= std::exp(0.2 * rng.normal());
            d = d.add_days(1);
        }
        const DatedSeries r = log_returns(s);
        double sum = 0;
        for (double v : r.values) sum += v;
        const double expected = std::log(s.records.back().close / s.records.front().close);
        worst = std::max(worst, std::abs(sum - expected));
    }
    ck.require(worst < 1e-12, "telescoping error " + std::to_string(worst));
    char buf[80];
    std::snprintf(buf, sizeof(buf), "worst deviation %.2e over 1000 paths", worst);
    ck.note(buf);
    return ck.outcome;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 gradient correctness", gradient_correctness},
        {"2 architecture contract", architecture_contract},
        {"3 training behavior", training_behavior},
        {"4 statistical-test oracles", statistical_oracles},
        {"5 test power and calibration", power_and_calibration},
        {"6 clustering and PCA", clustering_pca},
        {"7 published-table reproduction", table_reproduction},
        {"8 pipeline determinism", pipeline_determinism},
        {"9 telescoping returns", telescoping_returns},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %s%s%s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.name, outcome.detail.empty() ? "" : " - ",
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
