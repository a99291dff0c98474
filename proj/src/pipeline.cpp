#include "ccae/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "ccae/clustering.hpp"
#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"
#include "ccae/rng.hpp"
#include "ccae/sha256.hpp"

namespace ccae {

namespace {

nlohmann::json architecture_to_json(const ArchitectureSpec& s) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : s.blocks) blocks.push_back({b.filters, b.kernel});
    return {{"input_length", s.input_length},
            {"input_channels", s.input_channels},
            {"blocks", blocks},
            {"feature_dim", s.feature_dim},
            {"pool_factor", s.pool_factor},
            {"min_filters", s.min_filters},
            {"max_filters", s.max_filters}};
}

ArchitectureSpec architecture_from_json(const nlohmann::json& j, std::size_t channels) {
    ArchitectureSpec s = ArchitectureSpec::full_scale(channels);
    if (j.contains("input_length")) s.input_length = j["input_length"];
    s.input_channels = channels;
    if (j.contains("blocks")) {
        s.blocks.clear();
        for (const auto& b : j["blocks"])
            s.blocks.push_back({b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>()});
        // Custom block schedules carry their own bounds; the 64..512 band
        // belongs to the stock full-scale geometry.
        s.min_filters = 1;
        s.max_filters = 1 << 14;
    }
    if (j.contains("feature_dim")) s.feature_dim = j["feature_dim"];
    if (j.contains("pool_factor")) s.pool_factor = j["pool_factor"];
    if (j.contains("min_filters")) s.min_filters = j["min_filters"];
    if (j.contains("max_filters")) s.max_filters = j["max_filters"];
    return s;
}

} // namespace

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["snapshot_dir"] = c.snapshot_dir.string();
    j["anchor_date"] = c.anchor_date.to_string();
    j["period_months"] = c.period_months;
    j["period_count"] = c.period_count;
    std::vector<std::string> names;
    for (Channel ch : c.channels) names.emplace_back(channel_name(ch));
    j["channels"] = names;
    j["architecture"] = architecture_to_json(c.architecture);
    j["train"] = {{"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"seed", c.train.seed},
                  {"learning_rate", c.train.optimizer.learning_rate},
                  {"beta1", c.train.optimizer.beta1},
                  {"beta2", c.train.optimizer.beta2},
                  {"epsilon", c.train.optimizer.epsilon}};
    j["cluster"] = {{"k", c.cluster.k},
                    {"k_lo", c.cluster.k_lo},
                    {"k_hi", c.cluster.k_hi},
                    {"seed", c.cluster.seed},
                    {"restarts", c.cluster.restarts}};
    j["tests"] = {{"lb_max_lag", c.tests.lb_max_lag},
                  {"bds_dim_lo", c.tests.bds_dim_lo},
                  {"bds_dim_hi", c.tests.bds_dim_hi},
                  {"bds_distance", c.tests.bds_distance},
                  {"min_length", c.tests.min_length},
                  {"bds_min_length", c.tests.bds_min_length}};
    return j;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.snapshot_dir = j.at("snapshot_dir").get<std::string>();
    c.anchor_date = Date::parse(j.value("anchor_date", std::string("2013-05-15")));
    c.period_months = j.value("period_months", 6);
    c.period_count = j.value("period_count", 12);
    if (j.contains("channels")) {
        c.channels.clear();
        for (const auto& name : j["channels"])
            c.channels.push_back(channel_from_name(name.get<std::string>()));
    }
    if (c.channels.empty()) throw ConfigError("config: channels must be non-empty");
    c.architecture = architecture_from_json(j.value("architecture", nlohmann::json::object()),
                                            c.channels.size());
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.train.epochs = t.value("epochs", c.train.epochs);
        c.train.batch_size = t.value("batch_size", c.train.batch_size);
        c.train.seed = t.value("seed", c.train.seed);
        c.train.optimizer.learning_rate =
            t.value("learning_rate", c.train.optimizer.learning_rate);
        c.train.optimizer.beta1 = t.value("beta1", c.train.optimizer.beta1);
        c.train.optimizer.beta2 = t.value("beta2", c.train.optimizer.beta2);
        c.train.optimizer.epsilon = t.value("epsilon", c.train.optimizer.epsilon);
    }
    if (j.contains("cluster")) {
        const auto& k = j["cluster"];
        c.cluster.k = k.value("k", c.cluster.k);
        c.cluster.k_lo = k.value("k_lo", c.cluster.k_lo);
        c.cluster.k_hi = k.value("k_hi", c.cluster.k_hi);
        c.cluster.seed = k.value("seed", c.cluster.seed);
        c.cluster.restarts = k.value("restarts", c.cluster.restarts);
    }
    if (j.contains("tests")) {
        const auto& t = j["tests"];
        c.tests.lb_max_lag = t.value("lb_max_lag", c.tests.lb_max_lag);
        c.tests.bds_dim_lo = t.value("bds_dim_lo", c.tests.bds_dim_lo);
        c.tests.bds_dim_hi = t.value("bds_dim_hi", c.tests.bds_dim_hi);
        c.tests.bds_distance = t.value("bds_distance", c.tests.bds_distance);
        c.tests.min_length = t.value("min_length", c.tests.min_length);
        c.tests.bds_min_length = t.value("bds_min_length", c.tests.bds_min_length);
    }
    c.architecture.validate();
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        return pipeline_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

int RunManifest::exit_code() const {
    std::size_t ok = 0;
    for (const auto& p : periods) ok += p.status == "ok" ? 1 : 0;
    if (ok == periods.size()) return 0;
    return ok > 0 ? 2 : 1;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    j["config"] = config_canonical;
    nlohmann::json inputs_json = nlohmann::json::array();
    for (const auto& in : inputs)
        inputs_json.push_back({{"path", in.path}, {"sha256", in.digest}});
    j["inputs"] = inputs_json;
    nlohmann::json periods_json = nlohmann::json::array();
    for (const auto& p : periods) {
        nlohmann::json pj;
        pj["index"] = p.index;
        pj["status"] = p.status;
        if (!p.detail.empty()) pj["detail"] = p.detail;
        pj["seconds"] = p.seconds;
        nlohmann::json outs = nlohmann::json::array();
        for (const auto& o : p.outputs)
            outs.push_back({{"path", o.path}, {"sha256", o.digest}});
        pj["outputs"] = outs;
        periods_json.push_back(pj);
    }
    j["periods"] = periods_json;
    j["total_seconds"] = total_seconds;
    return j;
}

std::vector<ReturnSample> collect_return_samples(const std::vector<CoinSeries>& coins,
                                                 const std::vector<PeriodWindow>& windows) {
    std::vector<ReturnSample> samples;
    samples.reserve(coins.size() * windows.size());
    for (const auto& coin : coins) {
        for (const auto& window : windows) {
            ReturnSample s;
            s.symbol = coin.symbol;
            s.window = window;
            // Whatever records exist inside the window contribute returns; a
            // coin listed mid-window still gets tested once it clears the
            // validity floor, and a pre-listing window ends up unavailable.
            CoinSeries sliced{coin.symbol, coin.slice(window.start, window.end)};
            if (sliced.records.size() >= 2) s.values = log_returns(sliced).values;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

const CoinSeries& find_coin(const std::vector<CoinSeries>& coins, const std::string& symbol) {
    for (const auto& c : coins)
        if (c.symbol == symbol) return c;
    throw DataError("symbol " + symbol + " not present in snapshot");
}

CorrelationReport correlate_closes(const std::vector<CoinSeries>& coins,
                                   const std::string& symbol_a, const std::string& symbol_b,
                                   const PeriodWindow& window) {
    const CoinSeries& a = find_coin(coins, symbol_a);
    const CoinSeries& b = find_coin(coins, symbol_b);
    if (!a.covers(window.start, window.end))
        throw DataError(symbol_a + " does not cover window " + window.label());
    if (!b.covers(window.start, window.end))
        throw DataError(symbol_b + " does not cover window " + window.label());
    std::vector<double> closes_a, closes_b;
    for (const auto& r : a.slice(window.start, window.end)) closes_a.push_back(r.close);
    for (const auto& r : b.slice(window.start, window.end)) closes_b.push_back(r.close);

    CorrelationReport report;
    report.symbol_a = symbol_a;
    report.symbol_b = symbol_b;
    report.window = window;
    report.days = closes_a.size();
    report.coefficient = pearson(closes_a, closes_b);
    return report;
}

DatedSeries volatility_series(const std::vector<CoinSeries>& coins, const std::string& symbol,
                              std::size_t window_days, std::size_t periods_per_year) {
    const CoinSeries& coin = find_coin(coins, symbol);
    return rolling_volatility(log_returns(coin), window_days, periods_per_year);
}

namespace {

// Runs every stage for one window and returns the result record; all file
// outputs land under <out_dir>/period_<index>/.
PeriodResult run_period(const PipelineConfig& config, const std::vector<CoinSeries>& coins,
                        const PeriodWindow& window, const std::filesystem::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    PeriodResult result;
    result.index = window.index;

    char dirname[32];
    std::snprintf(dirname, sizeof(dirname), "period_%02d", window.index);
    const std::filesystem::path dir = out_dir / dirname;
    auto record = [&](const std::filesystem::path& p) {
        result.outputs.push_back(
            {std::filesystem::relative(p, out_dir).string(), Sha256::of_file(p)});
    };

    try {
        FeatureTensor tensor = build_feature_tensor(coins, window, config.channels,
                                                    config.architecture.input_length);
        export_feature_tensor(tensor, dir / "tensor.json", dir / "tensor.csv");
        record(dir / "tensor.json");
        record(dir / "tensor.csv");

        CAEModel model(config.architecture,
                       mix_seed(config.train.seed, static_cast<std::uint64_t>(window.index)));
        TrainConfig train_config = config.train;
        train_config.seed = mix_seed(config.train.seed,
                                     0x100 + static_cast<std::uint64_t>(window.index));
        train_config.batch_size = std::min(train_config.batch_size, tensor.symbols.size());
        const TrainReport report = model.train(tensor.data, train_config);

        std::string curve = "epoch,loss\n";
        for (std::size_t e = 0; e < report.loss_curve.size(); ++e)
            curve += std::to_string(e) + "," + format_double(report.loss_curve[e]) + "\n";
        write_file_atomic(dir / "train_report.csv", curve);
        record(dir / "train_report.csv");

        model.save(dir / "model");
        record(dir / "model" / "architecture.json");
        record(dir / "model" / "params.json");
        record(dir / "model" / "params.bin");

        const LatentMatrix latent = model.encode(tensor);
        write_latent_csv(latent, dir / "latent.csv");
        record(dir / "latent.csv");

        const std::size_t n = latent.count();
        if (n >= 3 && latent.dim >= 2) {
            std::size_t k = config.cluster.k;
            if (k == 0) {
                const std::size_t hi = std::min(config.cluster.k_hi, n - 1);
                const std::size_t lo = std::min(config.cluster.k_lo, hi);
                k = select_k(latent, lo, hi, config.cluster.seed, config.cluster.restarts);
            }
            k = std::min(k, n);
            const ClusterAssignment clusters =
                kmeans(latent, k, config.cluster.seed, config.cluster.restarts);
            const Embedding2D embedding = pca_2d(latent);
            write_cluster_csv(latent, clusters, embedding, dir / "clusters.csv");
            write_cluster_json(clusters, embedding, dir / "clusters.json");
            record(dir / "clusters.csv");
            record(dir / "clusters.json");
        } else {
            result.detail = "clustering skipped: only " + std::to_string(n) +
                            " eligible coins";
        }

        const auto samples = collect_return_samples(coins, {window});
        const EfficiencyTable table = efficiency_table(samples, config.tests);
        write_efficiency_csv(table, dir / "efficiency.csv");
        write_efficiency_json(table, dir / "efficiency.json");
        record(dir / "efficiency.csv");
        record(dir / "efficiency.json");

        result.status = "ok";
    } catch (const Error& e) {
        const std::string what = e.what();
        result.status = what.find("empty universe") != std::string::npos ? "empty" : "failed";
        result.detail = what;
    } catch (const std::exception& e) {
        result.status = "failed";
        result.detail = e.what();
    }

    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace

RunManifest run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                         int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);

    RunManifest manifest;
    manifest.tool_version = kToolVersion;
    manifest.config_canonical = pipeline_config_to_json(config);
    manifest.config_hash = Sha256::of_string(manifest.config_canonical.dump());

    const auto coins = load_snapshot_dir(config.snapshot_dir);
    for (const auto& coin : coins) {
        const auto path = config.snapshot_dir / (coin.symbol + ".csv");
        manifest.inputs.push_back({path.string(), Sha256::of_file(path)});
    }

    const auto windows = make_periods(config.anchor_date, config.period_months,
                                      config.period_count);
    manifest.periods.resize(windows.size());

    if (jobs < 1)
        jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), windows.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= windows.size()) break;
            manifest.periods[i] = run_period(config, coins, windows[i], out_dir);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    manifest.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file_atomic(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    return manifest;
}

} // namespace ccae
