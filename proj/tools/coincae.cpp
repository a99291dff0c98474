// Command-line front end for the market-analysis pipeline: snapshot
// ingestion, autoencoder training, clustering and the efficiency-test
// battery, behind deterministic, scriptable subcommands.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccae/cae.hpp"
#include "ccae/clustering.hpp"
#include "ccae/errors.hpp"
#include "ccae/fetch.hpp"
#include "ccae/io_util.hpp"
#include "ccae/pipeline.hpp"
#include "ccae/sha256.hpp"

namespace {

using namespace ccae;

PipelineConfig config_with_overrides(const std::string& config_path,
                                     std::optional<std::uint64_t> seed) {
    PipelineConfig config = load_pipeline_config(config_path);
    if (seed) {
        config.train.seed = *seed;
        config.cluster.seed = *seed;
    }
    return config;
}

PeriodWindow window_for(const PipelineConfig& config, int period_index) {
    const auto windows =
        make_periods(config.anchor_date, config.period_months, config.period_count);
    if (period_index < 0 || period_index >= static_cast<int>(windows.size()))
        throw ConfigError("period index " + std::to_string(period_index) +
                          " outside [0, " + std::to_string(windows.size()) + ")");
    return windows[static_cast<std::size_t>(period_index)];
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_fetch(const FetchOptions& options, const std::string& out_dir) {
    const FetchResult result = fetch_snapshots(options);

    nlohmann::json entries = nlohmann::json::array();
    for (const auto& o : result.outcomes) {
        nlohmann::json e;
        e["symbol"] = o.symbol;
        e["ok"] = o.ok;
        if (o.ok) {
            e["path"] = o.path;
            e["sha256"] = o.digest;
        } else {
            e["error"] = o.error;
        }
        entries.push_back(e);
    }
    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["files"] = entries;
    write_file_atomic(std::filesystem::path(out_dir) / "fetch_manifest.json",
                      manifest.dump(2) + "\n");

    for (const auto& o : result.outcomes) {
        if (o.ok)
            std::cout << o.symbol << " ok " << o.digest << "\n";
        else
            std::cerr << o.symbol << " failed: " << o.error << "\n";
    }
    if (result.outcomes.empty() || result.failed_count() == 0) return 0;
    return result.ok_count() > 0 ? 2 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cryptocurrency market analysis via a convolutional autoencoder"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;

    // fetch
    auto* fetch_cmd = app.add_subcommand("fetch", "download snapshot CSVs per symbol");
    FetchOptions fetch_options;
    std::string fetch_symbols;
    fetch_cmd->add_option("--template", fetch_options.url_template,
                          "URL template containing {SYMBOL}")
        ->required();
    fetch_cmd->add_option("--symbols", fetch_symbols, "comma-separated symbol list")
        ->required();
    fetch_cmd->add_option("--out", out_path, "output snapshot directory")->required();
    fetch_cmd->add_option("--retries", fetch_options.retries, "retries per symbol");
    fetch_cmd->add_option("--backoff-ms", fetch_options.backoff_ms, "initial retry backoff");
    fetch_cmd->add_option("--rate-ms", fetch_options.rate_ms,
                          "minimum spacing between requests per host");
    bool no_validate = false;
    fetch_cmd->add_flag("--no-validate", no_validate, "skip OHLCV payload validation");
    fetch_cmd->add_option("--config", config_path,
                          "unused; accepted for interface uniformity");
    fetch_cmd->add_option("--seed", seed, "unused; accepted for interface uniformity");

    // run
    auto* run_cmd = app.add_subcommand("run", "execute the full per-period pipeline");
    int jobs = 1;
    run_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    run_cmd->add_option("--out", out_path, "output directory")->required();
    run_cmd->add_option("--seed", seed, "override config seeds");
    run_cmd->add_option("--jobs", jobs, "parallel period workers (0 = hardware)");

    // encode
    auto* encode_cmd =
        app.add_subcommand("encode", "encode one period's tensor with a saved model");
    std::string model_dir;
    int period_index = 0;
    encode_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    encode_cmd->add_option("--model", model_dir, "model checkpoint directory")->required();
    encode_cmd->add_option("--period", period_index, "period index")->required();
    encode_cmd->add_option("--out", out_path, "latent CSV path")->required();
    encode_cmd->add_option("--seed", seed, "override config seeds");

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "cluster and project a latent matrix");
    std::string latent_path;
    std::size_t fixed_k = 0;
    cluster_cmd->add_option("--latent", latent_path, "latent CSV from encode")->required();
    cluster_cmd->add_option("--out", out_path, "output directory")->required();
    cluster_cmd->add_option("--config", config_path, "pipeline config JSON (optional)");
    cluster_cmd->add_option("--k", fixed_k, "fixed cluster count (0 = silhouette)");
    cluster_cmd->add_option("--seed", seed, "clustering seed");

    // efficiency
    auto* eff_cmd =
        app.add_subcommand("efficiency", "run the efficiency-test battery per period");
    eff_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    eff_cmd->add_option("--out", out_path, "output directory")->required();
    eff_cmd->add_option("--seed", seed, "unused; accepted for interface uniformity");

    // correlate
    auto* corr_cmd =
        app.add_subcommand("correlate", "Pearson correlation of two coins' closes");
    std::string pair_symbols;
    corr_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    corr_cmd->add_option("--symbols", pair_symbols, "two symbols, comma separated")
        ->required();
    corr_cmd->add_option("--period", period_index, "period index")->required();
    corr_cmd->add_option("--out", out_path, "optional JSON report path");
    corr_cmd->add_option("--seed", seed, "unused; accepted for interface uniformity");

    // volatility
    auto* vol_cmd =
        app.add_subcommand("volatility", "rolling annualized volatility series");
    std::string vol_symbol;
    std::size_t window_days = 30, annualization = 365;
    vol_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    vol_cmd->add_option("--symbol", vol_symbol, "coin symbol")->required();
    vol_cmd->add_option("--window-days", window_days, "trailing window length");
    vol_cmd->add_option("--annualization", annualization, "periods per year");
    vol_cmd->add_option("--out", out_path, "output CSV path")->required();
    vol_cmd->add_option("--seed", seed, "unused; accepted for interface uniformity");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fetch_cmd->parsed()) {
            fetch_options.symbols = split_list(fetch_symbols);
            fetch_options.out_dir = out_path;
            fetch_options.validate = !no_validate;
            return cmd_fetch(fetch_options, out_path);
        }

        if (run_cmd->parsed()) {
            const PipelineConfig config = config_with_overrides(config_path, seed);
            const RunManifest manifest = run_pipeline(config, out_path, jobs);
            for (const auto& p : manifest.periods)
                std::cout << "period " << p.index << ": " << p.status
                          << (p.detail.empty() ? "" : " (" + p.detail + ")") << "\n";
            return manifest.exit_code();
        }

        if (encode_cmd->parsed()) {
            const PipelineConfig config = config_with_overrides(config_path, seed);
            const PeriodWindow window = window_for(config, period_index);
            const auto coins = load_snapshot_dir(config.snapshot_dir);
            const FeatureTensor tensor = build_feature_tensor(
                coins, window, config.channels, config.architecture.input_length);
            CAEModel model = CAEModel::load(model_dir);
            write_latent_csv(model.encode(tensor), out_path);
            std::cout << "wrote " << out_path << " (" << tensor.symbols.size()
                      << " coins)\n";
            return 0;
        }

        if (cluster_cmd->parsed()) {
            ClusterConfig cluster_config;
            if (!config_path.empty())
                cluster_config = load_pipeline_config(config_path).cluster;
            if (seed) cluster_config.seed = *seed;
            if (fixed_k > 0) cluster_config.k = fixed_k;

            const LatentMatrix latent = read_latent_csv(latent_path);
            std::size_t k = cluster_config.k;
            if (k == 0) {
                const std::size_t hi = std::min(cluster_config.k_hi, latent.count() - 1);
                k = select_k(latent, std::min(cluster_config.k_lo, hi), hi,
                             cluster_config.seed, cluster_config.restarts);
            }
            const ClusterAssignment clusters =
                kmeans(latent, k, cluster_config.seed, cluster_config.restarts);
            const Embedding2D embedding = pca_2d(latent);
            const std::filesystem::path dir = out_path;
            write_cluster_csv(latent, clusters, embedding, dir / "clusters.csv");
            write_cluster_json(clusters, embedding, dir / "clusters.json");
            std::cout << "k=" << k << " inertia=" << format_double(clusters.inertia)
                      << "\n";
            return 0;
        }

        if (eff_cmd->parsed()) {
            const PipelineConfig config = config_with_overrides(config_path, seed);
            const auto coins = load_snapshot_dir(config.snapshot_dir);
            const auto windows = make_periods(config.anchor_date, config.period_months,
                                              config.period_count);
            const auto samples = collect_return_samples(coins, windows);
            const EfficiencyTable table = efficiency_table(samples, config.tests);
            const std::filesystem::path dir = out_path;
            write_efficiency_csv(table, dir / "efficiency.csv");
            write_efficiency_json(table, dir / "efficiency.json");
            std::cout << "wrote " << (dir / "efficiency.csv").string() << " ("
                      << table.rows.size() << " cells)\n";
            return 0;
        }

        if (corr_cmd->parsed()) {
            const PipelineConfig config = config_with_overrides(config_path, seed);
            const auto symbols = split_list(pair_symbols);
            if (symbols.size() != 2)
                throw ConfigError("--symbols expects exactly two symbols");
            const auto coins = load_snapshot_dir(config.snapshot_dir);
            const PeriodWindow window = window_for(config, period_index);
            const CorrelationReport report =
                correlate_closes(coins, symbols[0], symbols[1], window);
            nlohmann::json j;
            j["symbols"] = {report.symbol_a, report.symbol_b};
            j["window"] = {{"index", report.window.index},
                           {"start", report.window.start.to_string()},
                           {"end", report.window.end.to_string()}};
            j["days"] = report.days;
            j["pearson"] = report.coefficient;
            const std::string text = j.dump(2) + "\n";
            if (!out_path.empty()) write_file_atomic(out_path, text);
            std::cout << text;
            return 0;
        }

        if (vol_cmd->parsed()) {
            const PipelineConfig config = config_with_overrides(config_path, seed);
            const auto coins = load_snapshot_dir(config.snapshot_dir);
            const DatedSeries vol =
                volatility_series(coins, vol_symbol, window_days, annualization);
            std::string csv = "date,volatility_pct\n";
            double sum = 0;
            for (std::size_t i = 0; i < vol.size(); ++i) {
                csv += vol.dates[i].to_string() + "," + format_double(vol.values[i]) + "\n";
                sum += vol.values[i];
            }
            write_file_atomic(out_path, csv);
            std::cout << "wrote " << out_path << "; mean "
                      << format_fixed(sum / static_cast<double>(vol.size()), 1) << "%\n";
            return 0;
        }
    } catch (const ccae::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
