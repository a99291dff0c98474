#ifndef CCAE_PIPELINE_HPP
#define CCAE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccae/cae.hpp"
#include "ccae/efficiency.hpp"
#include "ccae/market_data.hpp"

namespace ccae {

inline constexpr const char* kToolVersion = "coincae 0.1.0";

struct ClusterConfig {
    std::size_t k = 0; // 0 selects k by silhouette over [k_lo, k_hi]
    std::size_t k_lo = 2;
    std::size_t k_hi = 6;
    std::uint64_t seed = 1;
    std::size_t restarts = 10;
};

struct PipelineConfig {
    std::filesystem::path snapshot_dir;
    Date anchor_date{2013, 5, 15};
    int period_months = 6;
    int period_count = 12;
    std::vector<Channel> channels{Channel::returns, Channel::hl_ratio, Channel::volume};
    ArchitectureSpec architecture = ArchitectureSpec::full_scale(3);
    TrainConfig train;
    ClusterConfig cluster;
    EfficiencyParams tests;
};

nlohmann::json pipeline_config_to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct OutputRecord {
    std::string path;   // relative to the run directory
    std::string digest; // sha256
};

struct PeriodResult {
    int index = 0;
    std::string status; // "ok" | "empty" | "failed"
    std::string detail;
    std::vector<OutputRecord> outputs;
    double seconds = 0;
};

struct RunManifest {
    std::string tool_version;
    std::string config_hash;
    nlohmann::json config_canonical;
    std::vector<OutputRecord> inputs;
    std::vector<PeriodResult> periods;
    double total_seconds = 0;

    /// 0: every period ok; 2: some period empty/failed; 1: nothing succeeded.
    int exit_code() const;
    nlohmann::json to_json() const;
};

/// Runs the per-period pipeline (tensor -> train -> encode -> cluster ->
/// efficiency tests) over `jobs` parallel workers and writes all outputs
/// plus manifest.json under `out_dir`. A failure in one period is recorded
/// and does not disturb the others.
RunManifest run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                         int jobs = 1);

/// Daily log returns per coin for each window, computed from the records the
/// coin actually has inside the window. Coins listed mid-window contribute a
/// shorter sample; the efficiency table's validity floor decides whether the
/// cell runs or is marked unavailable.
std::vector<ReturnSample> collect_return_samples(const std::vector<CoinSeries>& coins,
                                                 const std::vector<PeriodWindow>& windows);

struct CorrelationReport {
    std::string symbol_a, symbol_b;
    PeriodWindow window;
    double coefficient = 0;
    std::size_t days = 0;
};

/// Pearson correlation of daily closing prices over one window; both symbols
/// must cover the window completely.
CorrelationReport correlate_closes(const std::vector<CoinSeries>& coins,
                                   const std::string& symbol_a, const std::string& symbol_b,
                                   const PeriodWindow& window);

/// Full-history annualized rolling volatility series for one symbol.
DatedSeries volatility_series(const std::vector<CoinSeries>& coins, const std::string& symbol,
                              std::size_t window_days, std::size_t periods_per_year);

const CoinSeries& find_coin(const std::vector<CoinSeries>& coins, const std::string& symbol);

} // namespace ccae

#endif
