#ifndef CCAE_EFFICIENCY_HPP
#define CCAE_EFFICIENCY_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccae/market_data.hpp"

namespace ccae {

/// Sample autocorrelation at `lag`:
/// sum (x_t - mean)(x_{t+lag} - mean) / sum (x_t - mean)^2.
double autocorrelation(const std::vector<double>& x, std::size_t lag);

/// One test outcome plus its parameterization.
struct TestReport {
    std::string test_name;
    double statistic = 0;
    double p_value = 1;
    std::map<std::string, double> params;
};

/// Ljung-Box Q at one fixed lag horizon h:
/// Q_h = n (n+2) sum_{k=1..h} acf_k^2 / (n-k), p from the chi-square upper
/// tail with h degrees of freedom. Returns {Q_h, p_h}.
std::pair<double, double> ljung_box_at_lag(const std::vector<double>& x, std::size_t h);

/// Portmanteau scan over h = 1..max_lag; reports the smallest p and records
/// the winning horizon and statistic in params ("best_lag", "Q").
TestReport ljung_box(const std::vector<double>& x, std::size_t max_lag = 10);

/// Wald-Wolfowitz runs test around the sample mean. Values strictly above
/// the mean form one class, strictly below the other, exact ties are
/// excluded. Two-sided normal p on the standardized run count.
TestReport runs_test(const std::vector<double>& x);

/// C_m(eps): fraction of i<j pairs of m-length delay embeddings whose
/// max-coordinate distance is strictly below eps.
double correlation_integral(const std::vector<double>& x, std::size_t dim, double eps);

/// BDS serial-independence test. eps = distance_mult * sample std; for each
/// embedding dimension m in [dim_lo, dim_hi] the statistic
/// sqrt(n_m) (C_m - C_1^m) is standardized by the asymptotic standard error
/// built from the full-sample C_1 and the triple-closeness moment k, with
/// C_1 evaluated on the trailing n_m observations. The reported p-value is
/// the mean of the per-dimension two-sided normal p-values; per-dimension
/// statistics live in params ("stat_m", "p_m", plus "eps", "k", "c1").
TestReport bds_test(const std::vector<double>& x, std::size_t dim_lo = 2,
                    std::size_t dim_hi = 5, double distance_mult = 2.5);

/// Daily log returns of one coin over one window.
struct ReturnSample {
    std::string symbol;
    PeriodWindow window;
    std::vector<double> values;
};

struct EfficiencyCell {
    bool available = false;
    std::string reason; // why unavailable
    TestReport lb, runs, bds;
};

struct EfficiencyRow {
    std::string symbol;
    PeriodWindow window;
    EfficiencyCell cell;
};

struct EfficiencyTable {
    std::vector<EfficiencyRow> rows; // ordered by (symbol, window)
};

struct EfficiencyParams {
    std::size_t lb_max_lag = 10;
    std::size_t bds_dim_lo = 2;
    std::size_t bds_dim_hi = 5;
    double bds_distance = 2.5;
    std::size_t min_length = 30; // validity floor per sample
    std::size_t bds_min_length = 50;
};

/// Runs all three tests on every sample; samples below the coverage floor or
/// with degenerate values are marked unavailable with a reason instead of
/// failing the batch.
EfficiencyTable efficiency_table(const std::vector<ReturnSample>& samples,
                                 const EfficiencyParams& params = {});

/// CSV layout `symbol,period_start,period_end,lb_p,runs_p,bds_p` with
/// two-decimal p-values; unavailable cells print "--".
void write_efficiency_csv(const EfficiencyTable& table, const std::filesystem::path& path);

/// Full-precision sidecar with statistics and per-test parameters.
void write_efficiency_json(const EfficiencyTable& table, const std::filesystem::path& path);

} // namespace ccae

#endif
