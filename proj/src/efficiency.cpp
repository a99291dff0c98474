#include "ccae/efficiency.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"
#include "ccae/special_functions.hpp"

namespace ccae {

namespace {

double mean_of(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_std(const std::vector<double>& x) {
    const double m = mean_of(x);
    double ss = 0;
    for (double v : x) {
        const double d = v - m;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// Pairwise closeness matrix |x_i - x_j| < eps, diagonal true.
std::vector<std::uint8_t> closeness_matrix(const std::vector<double>& x, double eps) {
    const std::size_t n = x.size();
    std::vector<std::uint8_t> ind(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ind[i * n + i] = 1;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::uint8_t close = std::abs(x[i] - x[j]) < eps ? 1 : 0;
            ind[i * n + j] = close;
            ind[j * n + i] = close;
        }
    }
    return ind;
}

// Mean over the strict upper triangle of the trailing m x m submatrix.
double triangle_mean(const std::vector<std::uint8_t>& mat, std::size_t n,
                     std::size_t offset, std::size_t m) {
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            count += mat[(offset + i) * n + (offset + j)];
    const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
    return static_cast<double>(count) / pairs;
}

} // namespace

double autocorrelation(const std::vector<double>& x, std::size_t lag) {
    const std::size_t n = x.size();
    if (lag < 1 || lag >= n)
        throw ConfigError("autocorrelation lag must lie in [1, n)");
    const double m = mean_of(x);
    double denom = 0;
    for (double v : x) {
        const double d = v - m;
        denom += d * d;
    }
    if (denom == 0) throw NumericError("autocorrelation undefined: zero variance");
    double num = 0;
    for (std::size_t t = 0; t + lag < n; ++t)
        num += (x[t] - m) * (x[t + lag] - m);
    return num / denom;
}

std::pair<double, double> ljung_box_at_lag(const std::vector<double>& x, std::size_t h) {
    const std::size_t n = x.size();
    if (n < h + 2)
        throw InsufficientDataError("ljung_box needs length > max_lag + 1");
    double q = 0;
    for (std::size_t k = 1; k <= h; ++k) {
        const double r = autocorrelation(x, k);
        q += r * r / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    return {q, chi_square_sf(q, static_cast<unsigned>(h))};
}

TestReport ljung_box(const std::vector<double>& x, std::size_t max_lag) {
    if (max_lag < 1) throw ConfigError("ljung_box needs max_lag >= 1");
    if (x.size() < max_lag + 2)
        throw InsufficientDataError("ljung_box needs length > max_lag + 1");
    TestReport report;
    report.test_name = "ljung_box";
    report.p_value = 2.0; // above any real p
    for (std::size_t h = 1; h <= max_lag; ++h) {
        const auto [q, p] = ljung_box_at_lag(x, h);
        if (p < report.p_value) {
            report.p_value = p;
            report.statistic = q;
            report.params["best_lag"] = static_cast<double>(h);
            report.params["Q"] = q;
        }
    }
    report.params["max_lag"] = static_cast<double>(max_lag);
    return report;
}

TestReport runs_test(const std::vector<double>& x) {
    if (x.size() < 2) throw InsufficientDataError("runs_test needs at least 2 values");
    const double cutoff = mean_of(x);
    std::vector<int> signs;
    signs.reserve(x.size());
    for (double v : x) {
        if (v > cutoff)
            signs.push_back(1);
        else if (v < cutoff)
            signs.push_back(-1); // exact ties with the mean are excluded
    }
    std::size_t n1 = 0, n2 = 0;
    for (int s : signs) (s > 0 ? n1 : n2) += 1;
    if (n1 == 0 || n2 == 0)
        throw NumericError("runs_test undefined: all values on one side of the mean");

    std::size_t runs = 1;
    for (std::size_t i = 1; i < signs.size(); ++i)
        if (signs[i] != signs[i - 1]) ++runs;

    const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
    const double total = dn1 + dn2;
    const double mu = 2.0 * dn1 * dn2 / total + 1.0;
    const double var =
        2.0 * dn1 * dn2 * (2.0 * dn1 * dn2 - dn1 - dn2) / (total * total * (total - 1.0));
    const double z = (static_cast<double>(runs) - mu) / std::sqrt(var);

    TestReport report;
    report.test_name = "runs";
    report.statistic = z;
    report.p_value = 2.0 * normal_sf(std::abs(z));
    report.params["n_above"] = dn1;
    report.params["n_below"] = dn2;
    report.params["runs"] = static_cast<double>(runs);
    report.params["cutoff"] = cutoff;
    return report;
}

double correlation_integral(const std::vector<double>& x, std::size_t dim, double eps) {
    const std::size_t n = x.size();
    if (dim < 1) throw ConfigError("correlation_integral needs dim >= 1");
    if (!(eps > 0)) throw ConfigError("correlation_integral needs eps > 0");
    if (n < dim + 1)
        throw InsufficientDataError("correlation_integral needs length >= dim + 1");
    const std::size_t m = n - dim + 1; // embedded vector count
    std::uint64_t close = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            bool within = true;
            for (std::size_t d = 0; d < dim; ++d) {
                if (!(std::abs(x[i + d] - x[j + d]) < eps)) {
                    within = false;
                    break;
                }
            }
            close += within ? 1 : 0;
        }
    }
    const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
    return static_cast<double>(close) / pairs;
}

TestReport bds_test(const std::vector<double>& x, std::size_t dim_lo, std::size_t dim_hi,
                    double distance_mult) {
    const std::size_t n = x.size();
    if (dim_lo < 2 || dim_hi < dim_lo)
        throw ConfigError("bds_test needs 2 <= dim_lo <= dim_hi");
    if (n < 50) throw InsufficientDataError("bds_test needs length >= 50");
    if (!(distance_mult > 0)) throw ConfigError("bds_test distance multiplier must be > 0");

    const double sd = sample_std(x);
    if (sd == 0) throw NumericError("bds_test undefined: zero variance");
    const double eps = distance_mult * sd;

    const auto ind = closeness_matrix(x, eps);
    const double c1 = triangle_mean(ind, n, 0, n);

    // Triple-closeness moment k: ordered triples with both pairs inside eps,
    // extracted from row sums of the closeness matrix (diagonal included):
    // sum(row^2) counts ordered (j,l) around each center i, and 3*total - 2n
    // removes the j=l and j-or-l=i degeneracies.
    double row_sq = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t row = 0;
        for (std::size_t j = 0; j < n; ++j) row += ind[i * n + j];
        row_sq += static_cast<double>(row) * static_cast<double>(row);
        total += static_cast<double>(row);
    }
    const double dn = static_cast<double>(n);
    const double kmom =
        (row_sq - 3.0 * total + 2.0 * dn) / (dn * (dn - 1.0) * (dn - 2.0));

    // Joint closeness of m-length embeddings, extended one dimension at a
    // time: joint_m[i][j] = joint_{m-1}[i][j] & ind[i+m-1][j+m-1].
    std::vector<std::uint8_t> joint = ind;
    std::size_t joint_n = n;

    TestReport report;
    report.test_name = "bds";
    report.params["eps"] = eps;
    report.params["c1"] = c1;
    report.params["k"] = kmom;

    double p_sum = 0, stat_sum = 0;
    std::size_t dims = 0;
    for (std::size_t m = 2; m <= dim_hi; ++m) {
        const std::size_t nm = n - m + 1;
        std::vector<std::uint8_t> next(nm * nm, 0);
        for (std::size_t i = 0; i < nm; ++i)
            for (std::size_t j = i + 1; j < nm; ++j) {
                const std::uint8_t v =
                    joint[i * joint_n + j] & ind[(i + m - 1) * n + (j + m - 1)];
                next[i * nm + j] = v;
                next[j * nm + i] = v;
            }
        for (std::size_t i = 0; i < nm; ++i) next[i * nm + i] = 1;
        joint = std::move(next);
        joint_n = nm;
        if (m < dim_lo) continue;

        const double cm = triangle_mean(joint, nm, 0, nm);
        const double c1_trim = triangle_mean(ind, n, m - 1, nm);

        const double md = static_cast<double>(m);
        double tmp = 0;
        for (std::size_t j = 1; j < m; ++j)
            tmp += std::pow(kmom, md - static_cast<double>(j)) *
                   std::pow(c1, 2.0 * static_cast<double>(j));
        const double variance =
            4.0 * (std::pow(kmom, md) + 2.0 * tmp +
                   (md - 1.0) * (md - 1.0) * std::pow(c1, 2.0 * md) -
                   md * md * kmom * std::pow(c1, 2.0 * md - 2.0));
        if (!(variance > 0))
            throw NumericError("bds_test degenerate variance at dim " + std::to_string(m));

        const double stat = std::sqrt(static_cast<double>(nm)) *
                            (cm - std::pow(c1_trim, md)) / std::sqrt(variance);
        const double p = 2.0 * normal_sf(std::abs(stat));
        report.params["stat_" + std::to_string(m)] = stat;
        report.params["p_" + std::to_string(m)] = p;
        p_sum += p;
        stat_sum += stat;
        ++dims;
    }
    report.p_value = p_sum / static_cast<double>(dims);
    report.statistic = stat_sum / static_cast<double>(dims);
    return report;
}

EfficiencyTable efficiency_table(const std::vector<ReturnSample>& samples,
                                 const EfficiencyParams& params) {
    const std::size_t floor = std::max({params.min_length, params.bds_min_length,
                                        params.lb_max_lag + 2});
    EfficiencyTable table;
    table.rows.reserve(samples.size());
    for (const auto& sample : samples) {
        EfficiencyRow row;
        row.symbol = sample.symbol;
        row.window = sample.window;
        auto& cell = row.cell;
        if (sample.values.size() < floor) {
            cell.reason = "insufficient coverage (" + std::to_string(sample.values.size()) +
                          " < " + std::to_string(floor) + " returns)";
        } else if (!std::all_of(sample.values.begin(), sample.values.end(),
                                [](double v) { return std::isfinite(v); })) {
            cell.reason = "non-finite returns";
        } else {
            try {
                cell.lb = ljung_box(sample.values, params.lb_max_lag);
                cell.runs = runs_test(sample.values);
                cell.bds = bds_test(sample.values, params.bds_dim_lo, params.bds_dim_hi,
                                    params.bds_distance);
                cell.available = true;
            } catch (const Error& e) {
                cell.available = false;
                cell.reason = e.what();
            }
        }
        table.rows.push_back(std::move(row));
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const EfficiencyRow& a, const EfficiencyRow& b) {
                         if (a.symbol != b.symbol) return a.symbol < b.symbol;
                         return a.window.index < b.window.index;
                     });
    return table;
}

void write_efficiency_csv(const EfficiencyTable& table, const std::filesystem::path& path) {
    std::string out = "symbol,period_start,period_end,lb_p,runs_p,bds_p\n";
    for (const auto& row : table.rows) {
        out += row.symbol + "," + row.window.start.to_string() + "," +
               row.window.end.to_string();
        if (row.cell.available) {
            out += "," + format_fixed(row.cell.lb.p_value, 2);
            out += "," + format_fixed(row.cell.runs.p_value, 2);
            out += "," + format_fixed(row.cell.bds.p_value, 2);
        } else {
            out += ",--,--,--";
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_efficiency_json(const EfficiencyTable& table, const std::filesystem::path& path) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r;
        r["symbol"] = row.symbol;
        r["window"] = {{"index", row.window.index},
                       {"start", row.window.start.to_string()},
                       {"end", row.window.end.to_string()}};
        r["available"] = row.cell.available;
        if (row.cell.available) {
            for (const TestReport* t : {&row.cell.lb, &row.cell.runs, &row.cell.bds}) {
                nlohmann::json rep;
                rep["statistic"] = t->statistic;
                rep["p_value"] = t->p_value;
                rep["params"] = t->params;
                r[t->test_name] = rep;
            }
        } else {
            r["reason"] = row.cell.reason;
        }
        rows.push_back(r);
    }
    nlohmann::json doc;
    doc["version"] = 1;
    doc["rows"] = rows;
    write_file_atomic(path, doc.dump(2) + "\n");
}

} // namespace ccae
