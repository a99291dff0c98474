#include "ccae/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"

namespace ccae {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

double parse_number(const std::string& field, std::size_t line_no, const char* column) {
    double value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line_no) + ": unparsable " +
                         column + " value '" + field + "'");
    return value;
}

void check_record(const PriceRecord& r) {
    const std::string d = r.date.to_string();
    if (!(r.low > 0)) throw DataError(d + ": low price must be positive");
    if (r.high < r.low) throw DataError(d + ": high " + format_double(r.high) +
                                        " below low " + format_double(r.low));
    if (r.close < r.low || r.close > r.high)
        throw DataError(d + ": close outside [low, high]");
    if (r.open < r.low || r.open > r.high)
        throw DataError(d + ": open outside [low, high]");
    if (r.volume < 0) throw DataError(d + ": negative volume");
}

double sample_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample (n-1) standard deviation.
double sample_std(const std::vector<double>& v, double mean) {
    double ss = 0;
    for (double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::returns: return "returns";
        case Channel::hl_ratio: return "hl_ratio";
        case Channel::volume: return "volume";
    }
    throw ConfigError("unknown channel");
}

Channel channel_from_name(const std::string& name) {
    if (name == "returns") return Channel::returns;
    if (name == "hl_ratio") return Channel::hl_ratio;
    if (name == "volume") return Channel::volume;
    throw ConfigError("unknown channel name '" + name + "'");
}

bool CoinSeries::covers(const Date& start, const Date& end) const {
    const auto needed = days_inclusive(start, end);
    std::int64_t have = 0;
    for (const auto& r : records)
        if (start <= r.date && r.date <= end) ++have;
    return have == needed;
}

std::vector<PriceRecord> CoinSeries::slice(const Date& start, const Date& end) const {
    std::vector<PriceRecord> out;
    for (const auto& r : records)
        if (start <= r.date && r.date <= end) out.push_back(r);
    return out;
}

CoinSeries parse_snapshot(std::istream& in, const std::string& symbol) {
    CoinSeries series;
    series.symbol = symbol;

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "date,open,high,low,close,volume")
                throw ParseError("line 1: expected header "
                                 "'date,open,high,low,close,volume', got '" + line + "'");
            saw_header = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 6)
            throw ParseError("line " + std::to_string(line_no) + ": expected 6 columns, got " +
                             std::to_string(fields.size()));
        PriceRecord r;
        try {
            r.date = Date::parse(fields[0]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        r.open = parse_number(fields[1], line_no, "open");
        r.high = parse_number(fields[2], line_no, "high");
        r.low = parse_number(fields[3], line_no, "low");
        r.close = parse_number(fields[4], line_no, "close");
        r.volume = parse_number(fields[5], line_no, "volume");
        check_record(r);
        series.records.push_back(r);
    }
    if (!saw_header) throw ParseError("empty snapshot: missing header line");

    std::sort(series.records.begin(), series.records.end(),
              [](const PriceRecord& a, const PriceRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.records.size(); ++i)
        if (series.records[i].date == series.records[i - 1].date)
            throw DataError("duplicate date " + series.records[i].date.to_string());
    return series;
}

CoinSeries load_snapshot_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open snapshot file " + file.string());
    try {
        return parse_snapshot(in, file.stem().string());
    } catch (const Error& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

std::vector<CoinSeries> load_snapshot_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("snapshot directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<CoinSeries> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_snapshot_file(f));
    return out;
}

std::string serialize_snapshot(const CoinSeries& series) {
    std::string out = "date,open,high,low,close,volume\n";
    for (const auto& r : series.records) {
        out += r.date.to_string();
        for (double v : {r.open, r.high, r.low, r.close, r.volume}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

DatedSeries log_returns(const CoinSeries& series) {
    if (series.records.size() < 2)
        throw InsufficientDataError(series.symbol + ": need at least 2 records for returns");
    DatedSeries out;
    out.dates.reserve(series.records.size() - 1);
    out.values.reserve(series.records.size() - 1);
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        const double prev = series.records[i - 1].close;
        const double cur = series.records[i].close;
        if (!(prev > 0) || !(cur > 0))
            throw DataError(series.symbol + ": non-positive close at " +
                            series.records[i].date.to_string());
        out.dates.push_back(series.records[i].date);
        out.values.push_back(std::log(cur) - std::log(prev));
    }
    return out;
}

DatedSeries high_low_ratio(const CoinSeries& series) {
    DatedSeries out;
    out.dates.reserve(series.records.size());
    out.values.reserve(series.records.size());
    for (const auto& r : series.records) {
        if (!(r.low > 0))
            throw NumericError(series.symbol + ": zero low at " + r.date.to_string());
        out.dates.push_back(r.date);
        out.values.push_back(r.high / r.low);
    }
    return out;
}

std::vector<PeriodWindow> make_periods(const Date& anchor, int months_per_period,
                                       int count) {
    if (count < 1) throw ConfigError("period count must be >= 1");
    if (months_per_period < 1) throw ConfigError("months per period must be >= 1");
    std::vector<PeriodWindow> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        PeriodWindow w;
        w.index = i;
        const Date block_start = anchor.add_months(i * months_per_period);
        w.start = i == 0 ? block_start : block_start.add_days(1);
        w.end = anchor.add_months((i + 1) * months_per_period);
        out.push_back(w);
    }
    return out;
}

FeatureTensor build_feature_tensor(const std::vector<CoinSeries>& coins,
                                   const PeriodWindow& window,
                                   const std::vector<Channel>& channels,
                                   std::size_t input_length) {
    if (channels.empty()) throw ConfigError("channel set must be non-empty");
    const std::int64_t window_days = window.length_days();
    const std::size_t unpadded = static_cast<std::size_t>(window_days - 1);
    if (unpadded < 2)
        throw InsufficientDataError("window " + window.label() + " too short");
    if (unpadded > input_length)
        throw ConfigError("window " + window.label() + " has " + std::to_string(unpadded) +
                          " usable days, exceeding network input length " +
                          std::to_string(input_length));

    FeatureTensor ft;
    ft.window = window;
    ft.channels = channels;
    ft.unpadded_len = unpadded;

    std::vector<const CoinSeries*> eligible;
    for (const auto& coin : coins)
        if (coin.covers(window.start, window.end)) eligible.push_back(&coin);
    if (eligible.empty())
        throw DataError("empty universe: no coin covers window " + window.label());

    ft.data = Tensor::zeros({eligible.size(), input_length, channels.size()});
    ft.norm.resize(eligible.size());

    for (std::size_t ci = 0; ci < eligible.size(); ++ci) {
        const CoinSeries& coin = *eligible[ci];
        ft.symbols.push_back(coin.symbol);
        CoinSeries windowed{coin.symbol, coin.slice(window.start, window.end)};

        for (std::size_t ch = 0; ch < channels.size(); ++ch) {
            std::vector<double> values;
            values.reserve(unpadded);
            switch (channels[ch]) {
                case Channel::returns: {
                    values = log_returns(windowed).values;
                    break;
                }
                case Channel::hl_ratio: {
                    const auto hl = high_low_ratio(windowed).values;
                    values.assign(hl.begin() + 1, hl.end());
                    break;
                }
                case Channel::volume: {
                    for (std::size_t i = 1; i < windowed.records.size(); ++i)
                        values.push_back(std::log1p(windowed.records[i].volume));
                    break;
                }
            }
            const double mean = sample_mean(values);
            double sd = sample_std(values, mean);
            NormParams np;
            np.mean = mean;
            np.stddev = sd > 0 ? sd : 1.0; // constant slice normalizes to zeros
            ft.norm[ci].push_back(np);
            for (std::size_t t = 0; t < values.size(); ++t)
                ft.data.at(ci, t, ch) = (values[t] - np.mean) / np.stddev;
        }
    }
    return ft;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("pearson: series length mismatch");
    if (a.size() < 2) throw InsufficientDataError("pearson: need at least 2 points");
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0 || sbb == 0)
        throw NumericError("pearson undefined: zero-variance series");
    return sab / std::sqrt(saa * sbb);
}

DatedSeries rolling_volatility(const DatedSeries& returns, std::size_t window_days,
                               std::size_t periods_per_year) {
    if (window_days < 2) throw ConfigError("volatility window must be >= 2 days");
    if (returns.size() < window_days)
        throw InsufficientDataError("series shorter than volatility window");
    DatedSeries out;
    const double annualize = std::sqrt(static_cast<double>(periods_per_year)) * 100.0;
    for (std::size_t t = window_days - 1; t < returns.size(); ++t) {
        std::vector<double> tail(returns.values.begin() + (t + 1 - window_days),
                                 returns.values.begin() + (t + 1));
        const double mean = sample_mean(tail);
        out.dates.push_back(returns.dates[t]);
        out.values.push_back(sample_std(tail, mean) * annualize);
    }
    return out;
}

void export_feature_tensor(const FeatureTensor& ft, const std::filesystem::path& json_path,
                           const std::filesystem::path& csv_path) {
    nlohmann::json sidecar;
    sidecar["version"] = 1;
    sidecar["symbols"] = ft.symbols;
    sidecar["window"] = {{"index", ft.window.index},
                         {"start", ft.window.start.to_string()},
                         {"end", ft.window.end.to_string()}};
    std::vector<std::string> names;
    for (Channel c : ft.channels) names.emplace_back(channel_name(c));
    sidecar["channels"] = names;
    sidecar["input_length"] = ft.data.dim(1);
    sidecar["unpadded_len"] = ft.unpadded_len;
    nlohmann::json norm = nlohmann::json::array();
    for (const auto& per_coin : ft.norm) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& np : per_coin)
            row.push_back({{"mean", np.mean}, {"std", np.stddev}});
        norm.push_back(row);
    }
    sidecar["norm_params"] = norm;
    write_file_atomic(json_path, sidecar.dump(2) + "\n");

    std::string csv = "symbol,day";
    for (const auto& n : names) csv += "," + n;
    csv += '\n';
    for (std::size_t ci = 0; ci < ft.symbols.size(); ++ci) {
        for (std::size_t t = 0; t < ft.data.dim(1); ++t) {
            csv += ft.symbols[ci];
            csv += ',';
            csv += std::to_string(t);
            for (std::size_t ch = 0; ch < ft.channels.size(); ++ch) {
                csv += ',';
                csv += format_double(ft.data.at(ci, t, ch));
            }
            csv += '\n';
        }
    }
    write_file_atomic(csv_path, csv);
}

} // namespace ccae
