#ifndef CCAE_MARKET_DATA_HPP
#define CCAE_MARKET_DATA_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccae/date.hpp"
#include "ccae/tensor.hpp"

namespace ccae {

/// One daily OHLCV bar, prices in USD.
struct PriceRecord {
    Date date;
    double open = 0;
    double high = 0;
    double low = 0;
    double close = 0;
    double volume = 0;
};

/// A coin's full dated history, dates strictly increasing.
struct CoinSeries {
    std::string symbol;
    std::vector<PriceRecord> records;

    bool covers(const Date& start, const Date& end) const;
    /// Records with start <= date <= end, in order.
    std::vector<PriceRecord> slice(const Date& start, const Date& end) const;
};

/// A value series with one date per value.
struct DatedSeries {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Half-year (or other) analysis window, both endpoints inclusive.
struct PeriodWindow {
    int index = 0;
    Date start;
    Date end;

    std::int64_t length_days() const { return days_inclusive(start, end); }
    bool contains(const Date& d) const { return start <= d && d <= end; }
    std::string label() const { return start.to_string() + ".." + end.to_string(); }
};

enum class Channel { returns, hl_ratio, volume };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

/// Normalization statistics applied to one coin-channel slice.
struct NormParams {
    double mean = 0;
    double stddev = 1; // as applied; 1 when the raw slice had zero variance
};

/// coin x day x channel input block for the autoencoder. The day axis is
/// zero-padded on the right from `unpadded_len` up to the configured network
/// input length; `norm` is indexed [coin][channel] in the declared orders.
struct FeatureTensor {
    std::vector<std::string> symbols;
    PeriodWindow window;
    std::vector<Channel> channels;
    Tensor data; // shape [symbols, padded_len, channels]
    std::size_t unpadded_len = 0;
    std::vector<std::vector<NormParams>> norm;
};

/// Parses a `date,open,high,low,close,volume` CSV. Rows may arrive in any
/// order; the result is date-sorted. Throws ParseError with a line number on
/// malformed rows and DataError on duplicate dates or price-invariant
/// violations (high < low, close/open outside [low, high], negatives).
CoinSeries parse_snapshot(std::istream& in, const std::string& symbol);

/// Loads `<SYMBOL>.csv`; the symbol is the file stem.
CoinSeries load_snapshot_file(const std::filesystem::path& file);

/// All `*.csv` files of a snapshot directory, sorted by symbol.
std::vector<CoinSeries> load_snapshot_dir(const std::filesystem::path& dir);

/// Canonical CSV form; parse_snapshot(serialize_snapshot(s)) == s bit-exactly.
std::string serialize_snapshot(const CoinSeries& series);

/// R_t = ln(P_t) - ln(P_{t-1}) on closes, dated at the later day.
DatedSeries log_returns(const CoinSeries& series);

/// Daily high/low; always >= 1 for valid records.
DatedSeries high_low_ratio(const CoinSeries& series);

/// `count` consecutive windows of `months_per_period` calendar months.
/// Window 0 spans [anchor, anchor + m months]; window i > 0 spans
/// [anchor + i*m months + 1 day, anchor + (i+1)*m months], so windows abut
/// exactly and ends fall on the anchor's day-of-month.
std::vector<PeriodWindow> make_periods(const Date& anchor, int months_per_period,
                                       int count);

/// Assembles the autoencoder input for one window. Coins lacking a record for
/// any calendar day of the window are excluded. Channel values are aligned on
/// days 2..W of the window (returns need the previous close, so the window's
/// first day carries no value on any channel); each coin-channel slice is
/// z-scored with the sample standard deviation and right-padded with zeros to
/// `input_length`.
FeatureTensor build_feature_tensor(const std::vector<CoinSeries>& coins,
                                   const PeriodWindow& window,
                                   const std::vector<Channel>& channels,
                                   std::size_t input_length);

/// Product-moment correlation; throws NumericError on zero variance.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

/// Annualized rolling volatility in percent: sample std of the trailing
/// `window_days` returns (inclusive) times sqrt(periods_per_year) * 100.
DatedSeries rolling_volatility(const DatedSeries& returns, std::size_t window_days,
                               std::size_t periods_per_year);

/// Writes the JSON sidecar (symbols, window, channels, norm stats) and the
/// flat coin-major CSV for a FeatureTensor.
void export_feature_tensor(const FeatureTensor& ft, const std::filesystem::path& json_path,
                           const std::filesystem::path& csv_path);

} // namespace ccae

#endif
