// Regenerates the bundled synthetic snapshots under data/. The series are
// seeded geometric random walks shaped to satisfy the OHLCV invariants; two
// symbols list late so period-coverage edge cases stay exercised.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ccae/date.hpp"
#include "ccae/io_util.hpp"
#include "ccae/market_data.hpp"
#include "ccae/rng.hpp"

using namespace ccae;

namespace {

struct CoinShape {
    std::string symbol;
    std::uint64_t seed;
    Date first_day;
    double start_price;
    double drift;
    double daily_vol;
    double range_scale;  // intraday high/low spread
    double volume_base;
};

CoinSeries generate(const CoinShape& shape, const Date& last_day) {
    Rng rng(shape.seed);
    CoinSeries series;
    series.symbol = shape.symbol;
    double close = shape.start_price;
    for (Date d = shape.first_day; d <= last_day; d = d.add_days(1)) {
        PriceRecord r;
        r.date = d;
        const double open = close;
        close = close * std::exp(shape.drift + shape.daily_vol * rng.normal());
        const double body_hi = std::max(open, close);
        const double body_lo = std::min(open, close);
        r.open = open;
        r.close = close;
        r.high = body_hi * (1.0 + shape.range_scale * std::abs(rng.normal()));
        r.low = body_lo / (1.0 + shape.range_scale * std::abs(rng.normal()));
        r.volume = shape.volume_base * close * std::exp(0.5 * rng.normal());
        series.records.push_back(r);
    }
    return series;
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out_root = argc > 1 ? argv[1] : "data";

    // Parsing fixture: exactly 2190 daily rows starting 2013-05-15.
    {
        CoinShape btc{"btc_synth", 42, Date(2013, 5, 15), 120.0, 0.0012, 0.045, 0.02, 1.5e4};
        CoinSeries series = generate(btc, Date(2013, 5, 15).add_days(2189));
        write_file_atomic(out_root / "btc_synth.csv", serialize_snapshot(series));
        std::printf("%s: %zu rows\n", "btc_synth.csv", series.records.size());
    }

    // Six-coin pipeline snapshot covering 2013-05-15 .. 2019-05-15; BNB and
    // TRX list mid-2017 so early windows lack their coverage.
    const Date last(2019, 5, 15);
    const std::vector<CoinShape> coins = {
        {"BTC", 1001, Date(2013, 5, 15), 120.0, 0.0015, 0.045, 0.020, 2.0e4},
        {"ETH", 1002, Date(2013, 5, 15), 1.2, 0.0020, 0.060, 0.028, 6.0e5},
        {"XRP", 1003, Date(2013, 5, 15), 0.006, 0.0010, 0.065, 0.030, 4.0e8},
        {"USDT", 1004, Date(2013, 5, 15), 1.0, 0.0, 0.0035, 0.0015, 1.0e6},
        {"BNB", 1005, Date(2017, 7, 25), 0.11, 0.0030, 0.080, 0.035, 3.0e6},
        {"TRX", 1006, Date(2017, 9, 13), 0.002, 0.0025, 0.090, 0.040, 8.0e8},
    };
    for (const auto& shape : coins) {
        CoinSeries series = generate(shape, last);
        write_file_atomic(out_root / "synthetic_snapshot" / (shape.symbol + ".csv"),
                          serialize_snapshot(series));
        std::printf("%s.csv: %zu rows (%s .. %s)\n", shape.symbol.c_str(),
                    series.records.size(), series.records.front().date.to_string().c_str(),
                    series.records.back().date.to_string().c_str());
    }
    return 0;
}
