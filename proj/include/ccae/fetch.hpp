#ifndef CCAE_FETCH_HPP
#define CCAE_FETCH_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace ccae {

struct FetchOptions {
    std::string url_template; // must contain the {SYMBOL} placeholder
    std::vector<std::string> symbols;
    std::filesystem::path out_dir;
    int retries = 3;        // additional attempts after the first
    int backoff_ms = 200;   // doubled per retry
    int rate_ms = 200;      // per-host floor between requests
    bool validate = true;   // parse payloads as OHLCV snapshots
};

struct FetchOutcome {
    std::string symbol;
    bool ok = false;
    std::string path;   // written file when ok
    std::string digest; // sha256 of the payload when ok
    std::string error;  // failure description otherwise
};

struct FetchResult {
    std::vector<FetchOutcome> outcomes;

    std::size_t ok_count() const;
    std::size_t failed_count() const;
};

/// Downloads one snapshot CSV per symbol over plain HTTP, with retry/backoff
/// and a minimum spacing between requests to the same host. Failures are
/// recorded per symbol; the remaining symbols still run.
FetchResult fetch_snapshots(const FetchOptions& options);

} // namespace ccae

#endif
