#include "ccae/fetch.hpp"

#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"
#include "ccae/market_data.hpp"
#include "ccae/sha256.hpp"

namespace ccae {

namespace {

struct ParsedUrl {
    std::string host_port; // "host" or "host:port"
    std::string path;
};

ParsedUrl parse_http_url(const std::string& url) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0)
        throw ConfigError("only http:// URLs are supported, got '" + url + "'");
    const std::string rest = url.substr(prefix.size());
    const auto slash = rest.find('/');
    ParsedUrl out;
    out.host_port = slash == std::string::npos ? rest : rest.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    if (out.host_port.empty()) throw ConfigError("URL has no host: '" + url + "'");
    return out;
}

std::string substitute_symbol(const std::string& url_template, const std::string& symbol) {
    const std::string placeholder = "{SYMBOL}";
    const auto pos = url_template.find(placeholder);
    if (pos == std::string::npos)
        throw ConfigError("url template lacks the {SYMBOL} placeholder");
    std::string url = url_template;
    url.replace(pos, placeholder.size(), symbol);
    return url;
}

} // namespace

std::size_t FetchResult::ok_count() const {
    std::size_t n = 0;
    for (const auto& o : outcomes) n += o.ok ? 1 : 0;
    return n;
}

std::size_t FetchResult::failed_count() const {
    return outcomes.size() - ok_count();
}

FetchResult fetch_snapshots(const FetchOptions& options) {
    substitute_symbol(options.url_template, "PROBE"); // validate template eagerly
    std::filesystem::create_directories(options.out_dir);

    FetchResult result;
    std::map<std::string, std::chrono::steady_clock::time_point> last_request;

    for (const auto& symbol : options.symbols) {
        FetchOutcome outcome;
        outcome.symbol = symbol;
        try {
            const std::string url = substitute_symbol(options.url_template, symbol);
            const ParsedUrl parsed = parse_http_url(url);

            const auto it = last_request.find(parsed.host_port);
            if (it != last_request.end() && options.rate_ms > 0) {
                const auto earliest =
                    it->second + std::chrono::milliseconds(options.rate_ms);
                std::this_thread::sleep_until(earliest);
            }

            std::string body;
            std::string last_error;
            bool got = false;
            for (int attempt = 0; attempt <= options.retries && !got; ++attempt) {
                if (attempt > 0)
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(options.backoff_ms << (attempt - 1)));
                httplib::Client client(parsed.host_port);
                client.set_connection_timeout(10);
                client.set_read_timeout(30);
                last_request[parsed.host_port] = std::chrono::steady_clock::now();
                auto res = client.Get(parsed.path);
                if (!res) {
                    last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
                } else if (res->status != 200) {
                    last_error = "HTTP " + std::to_string(res->status);
                } else {
                    body = res->body;
                    got = true;
                }
            }
            if (!got)
                throw IoError("fetch failed after " + std::to_string(options.retries + 1) +
                              " attempts: " + last_error);

            if (options.validate) {
                std::istringstream in(body);
                parse_snapshot(in, symbol); // throws on malformed payload
            }
            const std::filesystem::path out_path = options.out_dir / (symbol + ".csv");
            write_file_atomic(out_path, body);
            outcome.ok = true;
            outcome.path = out_path.string();
            outcome.digest = Sha256::of_string(body);
        } catch (const Error& e) {
            outcome.ok = false;
            outcome.error = e.what();
        }
        result.outcomes.push_back(std::move(outcome));
    }
    return result;
}

} // namespace ccae
