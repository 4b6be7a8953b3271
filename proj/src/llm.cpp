#include "swarm/llm.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "swarm/grid.hpp"

namespace swarm {

void ModelEndpointConfig::validate() const {
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (max_concurrent < 1) throw ConfigError("max_concurrent must be >= 1");
    if (timeout_s <= 0) throw ConfigError("timeout_s must be positive");
    if (base_url.find("://") == std::string::npos) throw ConfigError(fmt::format("bad base_url '{}'", base_url));
}

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // prefix + /chat/completions
};

Endpoint split_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    const auto path_start = base_url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    ep.path = prefix + "/chat/completions";
    return ep;
}

std::string api_key(const ModelEndpointConfig& cfg) {
    if (!cfg.api_key.empty()) return cfg.api_key;
    if (cfg.api_key_env.empty()) return "";
    const char* v = std::getenv(cfg.api_key_env.c_str());
    return v != nullptr ? v : "";
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

class InFlight {
public:
    explicit InFlight(GatewayStats* stats) : stats_(stats) {
        if (stats_ == nullptr) return;
        ++stats_->requests;
        const int now = ++stats_->in_flight;
        int peak = stats_->peak_in_flight.load();
        while (now > peak && !stats_->peak_in_flight.compare_exchange_weak(peak, now)) {
        }
    }
    ~InFlight() {
        if (stats_ != nullptr) --stats_->in_flight;
    }
    InFlight(const InFlight&) = delete;
    InFlight& operator=(const InFlight&) = delete;

private:
    GatewayStats* stats_;
};

}  // namespace

std::string complete(const std::string& prompt, const ModelEndpointConfig& cfg, int* retries,
                     GatewayStats* stats) {
    const Endpoint ep = split_url(cfg.base_url);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(cfg.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const std::string key = api_key(cfg);
    if (!key.empty()) client.set_bearer_token_auth(key);

    const nlohmann::json body = {
        {"model", cfg.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", cfg.temperature},
    };
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (retries != nullptr) *retries = attempt;
        if (attempt > 0 && cfg.backoff_s > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(cfg.backoff_s * (1 << (attempt - 1))));
        }
        httplib::Result res;
        {
            InFlight guard(stats);
            res = client.Post(ep.path, payload, "application/json");
        }
        if (!res) {
            last_error = fmt::format("request failed: {}", httplib::to_string(res.error()));
            if (stats != nullptr) ++stats->failures;
            continue;
        }
        if (res->status != 200) {
            last_error = fmt::format("HTTP {}", res->status);
            if (stats != nullptr) ++stats->failures;
            if (retryable(res->status)) continue;
            throw GatewayError(last_error, attempt + 1);
        }
        try {
            const auto reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw GatewayError(fmt::format("malformed completion: {}", e.what()), attempt + 1);
        }
    }
    throw GatewayError(last_error, cfg.max_retries + 1);
}

std::vector<Completion> complete_round(const std::vector<std::string>& prompts,
                                       const ModelEndpointConfig& cfg, GatewayStats* stats) {
    std::vector<Completion> out(prompts.size());
    if (prompts.empty()) return out;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) {
            Completion& c = out[i];
            try {
                c.text = complete(prompts[i], cfg, &c.retries, stats);
            } catch (const GatewayError& e) {
                c.error = e.what();
                c.retries = e.attempts() - 1;
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(prompts.size(), static_cast<std::size_t>(cfg.max_concurrent));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }  // joins: the round barrier
    return out;
}

}  // namespace swarm
