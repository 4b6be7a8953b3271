#pragma once

#include <atomic>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarm {

struct ModelEndpointConfig {
    std::string base_url = "http://127.0.0.1:8000/v1";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "OPENAI_API_KEY";
    std::string api_key;  // overrides api_key_env when set
    double temperature = 0.7;
    int max_retries = 3;
    double timeout_s = 60.0;
    int max_concurrent = 8;
    double backoff_s = 1.0;  // doubled after each failed attempt

    void validate() const;  // throws ConfigError
};

class GatewayError : public std::runtime_error {
public:
    GatewayError(const std::string& what, int attempts) : std::runtime_error(what), attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

/// Live request counters. `in_flight` is zero whenever no request is outstanding.
struct GatewayStats {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak_in_flight{0};
    std::atomic<long> requests{0};
    std::atomic<long> failures{0};
};

/// One chat-completions request carrying `prompt` as the user message.
/// Retries network errors, 408, 429 and 5xx. Throws GatewayError once the
/// retries are spent. `retries` receives the number of repeated attempts.
std::string complete(const std::string& prompt, const ModelEndpointConfig& cfg, int* retries = nullptr,
                     GatewayStats* stats = nullptr);

struct Completion {
    std::optional<std::string> text;  // nullopt after a final failure
    int retries = 0;
    std::string error;
};

/// Fans the prompts out with at most `max_concurrent` requests in flight and
/// returns once every prompt has an answer or a final failure.
std::vector<Completion> complete_round(const std::vector<std::string>& prompts,
                                       const ModelEndpointConfig& cfg, GatewayStats* stats = nullptr);

}  // namespace swarm
