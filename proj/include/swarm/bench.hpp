#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm/agent.hpp"
#include "swarm/grid.hpp"
#include "swarm/llm.hpp"

namespace swarm {

/// A benchmark batch as read from a JSON config file.
///
///   {
///     "tasks": ["pursuit", "transport"], "seeds": [1, 2, 3], "repeat": 1,
///     "env": {"height": 12, "width": 12, "num_agents": 12, "view_size": 5,
///             "memory": 5, "max_round": 100, ...},
///     "agent": {"policy": "random-walk" | "greedy" | "stay" | "llm", "seed": 0},
///     "model": {"base_url": "...", "model": "...", "api_key_env": "OPENAI_API_KEY",
///               "temperature": 0.7, "max_retries": 3, "timeout_s": 60, "max_concurrent": 8},
///     "output_dir": "runs",
///     "sweep": {"num_agents": [8, 12, 16], "view_size": [3, 5, 7]}
///   }
struct RunConfig {
    std::vector<TaskKind> tasks = {kAllTasks[0], kAllTasks[1], kAllTasks[2], kAllTasks[3], kAllTasks[4]};
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    int repeat = 1;
    EnvConfig env;
    std::string policy = "random-walk";
    std::uint64_t agent_seed = 0;
    ModelEndpointConfig model;
    std::filesystem::path output_dir = "runs";
    std::vector<int> sweep_agents;
    std::vector<int> sweep_views;

    void validate() const;  // throws ConfigError
};

RunConfig parse_run_config(const nlohmann::json& doc);  // throws ConfigError
RunConfig load_run_config(const std::filesystem::path& path);

struct EpisodeSummary {
    std::string run_id;
    TaskKind task = TaskKind::Pursuit;
    std::uint64_t seed = 0;
    int repeat = 0;
    int num_agents = 0;
    int view_size = 0;
    int rounds = 0;
    double score = 0.0;
    std::string error;  // non-empty when the episode failed
};

struct BatchResult {
    std::string label;  // row label in the score table
    std::vector<EpisodeSummary> episodes;
};

std::string make_run_id(TaskKind task, std::uint64_t seed, int repeat);
std::string make_sweep_run_id(TaskKind task, std::uint64_t seed, int repeat, int num_agents, int view_size);

/// Runs repeat x seeds episodes per task, writing logs, per-run metrics CSV
/// and meta_log.json under cfg.output_dir. Failed episodes are recorded and skipped.
BatchResult run_benchmark(const RunConfig& cfg, std::ostream* progress = nullptr);

/// One batch per (num_agents, view_size) combination, all into one output directory.
std::vector<BatchResult> run_sweep(const RunConfig& cfg, std::ostream* progress = nullptr);

/// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Rows of "mean ± std" per task plus the total of the means.
std::string score_table(const std::vector<BatchResult>& batches);

}  // namespace swarm
