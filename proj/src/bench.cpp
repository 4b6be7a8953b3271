#include "swarm/bench.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "swarm/episode.hpp"
#include "swarm/metrics.hpp"
#include "swarm/runlog.hpp"

namespace swarm {

using nlohmann::json;

void RunConfig::validate() const {
    if (tasks.empty()) throw ConfigError("tasks must not be empty");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (repeat < 1) throw ConfigError("repeat must be >= 1");
    env.validate();
    if (policy == "llm") model.validate();
    else parse_policy(policy);
    for (int n : sweep_agents) {
        if (n < 1) throw ConfigError("sweep.num_agents entries must be positive");
    }
    for (int k : sweep_views) {
        if (k < 1 || k % 2 == 0) throw ConfigError("sweep.view_size entries must be positive and odd");
    }
}

namespace {

template <typename T>
void read_opt(const json& obj, const char* key, T& into, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        into = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}.{}: unexpected type {}", where, key, it->type_name()));
    }
}

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    auto it = doc.find(key);
    if (it == doc.end()) return empty;
    if (!it->is_object()) throw ConfigError(fmt::format("{} must be an object", key));
    return *it;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("run config must be a JSON object");
    RunConfig cfg;
    if (auto it = doc.find("tasks"); it != doc.end()) {
        std::vector<std::string> names;
        read_opt(doc, "tasks", names, "config");
        cfg.tasks.clear();
        for (const auto& n : names) cfg.tasks.push_back(parse_task(n));
    }
    read_opt(doc, "seeds", cfg.seeds, "config");
    read_opt(doc, "repeat", cfg.repeat, "config");
    std::string out = cfg.output_dir.string();
    read_opt(doc, "output_dir", out, "config");
    cfg.output_dir = out;

    const json& env = section(doc, "env");
    read_opt(env, "height", cfg.env.height, "env");
    read_opt(env, "width", cfg.env.width, "env");
    read_opt(env, "num_agents", cfg.env.num_agents, "env");
    read_opt(env, "view_size", cfg.env.view_size, "env");
    read_opt(env, "memory", cfg.env.memory, "env");
    read_opt(env, "max_round", cfg.env.max_round, "env");
    read_opt(env, "respawn_candidates", cfg.env.respawn_candidates, "env");
    read_opt(env, "interior_walls", cfg.env.interior_walls, "env");
    read_opt(env, "nest_size", cfg.env.nest_size, "env");
    read_opt(env, "food_size", cfg.env.food_size, "env");
    read_opt(env, "obstacle_size", cfg.env.obstacle_size, "env");

    const json& agent = section(doc, "agent");
    read_opt(agent, "policy", cfg.policy, "agent");
    read_opt(agent, "seed", cfg.agent_seed, "agent");

    const json& model = section(doc, "model");
    read_opt(model, "base_url", cfg.model.base_url, "model");
    read_opt(model, "model", cfg.model.model, "model");
    read_opt(model, "api_key_env", cfg.model.api_key_env, "model");
    read_opt(model, "temperature", cfg.model.temperature, "model");
    read_opt(model, "max_retries", cfg.model.max_retries, "model");
    read_opt(model, "timeout_s", cfg.model.timeout_s, "model");
    read_opt(model, "max_concurrent", cfg.model.max_concurrent, "model");
    read_opt(model, "backoff_s", cfg.model.backoff_s, "model");

    const json& sweep = section(doc, "sweep");
    read_opt(sweep, "num_agents", cfg.sweep_agents, "sweep");
    read_opt(sweep, "view_size", cfg.sweep_views, "sweep");

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
    try {
        return parse_run_config(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string make_run_id(TaskKind task, std::uint64_t seed, int repeat) {
    return fmt::format("{}_s{}_r{}", to_string(task), seed, repeat);
}

std::string make_sweep_run_id(TaskKind task, std::uint64_t seed, int repeat, int num_agents, int view_size) {
    return fmt::format("{}_n{}_k{}", make_run_id(task, seed, repeat), num_agents, view_size);
}

namespace {

std::unique_ptr<Controller> make_controller(const RunConfig& cfg, TaskKind task) {
    if (cfg.policy == "llm") return std::make_unique<LlmController>(cfg.model);
    return std::make_unique<ScriptedController>(ScriptedPolicy{parse_policy(cfg.policy), cfg.agent_seed, true},
                                                task);
}

BatchResult run_batch(const RunConfig& cfg, const EnvConfig& env, bool sweep_ids, std::string label,
                      std::vector<RunMeta>& metas, std::ostream* progress) {
    BatchResult batch;
    batch.label = std::move(label);
    for (TaskKind task : cfg.tasks) {
        for (int rep = 0; rep < cfg.repeat; ++rep) {
            for (std::uint64_t seed : cfg.seeds) {
                EpisodeSummary s;
                s.run_id = sweep_ids ? make_sweep_run_id(task, seed, rep, env.num_agents, env.view_size)
                                     : make_run_id(task, seed, rep);
                s.task = task;
                s.seed = seed;
                s.repeat = rep;
                s.num_agents = env.num_agents;
                s.view_size = env.view_size;
                try {
                    auto controller = make_controller(cfg, task);
                    RunLogWriter writer(cfg.output_dir, s.run_id);
                    EpisodeResult result;
                    try {
                        result = run_episode(s.run_id, task, seed, env, *controller, &writer);
                    } catch (...) {
                        writer.abort();
                        throw;
                    }
                    std::ofstream csv(cfg.output_dir / fmt::format("metrics_{}.csv", s.run_id), std::ios::binary);
                    csv << metrics_csv(result.metrics);
                    s.rounds = result.data.meta.rounds;
                    s.score = result.data.meta.score;
                    metas.push_back(result.data.meta);
                    write_meta_log(cfg.output_dir, metas);
                } catch (const std::exception& e) {
                    s.error = e.what();
                }
                if (progress != nullptr) {
                    if (s.error.empty()) {
                        *progress << fmt::format("{}: score {:.2f} after {} rounds\n", s.run_id, s.score, s.rounds);
                    } else {
                        *progress << fmt::format("{}: failed: {}\n", s.run_id, s.error);
                    }
                }
                batch.episodes.push_back(std::move(s));
            }
        }
    }
    return batch;
}

std::string batch_label(const RunConfig& cfg) {
    return cfg.policy == "llm" ? cfg.model.model : fmt::format("scripted-{}", cfg.policy);
}

}  // namespace

BatchResult run_benchmark(const RunConfig& cfg, std::ostream* progress) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<RunMeta> metas;
    return run_batch(cfg, cfg.env, false, batch_label(cfg), metas, progress);
}

std::vector<BatchResult> run_sweep(const RunConfig& cfg, std::ostream* progress) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const std::vector<int> agents = cfg.sweep_agents.empty() ? std::vector<int>{cfg.env.num_agents} : cfg.sweep_agents;
    const std::vector<int> views = cfg.sweep_views.empty() ? std::vector<int>{cfg.env.view_size} : cfg.sweep_views;
    std::vector<RunMeta> metas;
    std::vector<BatchResult> out;
    for (int n : agents) {
        for (int k : views) {
            EnvConfig env = cfg.env;
            env.num_agents = n;
            env.view_size = k;
            out.push_back(run_batch(cfg, env, true, fmt::format("{} N={} k={}", batch_label(cfg), n, k), metas,
                                    progress));
        }
    }
    return out;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

std::string score_table(const std::vector<BatchResult>& batches) {
    std::size_t label_width = 5;
    for (const auto& b : batches) label_width = std::max(label_width, b.label.size());
    std::string out = fmt::format("{:<{}}", "Model", label_width);
    for (TaskKind t : kAllTasks) out += fmt::format(" | {:^15}", display_name(t));
    out += fmt::format(" | {:>11}\n", "Total Score");
    out += std::string(label_width, '-');
    for (std::size_t i = 0; i < std::size(kAllTasks); ++i) out += "-+-" + std::string(15, '-');
    out += "-+-" + std::string(11, '-') + "\n";
    for (const auto& b : batches) {
        std::map<TaskKind, std::vector<double>> scores;
        for (const auto& e : b.episodes) {
            if (e.error.empty()) scores[e.task].push_back(e.score);
        }
        out += fmt::format("{:<{}}", b.label, label_width);
        double total = 0.0;
        for (TaskKind t : kAllTasks) {
            auto it = scores.find(t);
            if (it == scores.end()) {
                out += fmt::format(" | {:^15}", "-");
                continue;
            }
            const auto [mean, sd] = mean_std(it->second);
            total += mean;
            out += fmt::format(" | {:^15}", fmt::format("{:5.2f} ± {:4.2f}", mean, sd));
        }
        out += fmt::format(" | {:>11.2f}\n", total);
    }
    return out;
}

}  // namespace swarm
