#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include "swarm/bench.hpp"
#include "swarm/episode.hpp"
#include "swarm/runlog.hpp"

namespace {

using namespace swarm;

void print_frame(std::ostream& out, const RunData& run, int index) {
    const RoundRecord& rec = index == 0 ? run.meta.initial : run.rounds[index - 1];
    out << fmt::format("{} | round {}/{} | score {:.2f}\n", run.meta.run_id, index, run.meta.rounds, rec.score);
    out << render_grid(SymbolGrid{{0, 0}, rec.grid});
    if (index > 0 && !rec.messages.empty()) {
        for (const auto& m : rec.messages) out << "  msg: " << m << '\n';
    }
    out << '\n';
}

int replay(const std::string& run_id, const std::string& dir, double fps) {
    const RunData run = load_run(run_id, dir);
    for (int i = 0; i <= static_cast<int>(run.rounds.size()); ++i) {
        if (i > 0) {
            if (fps <= 0) {
                std::cout << "[enter] next frame" << std::flush;
                std::string line;
                if (!std::getline(std::cin, line)) break;
            } else {
                std::this_thread::sleep_for(std::chrono::duration<double>(1.0 / fps));
            }
        }
        print_frame(std::cout, run, i);
    }
    std::cout << fmt::format("final score {:.2f}\n", run.meta.score);
    return 0;
}

int metrics(const std::string& run_id, const std::string& dir, const std::string& out_path) {
    const RunData run = load_run(run_id, dir);
    const std::string csv = metrics_csv(recompute_metrics(run));
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream(out_path, std::ios::binary) << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded grid-world benchmark for decentralized multi-agent coordination"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    auto* run_cmd = app.add_subcommand("run", "Run a benchmark batch and print the score table");
    run_cmd->add_option("-c,--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("-o,--output", output_dir, "Override output_dir");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run the batch for every sweep.num_agents x sweep.view_size");
    sweep_cmd->add_option("-c,--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("-o,--output", output_dir, "Override output_dir");

    std::string run_id;
    std::string batch_dir = "runs";
    double fps = 2.0;
    auto* replay_cmd = app.add_subcommand("replay", "Animate a logged run in the terminal");
    replay_cmd->add_option("run_id", run_id, "Run identifier")->required();
    replay_cmd->add_option("-d,--dir", batch_dir, "Batch directory");
    replay_cmd->add_option("--fps", fps, "Frames per second; 0 steps on Enter");

    std::string csv_path;
    auto* metrics_cmd = app.add_subcommand("metrics", "Recompute per-round metrics from a run's logs");
    metrics_cmd->add_option("run_id", run_id, "Run identifier")->required();
    metrics_cmd->add_option("-d,--dir", batch_dir, "Batch directory");
    metrics_cmd->add_option("-o,--out", csv_path, "Write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed() || sweep_cmd->parsed()) {
            RunConfig cfg = load_run_config(config_path);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            std::vector<BatchResult> batches;
            if (run_cmd->parsed()) batches.push_back(run_benchmark(cfg, &std::cerr));
            else batches = run_sweep(cfg, &std::cerr);
            std::cout << score_table(batches);
            for (const auto& b : batches) {
                for (const auto& e : b.episodes) {
                    if (!e.error.empty()) return 1;
                }
            }
            return 0;
        }
        if (replay_cmd->parsed()) return replay(run_id, batch_dir, fps);
        if (metrics_cmd->parsed()) return metrics(run_id, batch_dir, csv_path);
    } catch (const NotFoundError& e) {
        std::cerr << "not found: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid log: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
