#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm/episode.hpp"

namespace swarm {

/// Raised by load_run; the message names the offending file, field and index.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const RoundRecord& r);
nlohmann::json to_json(const AgentRecord& r);
nlohmann::json to_json(const RunMeta& m);

std::filesystem::path agent_log_path(const std::filesystem::path& dir, const std::string& run_id);
std::filesystem::path game_log_path(const std::filesystem::path& dir, const std::string& run_id);
std::filesystem::path meta_log_path(const std::filesystem::path& dir);

/// Streams one run's agent and game logs, one array element per record.
/// After every round both files are complete JSON documents. Any I/O failure
/// removes the partial files and rethrows.
class RunLogWriter : public EpisodeObserver {
public:
    RunLogWriter(std::filesystem::path dir, std::string run_id);
    ~RunLogWriter() override;

    void on_round(const RoundRecord& round, const std::vector<AgentRecord>& agents) override;
    void abort();  // removes both files

private:
    class ArrayFile {
    public:
        void open(const std::filesystem::path& path);
        void append(const nlohmann::json& element);
        void close() {
            if (out_.is_open()) out_.close();
        }

    private:
        std::ofstream out_;
        std::streamoff tail_ = 0;
        bool empty_ = true;
    };

    std::filesystem::path dir_;
    std::string run_id_;
    ArrayFile agent_log_;
    ArrayFile game_log_;
    bool finished_ = false;
};

/// meta_log.json: an object keyed by run id.
void write_meta_log(const std::filesystem::path& dir, const std::vector<RunMeta>& runs);

/// Writes all three files for complete runs.
void write_batch(const std::filesystem::path& dir, const std::vector<RunData>& runs);

/// Throws NotFoundError for an unknown run and ValidationError for malformed files.
RunData load_run(const std::string& run_id, const std::filesystem::path& dir);
std::vector<std::string> list_runs(const std::filesystem::path& dir);

}  // namespace swarm
