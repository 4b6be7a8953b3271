#include "swarm/runlog.hpp"

#include <fmt/format.h>

#include <system_error>

namespace swarm {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const RoundRecord& r) {
    json agents = json::array();
    for (const auto& a : r.agents) agents.push_back({{"id", a.id}, {"x", a.x}, {"y", a.y}});
    return {{"round", r.round}, {"grid", r.grid}, {"score", r.score}, {"agents", agents},
            {"messages", r.messages}};
}

json to_json(const AgentRecord& r) {
    return {{"round", r.round},       {"agent_id", r.agent_id}, {"name", r.name},
            {"view", r.view},         {"prompt", r.prompt},     {"response", r.response},
            {"action", r.action},     {"message", r.message},   {"fallback", r.fallback},
            {"retries", r.retries}};
}

json to_json(const RunMeta& m) {
    json initial = to_json(m.initial);
    initial.erase("round");
    initial.erase("messages");
    return {{"schema_version", m.schema_version},
            {"model", m.model},
            {"policy", m.policy},
            {"task", m.task},
            {"seed", m.seed},
            {"num_agents", m.num_agents},
            {"max_round", m.max_round},
            {"height", m.height},
            {"width", m.width},
            {"view_size", m.view_size},
            {"memory", m.memory},
            {"temperature", m.temperature ? json(*m.temperature) : json(nullptr)},
            {"rounds", m.rounds},
            {"score", m.score},
            {"initial", initial}};
}

fs::path agent_log_path(const fs::path& dir, const std::string& run_id) {
    return dir / fmt::format("agent_log_{}.json", run_id);
}

fs::path game_log_path(const fs::path& dir, const std::string& run_id) {
    return dir / fmt::format("game_log_{}.json", run_id);
}

fs::path meta_log_path(const fs::path& dir) { return dir / "meta_log.json"; }

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

}  // namespace

void RunLogWriter::ArrayFile::open(const fs::path& path) {
    out_.exceptions(std::ios::failbit | std::ios::badbit);
    out_.open(path, std::ios::binary | std::ios::trunc);
    out_ << "[\n";
    tail_ = out_.tellp();
    out_ << "]\n";
    out_.flush();
}

void RunLogWriter::ArrayFile::append(const json& element) {
    out_.seekp(tail_);
    if (!empty_) out_ << ",\n";
    out_ << element.dump();
    tail_ = out_.tellp();
    out_ << "\n]\n";
    out_.flush();
    empty_ = false;
}

RunLogWriter::RunLogWriter(fs::path dir, std::string run_id) : dir_(std::move(dir)), run_id_(std::move(run_id)) {
    try {
        fs::create_directories(dir_);
        agent_log_.open(agent_log_path(dir_, run_id_));
        game_log_.open(game_log_path(dir_, run_id_));
    } catch (const std::exception& e) {
        abort();
        throw std::runtime_error(fmt::format("cannot open logs for {}: {}", run_id_, e.what()));
    }
}

RunLogWriter::~RunLogWriter() {
    agent_log_.close();
    game_log_.close();
}

void RunLogWriter::on_round(const RoundRecord& round, const std::vector<AgentRecord>& agents) {
    try {
        for (const auto& a : agents) agent_log_.append(to_json(a));
        game_log_.append(to_json(round));
    } catch (const std::exception& e) {
        abort();
        throw std::runtime_error(fmt::format("writing logs for {} failed: {}", run_id_, e.what()));
    }
}

void RunLogWriter::abort() {
    agent_log_.close();
    game_log_.close();
    std::error_code ec;
    fs::remove(agent_log_path(dir_, run_id_), ec);
    fs::remove(game_log_path(dir_, run_id_), ec);
}

void write_meta_log(const fs::path& dir, const std::vector<RunMeta>& runs) {
    fs::create_directories(dir);
    json meta = json::object();
    for (const auto& m : runs) meta[m.run_id] = to_json(m);
    write_file(meta_log_path(dir), meta.dump(2) + "\n");
}

void write_batch(const fs::path& dir, const std::vector<RunData>& runs) {
    std::vector<RunMeta> metas;
    for (const auto& run : runs) {
        RunLogWriter writer(dir, run.meta.run_id);
        std::size_t next_agent = 0;
        for (const auto& round : run.rounds) {
            std::vector<AgentRecord> agents;
            for (; next_agent < run.agents.size() && run.agents[next_agent].round == round.round; ++next_agent) {
                agents.push_back(run.agents[next_agent]);
            }
            writer.on_round(round, agents);
        }
        metas.push_back(run.meta);
    }
    write_meta_log(dir, metas);
}

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError(fmt::format("{} not found", path.string()));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: invalid JSON ({})", path.filename().string(), e.what()));
    }
}

/// Typed field access that reports the failing location.
class Reader {
public:
    Reader(const json& node, std::string where) : node_(node), where_(std::move(where)) {
        if (!node_.is_object()) fail("", "expected an object");
    }

    template <typename T>
    T get(const std::string& key) const {
        auto it = node_.find(key);
        if (it == node_.end()) fail(key, "missing");
        try {
            return it->template get<T>();
        } catch (const json::exception&) {
            fail(key, fmt::format("unexpected type {}", it->type_name()));
        }
    }

    const json& raw(const std::string& key) const {
        auto it = node_.find(key);
        if (it == node_.end()) fail(key, "missing");
        return *it;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ValidationError(fmt::format("{}{}{}: {}", where_, key.empty() ? "" : ".", key, why));
    }

    const std::string& where() const { return where_; }

private:
    const json& node_;
    std::string where_;
};

std::vector<AgentPosition> read_positions(const Reader& r) {
    const json& list = r.raw("agents");
    if (!list.is_array()) r.fail("agents", "expected an array");
    std::vector<AgentPosition> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        Reader a(list[i], fmt::format("{}.agents[{}]", r.where(), i));
        out.push_back({a.get<int>("id"), a.get<int>("x"), a.get<int>("y")});
    }
    return out;
}

RoundRecord read_round(const json& node, const std::string& where, bool full) {
    Reader r(node, where);
    RoundRecord rec;
    if (full) {
        rec.round = r.get<int>("round");
        rec.messages = r.get<std::vector<std::string>>("messages");
    }
    rec.grid = r.get<std::vector<std::vector<std::string>>>("grid");
    rec.score = r.get<double>("score");
    rec.agents = read_positions(r);
    for (std::size_t i = 0; i < rec.agents.size(); ++i) {
        const auto& a = rec.agents[i];
        const bool inside = a.y >= 0 && a.y < static_cast<int>(rec.grid.size()) && a.x >= 0 &&
                            a.x < static_cast<int>(rec.grid[a.y].size());
        if (!inside) r.fail(fmt::format("agents[{}]", i), "position outside the grid");
        const std::string& sym = rec.grid[a.y][a.x];
        if (sym != std::to_string(a.id) && sym != "$" + std::to_string(a.id)) {
            r.fail(fmt::format("agents[{}]", i), fmt::format("grid shows '{}' at the agent's cell", sym));
        }
    }
    return rec;
}

}  // namespace

std::vector<std::string> list_runs(const fs::path& dir) {
    const json meta = read_json(meta_log_path(dir));
    if (!meta.is_object()) throw ValidationError("meta_log.json: expected an object keyed by run id");
    std::vector<std::string> out;
    for (const auto& [key, value] : meta.items()) out.push_back(key);
    return out;
}

RunData load_run(const std::string& run_id, const fs::path& dir) {
    const json meta_doc = read_json(meta_log_path(dir));
    if (!meta_doc.is_object()) throw ValidationError("meta_log.json: expected an object keyed by run id");
    auto entry = meta_doc.find(run_id);
    if (entry == meta_doc.end()) {
        throw NotFoundError(fmt::format("run '{}' is not in {}", run_id, meta_log_path(dir).string()));
    }

    RunData run;
    RunMeta& m = run.meta;
    const Reader r(*entry, fmt::format("meta_log[{}]", run_id));
    m.run_id = run_id;
    m.schema_version = r.get<int>("schema_version");
    if (m.schema_version != kSchemaVersion) r.fail("schema_version", fmt::format("unsupported version {}", m.schema_version));
    m.model = r.get<std::string>("model");
    m.policy = r.get<std::string>("policy");
    m.task = r.get<std::string>("task");
    m.seed = r.get<std::uint64_t>("seed");
    m.num_agents = r.get<int>("num_agents");
    m.max_round = r.get<int>("max_round");
    m.height = r.get<int>("height");
    m.width = r.get<int>("width");
    m.view_size = r.get<int>("view_size");
    m.memory = r.get<int>("memory");
    if (const json& t = r.raw("temperature"); !t.is_null()) m.temperature = r.get<double>("temperature");
    m.rounds = r.get<int>("rounds");
    m.score = r.get<double>("score");
    m.initial = read_round(r.raw("initial"), r.where() + ".initial", false);

    const json game = read_json(game_log_path(dir, run_id));
    if (!game.is_array()) throw ValidationError(fmt::format("game_log_{}: expected an array", run_id));
    for (std::size_t i = 0; i < game.size(); ++i) {
        run.rounds.push_back(read_round(game[i], fmt::format("game_log[{}]", i), true));
        if (run.rounds.back().round != static_cast<int>(i)) {
            throw ValidationError(fmt::format("game_log[{}].round: expected {}", i, i));
        }
    }
    if (static_cast<int>(run.rounds.size()) != m.rounds) {
        throw ValidationError(fmt::format("game_log_{}: {} rounds but meta_log says {}", run_id,
                                          run.rounds.size(), m.rounds));
    }

    const json agents = read_json(agent_log_path(dir, run_id));
    if (!agents.is_array()) throw ValidationError(fmt::format("agent_log_{}: expected an array", run_id));
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Reader a(agents[i], fmt::format("agent_log[{}]", i));
        AgentRecord rec;
        rec.round = a.get<int>("round");
        rec.agent_id = a.get<int>("agent_id");
        rec.name = a.get<std::string>("name");
        rec.view = a.get<std::string>("view");
        rec.prompt = a.get<std::string>("prompt");
        rec.response = a.get<std::string>("response");
        rec.action = a.get<std::string>("action");
        rec.message = a.get<std::string>("message");
        rec.fallback = a.get<std::string>("fallback");
        rec.retries = a.get<int>("retries");
        if (!parse_action(rec.action)) a.fail("action", fmt::format("'{}' is not an action", rec.action));
        if (rec.round < 0 || rec.round >= m.rounds) a.fail("round", "outside the logged rounds");
        run.agents.push_back(std::move(rec));
    }
    return run;
}

}  // namespace swarm
