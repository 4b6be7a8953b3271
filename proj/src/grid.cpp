#include "swarm/grid.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace swarm {

Shape::Shape(int rows, int cols, std::vector<std::uint8_t> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows < 0 || cols < 0 || cells_.size() != static_cast<std::size_t>(rows) * cols) {
        throw InvalidShapeError(fmt::format("shape {}x{} has {} cells", rows, cols, cells_.size()));
    }
}

Shape Shape::filled(int rows, int cols) {
    return Shape(rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, 1));
}

bool Shape::at(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return false;
    return cells_[static_cast<std::size_t>(r) * cols_ + c] != 0;
}

int Shape::area() const {
    return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [](auto v) { return v != 0; }));
}

int mass_of(const Shape& shape) {
    const int area = shape.area();
    if (area < 1) throw InvalidShapeError("mass_of: shape has no occupied cells");
    int m = static_cast<int>(std::sqrt(static_cast<double>(area)));
    while (m * m > area) --m;
    while ((m + 1) * (m + 1) <= area) ++m;
    return m;
}

std::string_view to_string(MeshKind k) {
    switch (k) {
        case MeshKind::Wall: return "wall";
        case MeshKind::Obstacle: return "obstacle";
        case MeshKind::Agent: return "agent";
        case MeshKind::Prey: return "prey";
        case MeshKind::Nest: return "nest";
        case MeshKind::Food: return "food";
    }
    return "?";
}

std::vector<Coord> Mesh::cells() const {
    std::vector<Coord> out;
    for (int r = 0; r < shape.rows(); ++r) {
        for (int c = 0; c < shape.cols(); ++c) {
            if (shape.at(r, c)) out.push_back({anchor.row + r, anchor.col + c});
        }
    }
    return out;
}

std::string_view to_string(TaskKind t) {
    switch (t) {
        case TaskKind::Pursuit: return "pursuit";
        case TaskKind::Synchronization: return "synchronization";
        case TaskKind::Foraging: return "foraging";
        case TaskKind::Flocking: return "flocking";
        case TaskKind::Transport: return "transport";
    }
    return "?";
}

std::string_view display_name(TaskKind t) {
    switch (t) {
        case TaskKind::Pursuit: return "Pursuit";
        case TaskKind::Synchronization: return "Synchronization";
        case TaskKind::Foraging: return "Foraging";
        case TaskKind::Flocking: return "Flocking";
        case TaskKind::Transport: return "Transport";
    }
    return "?";
}

TaskKind parse_task(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sync") return TaskKind::Synchronization;
    for (TaskKind t : kAllTasks) {
        if (lower == to_string(t)) return t;
    }
    throw ConfigError(fmt::format("unknown task '{}'", name));
}

void EnvConfig::validate() const {
    auto require = [](bool ok, std::string_view what) {
        if (!ok) throw ConfigError(std::string(what));
    };
    require(height >= 3 && width >= 3, "height and width must be at least 3");
    require(num_agents >= 1, "num_agents must be positive");
    require(view_size >= 1 && view_size % 2 == 1, "view_size must be a positive odd number");
    require(memory >= 1, "memory must be positive");
    require(max_round >= 1, "max_round must be positive");
    require(respawn_candidates >= 1, "respawn_candidates must be positive");
    require(interior_walls >= 0, "interior_walls must be non-negative");
    require(nest_size >= 1 && food_size >= 1, "nest_size and food_size must be positive");
    require(obstacle_size >= 1, "obstacle_size must be positive");
}

const Mesh* EnvironmentState::find_mesh(int id) const {
    for (const Mesh& m : meshes) {
        if (m.id == id) return &m;
    }
    return nullptr;
}

Mesh* EnvironmentState::find_mesh(int id) {
    for (Mesh& m : meshes) {
        if (m.id == id) return &m;
    }
    return nullptr;
}

std::optional<Coord> EnvironmentState::agent_position(int agent_id) const {
    if (agent_id < 0 || agent_id >= static_cast<int>(agents.size())) return std::nullopt;
    const AgentState& a = agents[agent_id];
    if (!a.on_map()) return std::nullopt;
    const Mesh* m = find_mesh(a.mesh);
    if (m == nullptr) return std::nullopt;
    return m->anchor;
}

const Mesh* EnvironmentState::prey() const {
    for (const Mesh& m : meshes) {
        if (m.kind == MeshKind::Prey) return &m;
    }
    return nullptr;
}

int EnvironmentState::add_mesh(Mesh mesh) {
    mesh.id = next_mesh_id++;
    if (mesh.body < 0) mesh.body = mesh.id;
    meshes.push_back(std::move(mesh));
    return meshes.back().id;
}

namespace {

int precedence(MeshKind k) {
    switch (k) {
        case MeshKind::Agent: return 5;
        case MeshKind::Prey: return 4;
        case MeshKind::Food:
        case MeshKind::Nest: return 3;
        case MeshKind::Obstacle: return 2;
        case MeshKind::Wall: return 1;
    }
    return 0;
}

}  // namespace

Occupancy::Occupancy(const EnvironmentState& state, bool strict)
    : height_(state.height), width_(state.width),
      owner_(static_cast<std::size_t>(state.height) * state.width, -1) {
    for (std::size_t i = 0; i < state.meshes.size(); ++i) {
        const Mesh& m = state.meshes[i];
        for (Coord c : m.cells()) {
            if (!state.inside(c)) continue;
            int& slot = owner_[static_cast<std::size_t>(c.row) * width_ + c.col];
            if (slot < 0) {
                slot = static_cast<int>(i);
                continue;
            }
            if (strict) {
                throw ConsistencyError(fmt::format("meshes {} and {} overlap at ({},{})",
                                                   state.meshes[slot].id, m.id, c.row, c.col));
            }
            if (precedence(m.kind) > precedence(state.meshes[slot].kind)) slot = static_cast<int>(i);
        }
    }
}

int Occupancy::at(Coord c) const {
    if (c.row < 0 || c.row >= height_ || c.col < 0 || c.col >= width_) return -1;
    return owner_[static_cast<std::size_t>(c.row) * width_ + c.col];
}

std::string agent_symbol(const AgentState& agent) {
    if (agent.light || agent.carrying) return fmt::format("${}", agent.id);
    return std::to_string(agent.id);
}

std::string cell_at(const EnvironmentState& state, const Occupancy& occupancy, Coord c) {
    if (!state.inside(c)) return "*";
    const int idx = occupancy.at(c);
    if (idx < 0) return ".";
    const Mesh& m = state.meshes[idx];
    switch (m.kind) {
        case MeshKind::Agent: return agent_symbol(state.agents.at(m.agent));
        case MeshKind::Prey: return "P";
        case MeshKind::Food: return "F";
        case MeshKind::Nest: return "N";
        case MeshKind::Obstacle: return "B";
        case MeshKind::Wall: return "W";
    }
    return ".";
}

std::string cell_at(const EnvironmentState& state, Coord c) {
    return cell_at(state, Occupancy(state, false), c);
}

std::string render_grid(const SymbolGrid& grid) {
    std::string out = "     ";
    for (int j = 0; j < grid.cols(); ++j) {
        const std::string label = std::to_string(grid.origin.col + j);
        out += label;
        if (j + 1 < grid.cols()) out.append(label.size() < 4 ? 4 - label.size() : 1, ' ');
    }
    out += '\n';
    for (int i = 0; i < grid.rows(); ++i) {
        out += fmt::format("{:>3}  ", grid.origin.row + i);
        const auto& row = grid.cells[i];
        for (std::size_t j = 0; j < row.size(); ++j) {
            out += row[j];
            if (j + 1 < row.size()) out.append(row[j].size() < 4 ? 4 - row[j].size() : 1, ' ');
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

int to_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("parse_grid: '{}' is not a coordinate label", s));
    }
    if (used != s.size()) throw std::invalid_argument(fmt::format("parse_grid: bad label '{}'", s));
    return v;
}

}  // namespace

SymbolGrid parse_grid(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        if (end > start) lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    if (lines.empty()) throw std::invalid_argument("parse_grid: empty input");

    const auto header = split_ws(lines[0]);
    SymbolGrid grid;
    for (std::size_t j = 0; j < header.size(); ++j) {
        const int label = to_int(header[j]);
        if (j == 0) grid.origin.col = label;
        else if (label != grid.origin.col + static_cast<int>(j))
            throw std::invalid_argument("parse_grid: column labels are not consecutive");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto tokens = split_ws(lines[i]);
        if (tokens.size() != header.size() + 1) {
            throw std::invalid_argument(fmt::format("parse_grid: row {} has {} cells, expected {}",
                                                    i - 1, tokens.empty() ? 0 : tokens.size() - 1,
                                                    header.size()));
        }
        const int label = to_int(tokens[0]);
        if (i == 1) grid.origin.row = label;
        else if (label != grid.origin.row + static_cast<int>(i) - 1)
            throw std::invalid_argument("parse_grid: row labels are not consecutive");
        grid.cells.emplace_back(tokens.begin() + 1, tokens.end());
    }
    return grid;
}

SymbolGrid symbol_grid(const EnvironmentState& state) {
    const Occupancy occ(state, false);
    SymbolGrid grid;
    grid.cells.resize(state.height);
    for (int i = 0; i < state.height; ++i) {
        grid.cells[i].reserve(state.width);
        for (int j = 0; j < state.width; ++j) grid.cells[i].push_back(cell_at(state, occ, {i, j}));
    }
    return grid;
}

std::string render_ascii(const EnvironmentState& state) { return render_grid(symbol_grid(state)); }

}  // namespace swarm
