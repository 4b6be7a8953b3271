#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/geometry.hpp"
#include "swarm/rng.hpp"

namespace swarm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the engine would commit an inconsistent world (overlapping meshes).
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rectangular occupancy mask. Cells outside the mask bounds are empty.
class Shape {
public:
    Shape() = default;
    Shape(int rows, int cols, std::vector<std::uint8_t> cells);

    static Shape filled(int rows, int cols);
    static Shape unit() { return filled(1, 1); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool at(int r, int c) const;
    int area() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// floor(sqrt(area)); throws InvalidShapeError on an empty shape.
int mass_of(const Shape& shape);

enum class MeshKind : std::uint8_t { Wall, Obstacle, Agent, Prey, Nest, Food };

std::string_view to_string(MeshKind k);

struct Mesh {
    int id = 0;
    MeshKind kind = MeshKind::Wall;
    Coord anchor;  // top-left of the shape's bounding box
    Shape shape = Shape::unit();
    bool is_static = false;
    /// Rigid-body group. Meshes sharing a body are bonded and always move together.
    int body = -1;
    /// Agent id for agent meshes, -1 otherwise.
    int agent = -1;

    /// Occupied cells in global coordinates, row-major.
    std::vector<Coord> cells() const;

    friend bool operator==(const Mesh&, const Mesh&) = default;
};

struct AgentState {
    int id = 0;
    std::string name;
    int mesh = -1;          // mesh id; -1 once the agent has left the map
    bool light = false;     // synchronization state
    bool carrying = false;  // foraging state
    std::optional<int> escaped_round;

    bool on_map() const { return mesh >= 0; }

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class TaskKind : std::uint8_t { Pursuit, Synchronization, Foraging, Flocking, Transport };

inline constexpr TaskKind kAllTasks[] = {TaskKind::Pursuit, TaskKind::Synchronization,
                                         TaskKind::Foraging, TaskKind::Flocking,
                                         TaskKind::Transport};

std::string_view to_string(TaskKind t);
std::string_view display_name(TaskKind t);
TaskKind parse_task(std::string_view name);  // throws ConfigError

/// Per-task bookkeeping that is not visible on the grid.
struct TaskState {
    /// Synchronization: unanimous light state that last scored (nullopt before the first).
    std::optional<bool> sync_prev;
    /// Flocking: target formation and dissimilarity values.
    std::vector<Coord> flock_target;
    double init_dis = 0.0;
    double cur_dis = 0.0;
    /// Transport: agent ids in escape order.
    std::vector<int> escaped;
    /// Pursuit: number of random empty cells considered when the prey respawns.
    int respawn_candidates = 8;

    friend bool operator==(const TaskState&, const TaskState&) = default;
};

struct EnvConfig {
    int height = 12;
    int width = 12;
    int num_agents = 12;
    int view_size = 5;
    int memory = 5;
    int max_round = 100;
    int respawn_candidates = 8;
    int interior_walls = 2;  // foraging wall segments
    int nest_size = 2;       // foraging nest cluster side
    int food_size = 2;       // foraging food cluster side
    int obstacle_size = 5;   // transport obstacle side; mass = side

    void validate() const;  // throws ConfigError
    friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct EnvironmentState {
    TaskKind task = TaskKind::Pursuit;
    int height = 0;
    int width = 0;
    std::vector<Mesh> meshes;
    std::vector<AgentState> agents;
    int round = 0;
    int max_round = 0;
    double score = 0.0;
    bool done = false;
    TaskState task_state;
    Rng rng;
    int next_mesh_id = 0;

    bool inside(Coord c) const { return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width; }

    const Mesh* find_mesh(int id) const;
    Mesh* find_mesh(int id);
    /// Position of an on-map agent (agents are 1x1).
    std::optional<Coord> agent_position(int agent_id) const;
    const Mesh* prey() const;

    /// Appends a mesh with a fresh id (body defaults to the id) and returns the id.
    int add_mesh(Mesh mesh);

    friend bool operator==(const EnvironmentState&, const EnvironmentState&) = default;
};

/// Cell -> index into `meshes` for every in-map cell (-1 when empty).
class Occupancy {
public:
    /// Strict mode throws ConsistencyError if two meshes claim the same cell;
    /// otherwise the highest-precedence claimant wins.
    explicit Occupancy(const EnvironmentState& state, bool strict = true);

    int at(Coord c) const;  // -1 for empty or off-map

private:
    int height_;
    int width_;
    std::vector<int> owner_;
};

/// Symbol shown for a cell: `*` off-map, agent id (or `$id` when lit/carrying),
/// `P`, `F`, `N`, `B`, `W`, or `.`. When several meshes could claim a cell the
/// precedence is agent > prey > food/nest > obstacle > wall.
std::string cell_at(const EnvironmentState& state, Coord c);
std::string cell_at(const EnvironmentState& state, const Occupancy& occupancy, Coord c);

std::string agent_symbol(const AgentState& agent);

/// Symbol rows with their global row/column labels; the shared text layout of
/// egocentric views and global map dumps.
struct SymbolGrid {
    Coord origin;  // global coordinate of the top-left symbol
    std::vector<std::vector<std::string>> cells;

    int rows() const { return static_cast<int>(cells.size()); }
    int cols() const { return cells.empty() ? 0 : static_cast<int>(cells.front().size()); }

    friend bool operator==(const SymbolGrid&, const SymbolGrid&) = default;
};

/// Column header line followed by one labelled line per row.
std::string render_grid(const SymbolGrid& grid);
/// Inverse of render_grid; throws std::invalid_argument on malformed text.
SymbolGrid parse_grid(std::string_view text);

SymbolGrid symbol_grid(const EnvironmentState& state);
std::string render_ascii(const EnvironmentState& state);

}  // namespace swarm
