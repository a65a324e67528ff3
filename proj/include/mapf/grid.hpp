#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mapf {

// Row-major cell index into a grid (row * width + col).
using Cell = std::int32_t;

// Marker for cells that cannot reach the goal of a distance field.
inline constexpr int kUnreachable = -1;

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};

// Static obstacle grid with the 4-connected + wait move model.
struct GridMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> blocked;  // width*height entries, row-major

    int size() const { return width * height; }
    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    Cell cell(int row, int col) const { return static_cast<Cell>(row * width + col); }
    int row_of(Cell c) const { return c / width; }
    int col_of(Cell c) const { return c % width; }
    bool is_blocked(Cell c) const { return blocked[static_cast<std::size_t>(c)] != 0; }
    bool passable(Cell c) const { return !is_blocked(c); }
    int blocked_count() const;

    // Fills `out` with the wait move plus passable cardinal neighbors, in the
    // fixed order wait, up, down, left, right. Returns the count.
    int neighbors(Cell c, std::array<Cell, 5>& out) const;
};

// One agent's start/goal assignment.
struct AgentTask {
    int agent_id = 0;
    Cell start = 0;
    Cell goal = 0;
};

// Exact distance-to-goal table for one goal cell (backward Dijkstra; unit
// moves, so effectively a BFS). dist is kUnreachable where no path exists.
struct DistanceField {
    Cell goal = 0;
    std::vector<int> dist;

    int at(Cell c) const { return dist[static_cast<std::size_t>(c)]; }
    bool reachable(Cell c) const { return at(c) != kUnreachable; }
};

GridMap parse_map(std::istream& in);
GridMap parse_map_file(const std::string& path);
std::string serialize_map(const GridMap& map);

std::vector<Cell> neighbors(const GridMap& map, Cell c);

DistanceField backward_dijkstra(const GridMap& map, Cell goal);

// Scenario rows parsed from a .scen file; `declared_optimal` is the file's
// optimal-length column, which is only logged, never trusted.
struct ScenarioRow {
    AgentTask task;
    double declared_optimal = 0.0;
};

std::vector<ScenarioRow> parse_scenario(std::istream& in, const GridMap& map, int num_agents);
std::vector<ScenarioRow> parse_scenario_file(const std::string& path, const GridMap& map,
                                             int num_agents);

// Per-agent backward-Dijkstra fields, indexed by agent_id.
struct HeuristicTable {
    std::vector<DistanceField> fields;

    static HeuristicTable build(const GridMap& map, const std::vector<AgentTask>& tasks);
    int dist(int agent, Cell c) const { return fields[static_cast<std::size_t>(agent)].at(c); }
    Cell goal(int agent) const { return fields[static_cast<std::size_t>(agent)].goal; }
    int num_agents() const { return static_cast<int>(fields.size()); }
};

// A fully loaded problem instance. Construction rejects tasks whose start
// cannot reach its goal (completeness presumes a solution exists per agent).
struct Instance {
    GridMap map;
    std::vector<AgentTask> tasks;
    HeuristicTable heur;
    std::vector<std::string> load_notes;  // e.g. declared-optimal mismatches

    static Instance load(const std::string& map_path, const std::string& scen_path,
                         int num_agents);
    static Instance from_parts(GridMap map, std::vector<AgentTask> tasks);
};

}  // namespace mapf
