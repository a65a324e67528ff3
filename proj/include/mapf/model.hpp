#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

// Joint state: one cell per agent, indexed by agent_id.
using Configuration = std::vector<Cell>;

// A single agent's windowed path, always of length W+1 (index 0 = current).
using AgentPath = std::vector<Cell>;

// Sorted, nonempty set of agent ids. Within one planning iteration all groups
// are pairwise disjoint and their union covers all agents.
struct AgentGroup {
    std::vector<int> members;

    static AgentGroup single(int agent) { return AgentGroup{{agent}}; }
    int size() const { return static_cast<int>(members.size()); }
    bool contains(int agent) const;
    bool intersects(const AgentGroup& other) const;
    bool subset_of(const AgentGroup& other) const;

    friend bool operator==(const AgentGroup&, const AgentGroup&) = default;
    friend auto operator<=>(const AgentGroup& a, const AgentGroup& b) {
        return a.members <=> b.members;
    }
};

// Joint windowed plan: steps[0] is the current configuration, steps[W] the
// terminal one.
struct WindowedPlan {
    std::vector<Configuration> steps;
    int window = 0;
};

enum class ConflictKind { Vertex, Edge, Heuristic };

struct Conflict {
    ConflictKind kind = ConflictKind::Vertex;
    int agent_a = -1;
    int agent_b = -1;
    int timestep = 0;     // vertex: collision at t; edge: swap across t -> t+1
    Cell cell_a = -1;     // vertex cell, or agent_a's cell at t for an edge
    Cell cell_b = -1;     // agent_a's cell at t+1 for an edge
    int entry_index = -1; // penalty-store entry for heuristic conflicts
};

// 0 iff the agent rests at its goal, else 1.
int transition_cost(const AgentTask& task, Cell from, Cell to);
int transition_cost(Cell goal, Cell from, Cell to);

// Same, but throws std::logic_error if from -> to is not a legal move.
int transition_cost_checked(const GridMap& map, const AgentTask& task, Cell from, Cell to);

bool is_legal_move(const GridMap& map, Cell from, Cell to);

std::int64_t sum_of_cost(const std::vector<AgentPath>& paths, const std::vector<AgentTask>& tasks);
std::int64_t sum_of_cost(const WindowedPlan& plan, const std::vector<AgentTask>& tasks);

// Cost of one agent's path prefix [0, t_end].
std::int64_t path_cost_prefix(const AgentPath& path, Cell goal, int t_end);

// All vertex/edge conflicts between two equal-length paths, sorted by
// timestep. agent_a/agent_b tag the reported conflicts.
std::vector<Conflict> detect_collisions(std::span<const Cell> path_a, std::span<const Cell> path_b,
                                        int agent_a, int agent_b);

// Exhaustive pairwise validity check of a joint plan; also verifies move
// legality against the map. Returns true iff collision-free and legal.
bool validate_plan(const GridMap& map, const std::vector<Configuration>& steps);

// Throws std::logic_error naming the violation if the plan is invalid.
void require_valid_plan(const GridMap& map, const std::vector<Configuration>& steps);

// FNV-1a over the locations; used for episode logs and revisit detection.
std::uint64_t configuration_hash(const Configuration& config);

}  // namespace mapf
