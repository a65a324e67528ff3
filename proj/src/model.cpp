#include "mapf/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mapf {

bool AgentGroup::contains(int agent) const {
    return std::binary_search(members.begin(), members.end(), agent);
}

bool AgentGroup::intersects(const AgentGroup& other) const {
    auto a = members.begin();
    auto b = other.members.begin();
    while (a != members.end() && b != other.members.end()) {
        if (*a == *b) return true;
        if (*a < *b)
            ++a;
        else
            ++b;
    }
    return false;
}

bool AgentGroup::subset_of(const AgentGroup& other) const {
    return std::includes(other.members.begin(), other.members.end(), members.begin(),
                         members.end());
}

int transition_cost(Cell goal, Cell from, Cell to) {
    return (from == to && to == goal) ? 0 : 1;
}

int transition_cost(const AgentTask& task, Cell from, Cell to) {
    return transition_cost(task.goal, from, to);
}

int transition_cost_checked(const GridMap& map, const AgentTask& task, Cell from, Cell to) {
    if (!is_legal_move(map, from, to))
        throw std::logic_error("transition_cost: illegal move " + std::to_string(from) + " -> " +
                               std::to_string(to));
    return transition_cost(task.goal, from, to);
}

bool is_legal_move(const GridMap& map, Cell from, Cell to) {
    if (from < 0 || to < 0 || from >= map.size() || to >= map.size()) return false;
    if (map.is_blocked(from) || map.is_blocked(to)) return false;
    if (from == to) return true;
    const int dr = std::abs(map.row_of(from) - map.row_of(to));
    const int dc = std::abs(map.col_of(from) - map.col_of(to));
    return dr + dc == 1;
}

std::int64_t path_cost_prefix(const AgentPath& path, Cell goal, int t_end) {
    std::int64_t cost = 0;
    for (int t = 0; t < t_end; ++t)
        cost += transition_cost(goal, path[static_cast<std::size_t>(t)],
                                path[static_cast<std::size_t>(t) + 1]);
    return cost;
}

std::int64_t sum_of_cost(const std::vector<AgentPath>& paths, const std::vector<AgentTask>& tasks) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < paths.size(); ++i)
        total += path_cost_prefix(paths[i], tasks[i].goal,
                                  static_cast<int>(paths[i].size()) - 1);
    return total;
}

std::int64_t sum_of_cost(const WindowedPlan& plan, const std::vector<AgentTask>& tasks) {
    std::int64_t total = 0;
    for (std::size_t t = 0; t + 1 < plan.steps.size(); ++t)
        for (std::size_t i = 0; i < tasks.size(); ++i)
            total += transition_cost(tasks[i].goal, plan.steps[t][i], plan.steps[t + 1][i]);
    return total;
}

std::vector<Conflict> detect_collisions(std::span<const Cell> path_a, std::span<const Cell> path_b,
                                        int agent_a, int agent_b) {
    if (path_a.size() != path_b.size())
        throw std::invalid_argument("detect_collisions: path length mismatch");
    std::vector<Conflict> conflicts;
    const int len = static_cast<int>(path_a.size());
    for (int t = 0; t < len; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        if (path_a[ut] == path_b[ut]) {
            Conflict c;
            c.kind = ConflictKind::Vertex;
            c.agent_a = agent_a;
            c.agent_b = agent_b;
            c.timestep = t;
            c.cell_a = path_a[ut];
            conflicts.push_back(c);
        }
        if (t + 1 < len && path_a[ut] != path_a[ut + 1] && path_a[ut] == path_b[ut + 1] &&
            path_a[ut + 1] == path_b[ut]) {
            Conflict c;
            c.kind = ConflictKind::Edge;
            c.agent_a = agent_a;
            c.agent_b = agent_b;
            c.timestep = t;
            c.cell_a = path_a[ut];
            c.cell_b = path_a[ut + 1];
            conflicts.push_back(c);
        }
    }
    std::stable_sort(conflicts.begin(), conflicts.end(), [](const Conflict& a, const Conflict& b) {
        if (a.timestep != b.timestep) return a.timestep < b.timestep;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    return conflicts;
}

bool validate_plan(const GridMap& map, const std::vector<Configuration>& steps) {
    try {
        require_valid_plan(map, steps);
        return true;
    } catch (const std::logic_error&) {
        return false;
    }
}

void require_valid_plan(const GridMap& map, const std::vector<Configuration>& steps) {
    if (steps.empty()) throw std::logic_error("plan has no configurations");
    const std::size_t n = steps[0].size();
    for (std::size_t t = 0; t < steps.size(); ++t) {
        if (steps[t].size() != n) throw std::logic_error("configuration size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (map.is_blocked(steps[t][i]))
                throw std::logic_error("agent " + std::to_string(i) + " on blocked cell at t=" +
                                       std::to_string(t));
            for (std::size_t j = i + 1; j < n; ++j)
                if (steps[t][i] == steps[t][j])
                    throw std::logic_error("vertex collision between agents " + std::to_string(i) +
                                           " and " + std::to_string(j) + " at t=" +
                                           std::to_string(t));
        }
        if (t + 1 < steps.size()) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_legal_move(map, steps[t][i], steps[t + 1][i]))
                    throw std::logic_error("illegal move for agent " + std::to_string(i) +
                                           " at t=" + std::to_string(t));
                for (std::size_t j = i + 1; j < n; ++j)
                    if (steps[t][i] == steps[t + 1][j] && steps[t + 1][i] == steps[t][j])
                        throw std::logic_error("edge collision between agents " +
                                               std::to_string(i) + " and " + std::to_string(j) +
                                               " across t=" + std::to_string(t));
            }
        }
    }
}

std::uint64_t configuration_hash(const Configuration& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Cell c : config) {
        for (int byte = 0; byte < 4; ++byte) {
            h ^= static_cast<std::uint64_t>((static_cast<std::uint32_t>(c) >> (8 * byte)) & 0xFF);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace mapf
