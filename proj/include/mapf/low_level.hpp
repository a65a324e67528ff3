#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mapf/model.hpp"
#include "mapf/scaled.hpp"

namespace mapf {

// Space-time constraint on one agent. require-vertex is only meaningful at
// t = W (penalty-incur branches pin the terminal configuration).
struct AgentConstraint {
    enum class Kind { ForbidVertex, ForbidEdge, RequireVertex };
    Kind kind = Kind::ForbidVertex;
    Cell from = -1;  // ForbidEdge: move source; otherwise the constrained cell
    Cell to = -1;    // ForbidEdge: move target
    int t = 0;       // ForbidEdge: move departs at t (arrives t+1)

    static AgentConstraint forbid_vertex(Cell cell, int t) {
        return {Kind::ForbidVertex, cell, -1, t};
    }
    static AgentConstraint forbid_edge(Cell from, Cell to, int t) {
        return {Kind::ForbidEdge, from, to, t};
    }
    static AgentConstraint require_vertex(Cell cell, int t) {
        return {Kind::RequireVertex, cell, -1, t};
    }
};

// Compiled per-agent constraint lookup for one low-level search.
struct ConstraintSet {
    std::unordered_set<std::int64_t> forbidden_vertices;  // t * size + cell
    std::unordered_set<std::int64_t> forbidden_edges;     // (t * size + from) * size + to
    std::optional<Cell> required_terminal;
    bool contradictory = false;  // two different requires, or require vs forbid

    static ConstraintSet compile(std::span<const AgentConstraint> constraints, const GridMap& map,
                                 int window);
    bool vertex_forbidden(const GridMap& map, Cell cell, int t) const {
        return forbidden_vertices.count(static_cast<std::int64_t>(t) * map.size() + cell) > 0;
    }
    bool edge_forbidden(const GridMap& map, Cell from, Cell to, int t) const {
        return forbidden_edges.count(
                   (static_cast<std::int64_t>(t) * map.size() + from) * map.size() + to) > 0;
    }
};

// Counts conflicts of a candidate move against the other group members'
// current paths (all of length W+1).
struct SiblingPaths {
    std::vector<const AgentPath*> paths;

    int count_move(Cell from, Cell to, int t) const {
        int conflicts = 0;
        const auto ut = static_cast<std::size_t>(t);
        for (const AgentPath* p : paths) {
            if ((*p)[ut + 1] == to) ++conflicts;                      // vertex at t+1
            if ((*p)[ut] == to && (*p)[ut + 1] == from) ++conflicts;  // swap
        }
        return conflicts;
    }
};

// Cache of distance fields keyed by target cell; used for reachability
// pruning toward required terminal cells.
class DistanceCache {
public:
    explicit DistanceCache(const GridMap& map) : map_(&map) {}
    const DistanceField& to(Cell target);

private:
    const GridMap* map_;
    std::unordered_map<Cell, DistanceField> fields_;
};

enum class LowLevelFocal {
    WeightedH,  // DAG rule: c + w*h^BD <= w * min F1
    PlainH,     // unmodified ECBS rule: c + h^BD <= w * min F1
};

// The unmodified ECBS focal admission rule, exact in integers.
inline bool baseline_focal_admissible(std::int64_t g, std::int64_t h_bd, SuboptFactor w,
                                      std::int64_t min_f) {
    return w.scale(g + h_bd) <= w.scale_weighted(min_f);
}

// The DAG rule: h^BD is weighted by w on the left-hand side.
inline bool weighted_focal_admissible(std::int64_t g, std::int64_t h_bd, SuboptFactor w,
                                      std::int64_t min_f) {
    return w.scale(g) + w.scale_weighted(h_bd) <= w.scale_weighted(min_f);
}

struct LowLevelResult {
    bool feasible = false;
    AgentPath path;          // length W+1 when feasible
    std::int64_t min_f = 0;  // min F1 over the anchor at extraction
};

struct LowLevelQuery {
    Cell start = 0;
    const DistanceField* goal_field = nullptr;  // agent's h^BD
    Cell goal = 0;
    int window = 1;
    SuboptFactor w;
    LowLevelFocal rule = LowLevelFocal::WeightedH;
};

// Constrained single-agent space-time focal A* over (cell, t) up to t = W.
// The goal test is t = W (any cell, or the required terminal when present);
// g accrues the rest-at-goal cost exception.
LowLevelResult plan_agent_path(const GridMap& map, const LowLevelQuery& query,
                               std::span<const AgentConstraint> constraints,
                               const SiblingPaths& siblings, DistanceCache& dist_cache);

}  // namespace mapf
