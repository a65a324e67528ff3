#include "mapf/low_level.hpp"

#include <boost/heap/d_ary_heap.hpp>

#include <algorithm>
#include <array>
#include <deque>

namespace mapf {

const DistanceField& DistanceCache::to(Cell target) {
    auto it = fields_.find(target);
    if (it == fields_.end()) it = fields_.emplace(target, backward_dijkstra(*map_, target)).first;
    return it->second;
}

ConstraintSet ConstraintSet::compile(std::span<const AgentConstraint> constraints,
                                     const GridMap& map, int window) {
    ConstraintSet set;
    const std::int64_t size = map.size();
    for (const AgentConstraint& c : constraints) {
        switch (c.kind) {
            case AgentConstraint::Kind::ForbidVertex:
                set.forbidden_vertices.insert(static_cast<std::int64_t>(c.t) * size + c.from);
                break;
            case AgentConstraint::Kind::ForbidEdge:
                set.forbidden_edges.insert(
                    (static_cast<std::int64_t>(c.t) * size + c.from) * size + c.to);
                break;
            case AgentConstraint::Kind::RequireVertex:
                if (set.required_terminal && *set.required_terminal != c.from)
                    set.contradictory = true;
                set.required_terminal = c.from;
                break;
        }
    }
    if (set.required_terminal &&
        set.vertex_forbidden(map, *set.required_terminal, window))
        set.contradictory = true;
    return set;
}

namespace {

struct Node {
    Cell cell;
    int t;
    std::int64_t g;
    std::int64_t f;  // g + h^BD(cell)
    int conflicts;   // accumulated along the path
    int parent;      // index into node pool, -1 at root
    bool closed = false;
    bool in_focal = false;
};

// Strict total orders over distinct (cell, t) states keep every heap pop
// deterministic.
struct AnchorCmp {
    const std::deque<Node>* nodes;
    bool operator()(int a, int b) const {
        const Node& na = (*nodes)[static_cast<std::size_t>(a)];
        const Node& nb = (*nodes)[static_cast<std::size_t>(b)];
        if (na.f != nb.f) return na.f > nb.f;  // min-heap via greater
        if (na.g != nb.g) return na.g < nb.g;  // prefer larger g
        if (na.cell != nb.cell) return na.cell > nb.cell;
        return na.t > nb.t;
    }
};

struct FocalCmp {
    const std::deque<Node>* nodes;
    bool operator()(int a, int b) const {
        const Node& na = (*nodes)[static_cast<std::size_t>(a)];
        const Node& nb = (*nodes)[static_cast<std::size_t>(b)];
        if (na.conflicts != nb.conflicts) return na.conflicts > nb.conflicts;
        if (na.g != nb.g) return na.g < nb.g;  // prefer larger g
        if (na.cell != nb.cell) return na.cell > nb.cell;
        return na.t > nb.t;
    }
};

using AnchorHeap =
    boost::heap::d_ary_heap<int, boost::heap::arity<2>, boost::heap::compare<AnchorCmp>,
                            boost::heap::mutable_<true>>;
using FocalHeap =
    boost::heap::d_ary_heap<int, boost::heap::arity<2>, boost::heap::compare<FocalCmp>,
                            boost::heap::mutable_<true>>;

}  // namespace

LowLevelResult plan_agent_path(const GridMap& map, const LowLevelQuery& query,
                               std::span<const AgentConstraint> constraints,
                               const SiblingPaths& siblings, DistanceCache& dist_cache) {
    LowLevelResult result;
    const int window = query.window;
    const ConstraintSet cons = ConstraintSet::compile(constraints, map, window);
    if (cons.contradictory) return result;
    if (cons.vertex_forbidden(map, query.start, 0)) return result;

    const DistanceField* require_field = nullptr;
    if (cons.required_terminal) {
        require_field = &dist_cache.to(*cons.required_terminal);
        if (!require_field->reachable(query.start) ||
            require_field->at(query.start) > window)
            return result;
    }

    const DistanceField& h = *query.goal_field;
    std::deque<Node> nodes;
    std::unordered_map<std::int64_t, int> seen;  // (t * size + cell) -> node index
    std::vector<AnchorHeap::handle_type> anchor_handles;
    std::vector<FocalHeap::handle_type> focal_handles;

    AnchorHeap anchor{AnchorCmp{&nodes}};
    FocalHeap focal{FocalCmp{&nodes}};

    auto admissible = [&](const Node& n, std::int64_t min_f) {
        return query.rule == LowLevelFocal::WeightedH
                   ? weighted_focal_admissible(n.g, n.f - n.g, query.w, min_f)
                   : baseline_focal_admissible(n.g, n.f - n.g, query.w, min_f);
    };

    auto make_node = [&](Cell cell, int t, std::int64_t g, int conflicts, int parent) {
        Node n;
        n.cell = cell;
        n.t = t;
        n.g = g;
        n.f = g + h.at(cell);
        n.conflicts = conflicts;
        n.parent = parent;
        return n;
    };

    const Node root = make_node(query.start, 0, 0, 0, -1);
    if (!h.reachable(query.start)) return result;
    nodes.push_back(root);
    anchor_handles.push_back(anchor.push(0));
    focal_handles.emplace_back();
    seen.emplace(static_cast<std::int64_t>(0) * map.size() + query.start, 0);

    std::int64_t scan_bound = -1;  // last min_f the focal list was filled for
    std::array<Cell, 5> buf;

    while (!anchor.empty()) {
        const std::int64_t min_f = nodes[static_cast<std::size_t>(anchor.top())].f;
        if (min_f > scan_bound) {
            // Threshold grew: admit newly qualifying open nodes into focal.
            for (auto it = anchor.begin(); it != anchor.end(); ++it) {
                Node& n = nodes[static_cast<std::size_t>(*it)];
                if (!n.in_focal && admissible(n, min_f)) {
                    n.in_focal = true;
                    focal_handles[static_cast<std::size_t>(*it)] = focal.push(*it);
                }
            }
            scan_bound = min_f;
        } else if (min_f < scan_bound) {
            scan_bound = min_f;  // a reopen lowered the bound; rescan later
        }

        // Drop stale focal entries (possible after a reopen tightened the bound).
        int cur = -1;
        while (!focal.empty()) {
            const int top = focal.top();
            Node& n = nodes[static_cast<std::size_t>(top)];
            if (n.closed || !admissible(n, min_f)) {
                focal.pop();
                n.in_focal = false;
                continue;
            }
            cur = top;
            break;
        }
        if (cur == -1) {
            // Both rules admit the anchor minimum, so this only happens when
            // every focal entry went stale; fall back to the anchor top.
            cur = anchor.top();
        }

        Node& node = nodes[static_cast<std::size_t>(cur)];
        if (node.in_focal) {
            focal.erase(focal_handles[static_cast<std::size_t>(cur)]);
            node.in_focal = false;
        }
        anchor.erase(anchor_handles[static_cast<std::size_t>(cur)]);
        node.closed = true;

        if (node.t == window) {
            result.feasible = true;
            result.min_f = min_f;
            result.path.assign(static_cast<std::size_t>(window) + 1, -1);
            for (int i = cur; i != -1; i = nodes[static_cast<std::size_t>(i)].parent)
                result.path[static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)].t)] =
                    nodes[static_cast<std::size_t>(i)].cell;
            return result;
        }

        const int nt = node.t + 1;
        const Cell cell = node.cell;
        const std::int64_t g = node.g;
        const int conflicts = node.conflicts;
        const int n_neigh = map.neighbors(cell, buf);
        for (int i = 0; i < n_neigh; ++i) {
            const Cell next = buf[static_cast<std::size_t>(i)];
            if (cons.vertex_forbidden(map, next, nt)) continue;
            if (next != cell && cons.edge_forbidden(map, cell, next, node.t)) continue;
            if (require_field && require_field->at(next) > window - nt) continue;
            if (!h.reachable(next)) continue;
            const std::int64_t ng = g + transition_cost(query.goal, cell, next);
            const int nconf = conflicts + siblings.count_move(cell, next, node.t);
            const std::int64_t key = static_cast<std::int64_t>(nt) * map.size() + next;
            auto it = seen.find(key);
            if (it == seen.end()) {
                nodes.push_back(make_node(next, nt, ng, nconf, cur));
                const int idx = static_cast<int>(nodes.size()) - 1;
                seen.emplace(key, idx);
                anchor_handles.push_back(anchor.push(idx));
                focal_handles.emplace_back();
                Node& pushed = nodes[static_cast<std::size_t>(idx)];
                if (admissible(pushed, min_f)) {
                    pushed.in_focal = true;
                    focal_handles[static_cast<std::size_t>(idx)] = focal.push(idx);
                }
            } else {
                Node& old = nodes[static_cast<std::size_t>(it->second)];
                if (ng < old.g || (ng == old.g && nconf < old.conflicts)) {
                    const bool was_closed = old.closed;
                    old.g = ng;
                    old.f = ng + h.at(next);
                    old.conflicts = nconf;
                    old.parent = cur;
                    old.closed = false;
                    if (was_closed) {
                        anchor_handles[static_cast<std::size_t>(it->second)] =
                            anchor.push(it->second);
                    } else {
                        anchor.update(anchor_handles[static_cast<std::size_t>(it->second)]);
                        if (old.in_focal)
                            focal.update(focal_handles[static_cast<std::size_t>(it->second)]);
                    }
                    if (!old.in_focal && admissible(old, min_f)) {
                        old.in_focal = true;
                        focal_handles[static_cast<std::size_t>(it->second)] =
                            focal.push(it->second);
                    }
                }
            }
        }
    }
    return result;  // anchor exhausted: no constraint-satisfying path of length W
}

}  // namespace mapf
