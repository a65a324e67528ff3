#include "mapf/group_ecbs.hpp"

#include <boost/heap/d_ary_heap.hpp>

#include <algorithm>
#include <cassert>
#include <deque>
#include <ostream>

namespace mapf {

Scaled dag_anchor_priority(std::span<const std::int64_t> lower_bounds, Scaled h_p,
                           SuboptFactor w) {
    std::int64_t sum = 0;
    for (std::int64_t lb : lower_bounds) sum += lb;
    return h_p + w.scale_weighted(sum);
}

std::vector<Branch> branch_on_conflict(const Conflict& conflict, const AgentGroup& group,
                                       const PenaltyStore* store, int window) {
    auto member_index = [&](int agent) {
        const auto it = std::lower_bound(group.members.begin(), group.members.end(), agent);
        assert(it != group.members.end() && *it == agent);
        return static_cast<int>(it - group.members.begin());
    };

    std::vector<Branch> branches;
    switch (conflict.kind) {
        case ConflictKind::Vertex: {
            Branch a, b;
            a.added.emplace_back(member_index(conflict.agent_a),
                                 AgentConstraint::forbid_vertex(conflict.cell_a, conflict.timestep));
            b.added.emplace_back(member_index(conflict.agent_b),
                                 AgentConstraint::forbid_vertex(conflict.cell_a, conflict.timestep));
            branches.push_back(std::move(a));
            branches.push_back(std::move(b));
            break;
        }
        case ConflictKind::Edge: {
            Branch a, b;
            a.added.emplace_back(
                member_index(conflict.agent_a),
                AgentConstraint::forbid_edge(conflict.cell_a, conflict.cell_b, conflict.timestep));
            b.added.emplace_back(
                member_index(conflict.agent_b),
                AgentConstraint::forbid_edge(conflict.cell_b, conflict.cell_a, conflict.timestep));
            branches.push_back(std::move(a));
            branches.push_back(std::move(b));
            break;
        }
        case ConflictKind::Heuristic: {
            const PenaltyEntry& entry = store->entry(conflict.entry_index);
            // One avoidance child per member: any configuration that avoids
            // the entry has at least one member elsewhere at t = W.
            for (std::size_t i = 0; i < entry.group.members.size(); ++i) {
                Branch avoid;
                avoid.added.emplace_back(
                    member_index(entry.group.members[i]),
                    AgentConstraint::forbid_vertex(entry.locations[i], window));
                branches.push_back(std::move(avoid));
            }
            Branch incur;
            for (std::size_t i = 0; i < entry.group.members.size(); ++i)
                incur.added.emplace_back(
                    member_index(entry.group.members[i]),
                    AgentConstraint::require_vertex(entry.locations[i], window));
            incur.incur_entry = conflict.entry_index;
            branches.push_back(std::move(incur));
            break;
        }
    }
    return branches;
}

namespace {

struct CtNode {
    std::vector<std::vector<AgentConstraint>> constraints;  // per member
    std::vector<AgentPath> paths;                           // per member
    std::vector<std::int64_t> lower_bounds;                 // per member, plain min F1
    Scaled h_p{0};
    std::vector<int> incurred;
    AgentGroup incurred_agents;  // union of incurred entries' members
    std::int64_t path_cost = 0;
    std::int64_t terminal_hbd = 0;
    std::int64_t lb_sum = 0;
    Scaled anchor_key{0};
    Scaled focal_obj{0};
    int conflict_count = 0;
    std::optional<Conflict> first_conflict;
    std::uint64_t id = 0;
    int parent = -1;
    bool in_focal = false;
    bool popped = false;
};

struct AnchorCmp {
    const std::deque<CtNode>* nodes;
    bool operator()(int a, int b) const {
        const CtNode& na = (*nodes)[static_cast<std::size_t>(a)];
        const CtNode& nb = (*nodes)[static_cast<std::size_t>(b)];
        if (na.anchor_key != nb.anchor_key) return na.anchor_key > nb.anchor_key;
        return na.id > nb.id;
    }
};

struct FocalCmp {
    const std::deque<CtNode>* nodes;
    bool operator()(int a, int b) const {
        const CtNode& na = (*nodes)[static_cast<std::size_t>(a)];
        const CtNode& nb = (*nodes)[static_cast<std::size_t>(b)];
        if (na.conflict_count != nb.conflict_count) return na.conflict_count > nb.conflict_count;
        if (na.anchor_key != nb.anchor_key) return na.anchor_key > nb.anchor_key;
        return na.id > nb.id;
    }
};

using AnchorHeap =
    boost::heap::d_ary_heap<int, boost::heap::arity<2>, boost::heap::compare<AnchorCmp>,
                            boost::heap::mutable_<true>>;
using FocalHeap =
    boost::heap::d_ary_heap<int, boost::heap::arity<2>, boost::heap::compare<FocalCmp>,
                            boost::heap::mutable_<true>>;

class GroupSearch {
public:
    GroupSearch(const GridMap& map, const std::vector<AgentTask>& tasks,
                const HeuristicTable& heur, DistanceCache& dist_cache, const AgentGroup& group,
                const PenaltyStore* store, const Configuration& start_config, int window,
                SuboptFactor w, const SearchRules& rules, const Deadline& deadline,
                std::ostream* trace)
        : map_(map),
          tasks_(tasks),
          heur_(heur),
          dist_cache_(dist_cache),
          group_(group),
          store_(rules.high_level == HighLevelFlavor::DagPenalties ? store : nullptr),
          start_(start_config),
          window_(window),
          w_(w),
          rules_(rules),
          deadline_(deadline),
          trace_(trace),
          anchor_(AnchorCmp{&nodes_}),
          focal_(FocalCmp{&nodes_}) {}

    GroupSolveResult run();

private:
    int k() const { return group_.size(); }
    int agent(int member) const { return group_.members[static_cast<std::size_t>(member)]; }

    bool replan_member(CtNode& node, int member);
    void finish_node(CtNode& node);
    bool detect_heuristic_conflict(const CtNode& node, Conflict& out) const;
    void push_node(CtNode node);
    GroupSolution extract(const CtNode& node, Scaled bound) const;
    void trace_node(const CtNode& node, const char* event) const;

    const GridMap& map_;
    const std::vector<AgentTask>& tasks_;
    const HeuristicTable& heur_;
    DistanceCache& dist_cache_;
    const AgentGroup& group_;
    const PenaltyStore* store_;
    const Configuration& start_;
    int window_;
    SuboptFactor w_;
    SearchRules rules_;
    Deadline deadline_;
    std::ostream* trace_;

    std::deque<CtNode> nodes_;
    std::vector<AnchorHeap::handle_type> anchor_handles_;
    std::vector<FocalHeap::handle_type> focal_handles_;
    AnchorHeap anchor_;
    FocalHeap focal_;
    std::uint64_t next_id_ = 0;
    GroupSolveStats stats_;
};

// Replans one member under the node's constraints; counts conflicts against
// the other members' current paths. Returns false if infeasible.
bool GroupSearch::replan_member(CtNode& node, int member) {
    ++stats_.ll_calls;
    SiblingPaths siblings;
    for (int m = 0; m < k(); ++m)
        if (m != member && !node.paths[static_cast<std::size_t>(m)].empty())
            siblings.paths.push_back(&node.paths[static_cast<std::size_t>(m)]);
    const int agent_id = agent(member);
    LowLevelQuery query;
    query.start = start_[static_cast<std::size_t>(agent_id)];
    query.goal_field = &heur_.fields[static_cast<std::size_t>(agent_id)];
    query.goal = tasks_[static_cast<std::size_t>(agent_id)].goal;
    query.window = window_;
    query.w = w_;
    query.rule = rules_.low_level;
    LowLevelResult res = plan_agent_path(map_, query, node.constraints[static_cast<std::size_t>(member)],
                                         siblings, dist_cache_);
    if (!res.feasible) return false;
    node.paths[static_cast<std::size_t>(member)] = std::move(res.path);
    node.lower_bounds[static_cast<std::size_t>(member)] = res.min_f;
    return true;
}

// Recomputes the node's cost, heuristic, priorities, and conflicts.
void GroupSearch::finish_node(CtNode& node) {
    node.path_cost = 0;
    node.terminal_hbd = 0;
    node.lb_sum = 0;
    for (int m = 0; m < k(); ++m) {
        const int agent_id = agent(m);
        const AgentPath& path = node.paths[static_cast<std::size_t>(m)];
        node.path_cost +=
            path_cost_prefix(path, tasks_[static_cast<std::size_t>(agent_id)].goal, window_);
        node.terminal_hbd += heur_.dist(agent_id, path.back());
        node.lb_sum += node.lower_bounds[static_cast<std::size_t>(m)];
    }
    if (rules_.high_level == HighLevelFlavor::DagPenalties) {
        node.anchor_key = node.h_p + w_.scale_weighted(node.lb_sum);
        node.focal_obj = w_.scale(node.path_cost) + w_.scale_weighted(node.terminal_hbd) + node.h_p;
    } else {
        node.anchor_key = w_.scale(node.lb_sum);
        node.focal_obj = w_.scale(node.path_cost + node.terminal_hbd);
    }

    node.conflict_count = 0;
    node.first_conflict.reset();
    for (int a = 0; a < k(); ++a) {
        for (int b = a + 1; b < k(); ++b) {
            auto conflicts = detect_collisions(node.paths[static_cast<std::size_t>(a)],
                                               node.paths[static_cast<std::size_t>(b)], agent(a),
                                               agent(b));
            node.conflict_count += static_cast<int>(conflicts.size());
            for (const Conflict& c : conflicts) {
                if (!node.first_conflict) {
                    node.first_conflict = c;
                    continue;
                }
                const Conflict& best = *node.first_conflict;
                const auto key = [](const Conflict& x) {
                    return std::tuple(x.timestep, static_cast<int>(x.kind), x.agent_a, x.agent_b,
                                      x.cell_a);
                };
                if (key(c) < key(best)) node.first_conflict = c;
            }
        }
    }
}

// A heuristic conflict is a matched, unresolved penalty entry at the node's
// terminal configuration. Entries overlapping already-incurred agents are
// excluded so the residuals summed into h_p stay pairwise disjoint.
bool GroupSearch::detect_heuristic_conflict(const CtNode& node, Conflict& out) const {
    if (!store_) return false;
    Configuration terminal_by_agent(tasks_.size(), -1);
    for (int m = 0; m < k(); ++m)
        terminal_by_agent[static_cast<std::size_t>(agent(m))] =
            node.paths[static_cast<std::size_t>(m)].back();
    const AgentGroup* excluded = node.incurred_agents.members.empty() ? nullptr
                                                                      : &node.incurred_agents;
    std::vector<int> matched = store_->matched_penalties(group_, terminal_by_agent, excluded);
    if (matched.empty()) return false;
    out = Conflict{};
    out.kind = ConflictKind::Heuristic;
    out.timestep = window_;
    out.entry_index = matched.front();
    return true;
}

void GroupSearch::push_node(CtNode node) {
    node.id = next_id_++;
    nodes_.push_back(std::move(node));
    const int idx = static_cast<int>(nodes_.size()) - 1;
    anchor_handles_.push_back(anchor_.push(idx));
    focal_handles_.emplace_back();
}

GroupSolution GroupSearch::extract(const CtNode& node, Scaled bound) const {
    GroupSolution sol;
    sol.group = group_;
    sol.paths = node.paths;
    sol.terminal.reserve(node.paths.size());
    for (const AgentPath& p : node.paths) sol.terminal.push_back(p.back());
    sol.path_cost = node.path_cost;
    sol.terminal_hbd = node.terminal_hbd;
    sol.h_p = node.h_p;
    sol.objective = node.focal_obj;
    sol.lower_bound = bound;
    sol.incurred_entries = node.incurred;
    return sol;
}

void GroupSearch::trace_node(const CtNode& node, const char* event) const {
    if (!trace_) return;
    *trace_ << "{\"event\":\"" << event << "\",\"node\":" << node.id << ",\"parent\":"
            << node.parent << ",\"anchor_key\":" << node.anchor_key.v
            << ",\"conflicts\":" << node.conflict_count << "}\n";
}

GroupSolveResult GroupSearch::run() {
    GroupSolveResult result;

    CtNode root;
    root.constraints.assign(static_cast<std::size_t>(k()), {});
    root.paths.assign(static_cast<std::size_t>(k()), {});
    root.lower_bounds.assign(static_cast<std::size_t>(k()), 0);
    for (int m = 0; m < k(); ++m) {
        if (!replan_member(root, m)) {
            result.status = SolveStatus::Infeasible;
            result.stats = stats_;
            return result;
        }
    }
    finish_node(root);
    root.parent = -1;
    push_node(std::move(root));
    trace_node(nodes_.back(), "root");

    Scaled scan_bound{std::numeric_limits<std::int64_t>::min()};
    Scaled last_min_key{std::numeric_limits<std::int64_t>::min()};

    while (!anchor_.empty()) {
        if (past(deadline_)) {
            result.status = SolveStatus::Timeout;
            result.stats = stats_;
            return result;
        }
        const CtNode& top = nodes_[static_cast<std::size_t>(anchor_.top())];
        const Scaled threshold = rules_.high_level == HighLevelFlavor::DagPenalties
                                     ? top.anchor_key
                                     : w_.scale_weighted(top.lb_sum);
        assert(top.anchor_key >= last_min_key);  // anchor minimum never decreases
        last_min_key = top.anchor_key;
        if (threshold > scan_bound) {
            for (auto it = anchor_.begin(); it != anchor_.end(); ++it) {
                CtNode& n = nodes_[static_cast<std::size_t>(*it)];
                if (!n.in_focal && n.focal_obj <= threshold) {
                    n.in_focal = true;
                    focal_handles_[static_cast<std::size_t>(*it)] = focal_.push(*it);
                }
            }
            scan_bound = threshold;
        }

        // Focal can only be empty under the mutated low-level rule; fall back
        // to the anchor minimum to keep the search exhaustive.
        const int cur = focal_.empty() ? anchor_.top() : focal_.top();
        CtNode& node = nodes_[static_cast<std::size_t>(cur)];
        if (node.in_focal) {
            focal_.erase(focal_handles_[static_cast<std::size_t>(cur)]);
            node.in_focal = false;
        }
        anchor_.erase(anchor_handles_[static_cast<std::size_t>(cur)]);
        node.popped = true;
        ++stats_.ct_expanded;

        Conflict conflict;
        bool have_conflict = false;
        if (node.first_conflict) {
            conflict = *node.first_conflict;
            have_conflict = true;
        } else if (detect_heuristic_conflict(node, conflict)) {
            have_conflict = true;
        }

        if (!have_conflict) {
            trace_node(node, "solution");
            result.status = SolveStatus::Solved;
            result.solution = extract(node, threshold);
            result.stats = stats_;
            return result;
        }

        trace_node(node, "expand");
        for (Branch& branch : branch_on_conflict(conflict, group_, store_, window_)) {
            CtNode child;
            child.constraints = node.constraints;
            child.paths = node.paths;
            child.lower_bounds = node.lower_bounds;
            child.h_p = node.h_p;
            child.incurred = node.incurred;
            child.incurred_agents = node.incurred_agents;
            child.parent = static_cast<int>(node.id);

            std::vector<int> to_replan;
            for (auto& [member, constraint] : branch.added) {
                child.constraints[static_cast<std::size_t>(member)].push_back(constraint);
                to_replan.push_back(member);
            }
            std::sort(to_replan.begin(), to_replan.end());
            to_replan.erase(std::unique(to_replan.begin(), to_replan.end()), to_replan.end());

            if (branch.incur_entry >= 0) {
                const PenaltyEntry& entry = store_->entry(branch.incur_entry);
                child.h_p += store_->residual(entry);
                child.incurred.push_back(branch.incur_entry);
                std::vector<int> merged;
                std::set_union(child.incurred_agents.members.begin(),
                               child.incurred_agents.members.end(), entry.group.members.begin(),
                               entry.group.members.end(), std::back_inserter(merged));
                child.incurred_agents.members = std::move(merged);
            }

            bool feasible = true;
            for (int member : to_replan) {
                if (!replan_member(child, member)) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            finish_node(child);
            push_node(std::move(child));
            trace_node(nodes_.back(), "child");
        }
    }

    result.status = SolveStatus::Infeasible;  // anchor exhausted
    result.stats = stats_;
    return result;
}

}  // namespace

GroupSolveResult solve_group(const GridMap& map, const std::vector<AgentTask>& tasks,
                             const HeuristicTable& heur, DistanceCache& dist_cache,
                             const AgentGroup& group, const PenaltyStore* store,
                             const Configuration& start_config, int window, SuboptFactor w,
                             const SearchRules& rules, const Deadline& deadline,
                             std::ostream* ct_trace) {
    assert(!group.members.empty());
    GroupSearch search(map, tasks, heur, dist_cache, group, store, start_config, window, w, rules,
                       deadline, ct_trace);
    return search.run();
}

}  // namespace mapf
