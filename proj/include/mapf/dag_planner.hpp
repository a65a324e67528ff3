#pragma once

#include <iosfwd>
#include <vector>

#include "mapf/group_ecbs.hpp"
#include "mapf/model.hpp"
#include "mapf/penalty_store.hpp"

namespace mapf {

enum class PlanStatus { Success, Infeasible, Timeout };

struct GroupRecord {
    AgentGroup group;
    GroupSolution solution;
};

struct PlannerResult {
    PlanStatus status = PlanStatus::Infeasible;
    WindowedPlan joint;                // steps[0..W] over all agents
    std::vector<GroupRecord> groups;   // disjoint, sorted by group
    int merges = 0;
    int solve_calls = 0;
};

// Sorted union of a and bs; throws std::invalid_argument on overlap.
AgentGroup merge_groups(const AgentGroup& a, const std::vector<AgentGroup>& bs);

// Committed groups whose plans conflict with the candidate solution: any
// vertex/edge conflict within [0, W], or shared membership in a
// positive-residual penalty entry jointly matched by the combined terminal
// configuration spanning the candidate and a committed group.
std::vector<AgentGroup> cross_group_conflicts(const GroupSolution& candidate,
                                              const std::vector<GroupRecord>& committed,
                                              const PenaltyStore* store);

// One planning iteration of dynamic agent grouping: plan singleton groups
// independently, merge and replan conflicting groups until all are disjoint.
PlannerResult plan_step(const GridMap& map, const std::vector<AgentTask>& tasks,
                        const HeuristicTable& heur, DistanceCache& dist_cache,
                        const PenaltyStore* store, const Configuration& config, int window,
                        SuboptFactor w, const SearchRules& rules, const Deadline& deadline = {},
                        std::ostream* ct_trace = nullptr);

// One constraint-tree search over all agents with the unmodified ECBS rules;
// no penalties, no grouping. The incomplete baseline.
PlannerResult solve_windowed_ecbs_baseline(const GridMap& map, const std::vector<AgentTask>& tasks,
                                           const HeuristicTable& heur, DistanceCache& dist_cache,
                                           const Configuration& config, int window, SuboptFactor w,
                                           const Deadline& deadline = {},
                                           std::ostream* ct_trace = nullptr);

}  // namespace mapf
