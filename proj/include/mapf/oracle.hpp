#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mapf/group_ecbs.hpp"
#include "mapf/model.hpp"
#include "mapf/penalty_store.hpp"

namespace mapf {
namespace oracle {

struct Limits {
    int max_agents = 4;
    std::size_t max_expansions = 20'000'000;
};

// Thrown when an instance exceeds the limits; the oracle never silently
// approximates.
struct Refused : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FullResult {
    std::int64_t cost = 0;
    std::vector<std::vector<Cell>> path;  // group configurations, start included
};

// Joint-configuration A*: minimal sum-of-cost moving the group's members from
// start_locs to their goals, ignoring all non-members. nullopt if no
// collision-free solution exists.
std::optional<FullResult> joint_optimal_cost(const GridMap& map, const HeuristicTable& heur,
                                             const AgentGroup& group,
                                             const std::vector<Cell>& start_locs,
                                             const Limits& limits = {});

struct WindowedOptima {
    std::int64_t physical = 0;  // min c(C^0,C^W) + h^BD(C^W), plain
    Scaled full{0};             // min c + w*h^BD + best matched residuals, scaled
};

// Exhaustive enumeration of all collision-free W-step group plans. The full
// objective charges each terminal the maximum disjoint sum of matched
// positive residuals (the tightest penalty any incur branch can be forced
// into), so it upper-bounds what a valid Group-ECBS solution must beat.
WindowedOptima windowed_optima(const GridMap& map, const HeuristicTable& heur,
                               const AgentGroup& group, const std::vector<Cell>& start_locs,
                               int window, SuboptFactor w, const PenaltyStore* store,
                               const Limits& limits = {});

struct WBoundReport {
    bool pass = false;
    Scaled objective{0};
    WindowedOptima oracle;
};

// fail iff solution objective > w * oracle full objective, exactly.
WBoundReport verify_group_w_bound(const GroupSolution& solution, const WindowedOptima& optima,
                                  SuboptFactor w);

struct AdmissibilityReport {
    int checked = 0;
    std::vector<int> violations;  // entry indices with h_value > w * h*
    bool pass() const { return violations.empty(); }
};

// Theorem-1 check: every stored entry satisfies h_value <= w * h*(C_Gr),
// where h* is the group's full-horizon optimum ignoring non-members.
AdmissibilityReport verify_penalty_admissibility(const PenaltyStore& store, const GridMap& map,
                                                 const HeuristicTable& heur,
                                                 const Limits& limits = {});

struct GapDemo {
    bool global_within = false;
    bool group_a_within = false;
    bool group_b_within = false;
};

// The two-group counterexample: a global w bound can accept plans that
// violate a single group's local w bound.
GapDemo check_global_vs_group_gap(std::int64_t opt_a, std::int64_t opt_b, std::int64_t cost_a,
                                  std::int64_t cost_b, SuboptFactor w);

}  // namespace oracle
}  // namespace mapf
