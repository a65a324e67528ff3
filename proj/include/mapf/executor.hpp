#pragma once

#include <functional>
#include <iosfwd>

#include "mapf/dag_planner.hpp"
#include "mapf/grid.hpp"
#include "mapf/model.hpp"
#include "mapf/penalty_store.hpp"

namespace mapf {

enum class SolverKind { Dag, EcbsBaseline };

enum class EpisodeStatus { Solved, Timeout, IterationCap, PlannerFailure };

const char* to_string(EpisodeStatus status);
const char* to_string(SolverKind solver);

struct EpisodeOptions {
    SolverKind solver = SolverKind::Dag;
    int window = 1;
    SuboptFactor w;
    double timeout_s = 60.0;        // planning time only, summed over iterations
    std::int64_t iteration_cap = 0; // 0 = auto: 10 * N * max h^BD at start
    bool execute_full_window = false;  // ablation only; guarantees assume one step
    bool log_timing = true;
    std::ostream* episode_log = nullptr;  // JSONL, one record per iteration
    std::ostream* ct_trace = nullptr;
    // Test hook, invoked after each successful planning call.
    std::function<void(const PlannerResult&, const Configuration&)> on_plan;
};

struct EpisodeResult {
    EpisodeStatus status = EpisodeStatus::PlannerFailure;
    std::vector<Configuration> executed;  // configurations, starts included
    std::int64_t total_cost = 0;
    std::int64_t iterations = 0;
    double total_plan_seconds = 0.0;
    double max_iter_seconds = 0.0;
    int merges_total = 0;
    std::vector<int> final_group_sizes;  // from the last successful plan
    // Revisit bookkeeping: every recurrence of a joint configuration must see
    // at least one stored heuristic value increase in between.
    std::int64_t revisits = 0;
    bool revisit_progress_ok = true;
};

// Returns plan.steps[1] after validating that steps[0] matches the current
// configuration and the move pair is legal and collision-free. Throws
// std::logic_error on a corrupted plan.
Configuration execute_step(const GridMap& map, const Configuration& current,
                           const WindowedPlan& plan);

// The WinC-MAPF outer loop: plan a window, execute one step, update the
// penalty store (DAG only), repeat until the goal configuration or a stop
// condition. `store` may be null for the baseline solver.
EpisodeResult run_episode(const Instance& instance, PenaltyStore* store,
                          const EpisodeOptions& options);

std::int64_t auto_iteration_cap(const Instance& instance);

}  // namespace mapf
