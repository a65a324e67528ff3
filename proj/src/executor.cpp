#include "mapf/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <unordered_map>

namespace mapf {

const char* to_string(EpisodeStatus status) {
    switch (status) {
        case EpisodeStatus::Solved: return "solved";
        case EpisodeStatus::Timeout: return "timeout";
        case EpisodeStatus::IterationCap: return "iteration-cap";
        case EpisodeStatus::PlannerFailure: return "planner-failure";
    }
    return "?";
}

const char* to_string(SolverKind solver) {
    return solver == SolverKind::Dag ? "dag" : "ecbs";
}

std::int64_t auto_iteration_cap(const Instance& instance) {
    std::int64_t max_h = 0;
    for (const AgentTask& task : instance.tasks)
        max_h = std::max<std::int64_t>(max_h, instance.heur.dist(task.agent_id, task.start));
    const auto n = static_cast<std::int64_t>(instance.tasks.size());
    return std::max<std::int64_t>(1, 10 * n * max_h);
}

Configuration execute_step(const GridMap& map, const Configuration& current,
                           const WindowedPlan& plan) {
    if (plan.steps.size() < 2) throw std::logic_error("execute_step: plan has no move");
    if (plan.steps[0] != current)
        throw std::logic_error("execute_step: plan does not start at the current configuration");
    require_valid_plan(map, {plan.steps[0], plan.steps[1]});
    return plan.steps[1];
}

namespace {

void log_iteration(std::ostream* out, std::int64_t iter, std::uint64_t config_hash,
                   const PlannerResult& plan, std::int64_t step_cost, double seconds,
                   bool log_timing) {
    if (!out) return;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    *out << "{\"iter\":" << iter << ",\"config\":\"" << hash_buf << "\",\"groups\":[";
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        *out << (g ? "," : "") << "[";
        for (std::size_t m = 0; m < plan.groups[g].group.members.size(); ++m)
            *out << (m ? "," : "") << plan.groups[g].group.members[m];
        *out << "]";
    }
    *out << "],\"merges\":" << plan.merges << ",\"step_cost\":" << step_cost;
    if (log_timing) {
        char t[32];
        std::snprintf(t, sizeof(t), "%.6f", seconds);
        *out << ",\"plan_seconds\":" << t;
    }
    *out << "}\n";
}

}  // namespace

EpisodeResult run_episode(const Instance& instance, PenaltyStore* store,
                          const EpisodeOptions& options) {
    using Clock = std::chrono::steady_clock;
    EpisodeResult result;

    Configuration goals;
    goals.reserve(instance.tasks.size());
    for (const AgentTask& task : instance.tasks) goals.push_back(task.goal);
    Configuration config;
    config.reserve(instance.tasks.size());
    for (const AgentTask& task : instance.tasks) config.push_back(task.start);

    const std::int64_t cap =
        options.iteration_cap > 0 ? options.iteration_cap : auto_iteration_cap(instance);

    DistanceCache dist_cache(instance.map);
    result.executed.push_back(config);

    // Raise counter recorded at each visit of a configuration, before that
    // iteration's planning; a recurrence must observe growth in between.
    std::unordered_map<std::uint64_t, std::uint64_t> last_visit_raises;

    const SearchRules rules = SearchRules::dag();
    double budget_left = options.timeout_s;

    while (true) {
        if (config == goals) {
            result.status = EpisodeStatus::Solved;
            break;
        }
        if (result.iterations >= cap) {
            result.status = EpisodeStatus::IterationCap;
            break;
        }

        if (store) {
            const std::uint64_t h = configuration_hash(config);
            const auto it = last_visit_raises.find(h);
            if (it != last_visit_raises.end()) {
                ++result.revisits;
                if (store->raise_events() <= it->second) result.revisit_progress_ok = false;
                it->second = store->raise_events();
            } else {
                last_visit_raises.emplace(h, store->raise_events());
            }
        }

        const auto t0 = Clock::now();
        const Deadline deadline =
            t0 + std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double>(std::max(0.0, budget_left)));
        PlannerResult plan;
        if (options.solver == SolverKind::Dag) {
            plan = plan_step(instance.map, instance.tasks, instance.heur, dist_cache, store,
                             config, options.window, options.w, rules, deadline,
                             options.ct_trace);
        } else {
            plan = solve_windowed_ecbs_baseline(instance.map, instance.tasks, instance.heur,
                                                dist_cache, config, options.window, options.w,
                                                deadline, options.ct_trace);
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        result.total_plan_seconds += seconds;
        result.max_iter_seconds = std::max(result.max_iter_seconds, seconds);
        budget_left -= seconds;

        if (plan.status == PlanStatus::Timeout || budget_left < 0) {
            result.status = EpisodeStatus::Timeout;
            break;
        }
        if (plan.status == PlanStatus::Infeasible) {
            result.status = EpisodeStatus::PlannerFailure;
            break;
        }

        result.merges_total += plan.merges;
        result.final_group_sizes.clear();
        for (const GroupRecord& rec : plan.groups)
            result.final_group_sizes.push_back(rec.group.size());

        if (options.on_plan) options.on_plan(plan, config);

        // Heuristic updates for each disjoint group, exactly once (Fig. 1).
        if (options.solver == SolverKind::Dag && store) {
            for (const GroupRecord& rec : plan.groups) {
                std::vector<Cell> c0_locs;
                c0_locs.reserve(rec.group.members.size());
                for (int agent : rec.group.members)
                    c0_locs.push_back(config[static_cast<std::size_t>(agent)]);
                const Scaled h_terminal = rec.solution.terminal_heuristic(options.w);
                const auto update = store->apply_terminal_update(
                    rec.group, c0_locs, rec.solution.terminal, rec.solution.path_cost, h_terminal);
                std::vector<std::vector<Cell>> group_path(
                    static_cast<std::size_t>(options.window) + 1,
                    std::vector<Cell>(rec.group.members.size()));
                for (int t = 0; t <= options.window; ++t)
                    for (std::size_t m = 0; m < rec.group.members.size(); ++m)
                        group_path[static_cast<std::size_t>(t)][m] =
                            rec.solution.paths[m][static_cast<std::size_t>(t)];
                store->apply_intermediate_updates(rec.group, group_path, update.updated_value);
            }
        }

        const std::uint64_t planning_hash = configuration_hash(config);
        const int steps_to_execute = options.execute_full_window ? options.window : 1;
        std::int64_t step_cost = 0;
        for (int s = 0; s < steps_to_execute; ++s) {
            WindowedPlan remainder;
            remainder.window = plan.joint.window - s;
            remainder.steps.assign(plan.joint.steps.begin() + s, plan.joint.steps.end());
            Configuration next = execute_step(instance.map, config, remainder);
            for (std::size_t i = 0; i < instance.tasks.size(); ++i)
                step_cost += transition_cost(instance.tasks[i].goal, config[i], next[i]);
            config = std::move(next);
            result.executed.push_back(config);
            if (config == goals) break;
        }

        log_iteration(options.episode_log, result.iterations, planning_hash, plan, step_cost,
                      seconds, options.log_timing);
        ++result.iterations;
    }

    WindowedPlan whole;
    whole.steps = result.executed;
    whole.window = static_cast<int>(result.executed.size()) - 1;
    result.total_cost = sum_of_cost(whole, instance.tasks);
    if (result.status == EpisodeStatus::Solved)
        require_valid_plan(instance.map, result.executed);

    if (options.episode_log) {
        std::ostream& out = *options.episode_log;
        out << "{\"result\":\"" << to_string(result.status)
            << "\",\"iterations\":" << result.iterations << ",\"total_cost\":" << result.total_cost
            << ",\"revisits\":" << result.revisits
            << ",\"revisit_progress_ok\":" << (result.revisit_progress_ok ? "true" : "false");
        if (options.log_timing) {
            char t[32];
            std::snprintf(t, sizeof(t), "%.6f", result.total_plan_seconds);
            out << ",\"total_plan_seconds\":" << t;
        }
        out << "}\n";
    }
    return result;
}

}  // namespace mapf
