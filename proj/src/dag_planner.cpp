#include "mapf/dag_planner.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace mapf {

AgentGroup merge_groups(const AgentGroup& a, const std::vector<AgentGroup>& bs) {
    AgentGroup merged = a;
    for (const AgentGroup& b : bs) {
        if (merged.intersects(b)) throw std::invalid_argument("merge_groups: overlapping groups");
        std::vector<int> out;
        std::set_union(merged.members.begin(), merged.members.end(), b.members.begin(),
                       b.members.end(), std::back_inserter(out));
        merged.members = std::move(out);
    }
    return merged;
}

std::vector<AgentGroup> cross_group_conflicts(const GroupSolution& candidate,
                                              const std::vector<GroupRecord>& committed,
                                              const PenaltyStore* store) {
    std::vector<AgentGroup> conflicting;
    auto add = [&](const AgentGroup& g) {
        if (std::find(conflicting.begin(), conflicting.end(), g) == conflicting.end())
            conflicting.push_back(g);
    };

    for (const GroupRecord& rec : committed) {
        bool hit = false;
        for (std::size_t a = 0; a < candidate.paths.size() && !hit; ++a)
            for (std::size_t b = 0; b < rec.solution.paths.size() && !hit; ++b)
                if (!detect_collisions(candidate.paths[a], rec.solution.paths[b],
                                       candidate.group.members[a], rec.group.members[b])
                         .empty())
                    hit = true;
        if (hit) add(rec.group);
    }

    if (store) {
        // Combined terminal over the candidate and all committed groups.
        std::unordered_map<int, Cell> terminal;
        for (std::size_t i = 0; i < candidate.group.members.size(); ++i)
            terminal[candidate.group.members[i]] = candidate.terminal[i];
        for (const GroupRecord& rec : committed)
            for (std::size_t i = 0; i < rec.group.members.size(); ++i)
                terminal[rec.group.members[i]] = rec.solution.terminal[i];

        for (const PenaltyEntry& entry : store->entries()) {
            if (store->residual(entry) <= Scaled{0}) continue;
            bool matched = true;
            bool touches_candidate = false;
            bool outside_candidate = false;
            for (std::size_t i = 0; i < entry.group.members.size() && matched; ++i) {
                const int agent = entry.group.members[i];
                const auto it = terminal.find(agent);
                if (it == terminal.end() || it->second != entry.locations[i]) {
                    matched = false;
                    break;
                }
                if (candidate.group.contains(agent))
                    touches_candidate = true;
                else
                    outside_candidate = true;
            }
            if (!matched || !touches_candidate || !outside_candidate) continue;
            for (const GroupRecord& rec : committed)
                if (rec.group.intersects(entry.group)) add(rec.group);
        }
    }

    std::sort(conflicting.begin(), conflicting.end());
    return conflicting;
}

namespace {

PlannerResult assemble(const std::vector<AgentTask>& tasks, std::vector<GroupRecord> committed,
                       int window, int merges, int solve_calls) {
    PlannerResult result;
    result.status = PlanStatus::Success;
    result.merges = merges;
    result.solve_calls = solve_calls;
    std::sort(committed.begin(), committed.end(),
              [](const GroupRecord& a, const GroupRecord& b) { return a.group < b.group; });
    result.joint.window = window;
    result.joint.steps.assign(static_cast<std::size_t>(window) + 1,
                              Configuration(tasks.size(), -1));
    for (const GroupRecord& rec : committed)
        for (std::size_t m = 0; m < rec.group.members.size(); ++m)
            for (int t = 0; t <= window; ++t)
                result.joint.steps[static_cast<std::size_t>(t)]
                                  [static_cast<std::size_t>(rec.group.members[m])] =
                    rec.solution.paths[m][static_cast<std::size_t>(t)];
    result.groups = std::move(committed);
    return result;
}

}  // namespace

PlannerResult plan_step(const GridMap& map, const std::vector<AgentTask>& tasks,
                        const HeuristicTable& heur, DistanceCache& dist_cache,
                        const PenaltyStore* store, const Configuration& config, int window,
                        SuboptFactor w, const SearchRules& rules, const Deadline& deadline,
                        std::ostream* ct_trace) {
    std::deque<AgentGroup> active;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        active.push_back(AgentGroup::single(static_cast<int>(i)));
    std::vector<GroupRecord> committed;
    int merges = 0;
    int solve_calls = 0;

    while (!active.empty()) {
        if (past(deadline)) {
            PlannerResult r;
            r.status = PlanStatus::Timeout;
            r.merges = merges;
            r.solve_calls = solve_calls;
            return r;
        }
        AgentGroup group = std::move(active.front());
        active.pop_front();

        ++solve_calls;
        GroupSolveResult res = solve_group(map, tasks, heur, dist_cache, group, store, config,
                                           window, w, rules, deadline, ct_trace);
        if (res.status != SolveStatus::Solved) {
            PlannerResult r;
            r.status = res.status == SolveStatus::Timeout ? PlanStatus::Timeout
                                                          : PlanStatus::Infeasible;
            r.merges = merges;
            r.solve_calls = solve_calls;
            return r;
        }

        std::vector<AgentGroup> conflicting = cross_group_conflicts(res.solution, committed, store);
        if (conflicting.empty()) {
            committed.push_back(GroupRecord{std::move(group), std::move(res.solution)});
            continue;
        }

        AgentGroup merged = merge_groups(group, conflicting);
        std::erase_if(committed, [&](const GroupRecord& rec) {
            return std::find(conflicting.begin(), conflicting.end(), rec.group) !=
                   conflicting.end();
        });
        active.push_back(std::move(merged));
        ++merges;
    }

    return assemble(tasks, std::move(committed), window, merges, solve_calls);
}

PlannerResult solve_windowed_ecbs_baseline(const GridMap& map, const std::vector<AgentTask>& tasks,
                                           const HeuristicTable& heur, DistanceCache& dist_cache,
                                           const Configuration& config, int window, SuboptFactor w,
                                           const Deadline& deadline, std::ostream* ct_trace) {
    AgentGroup all;
    all.members.resize(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) all.members[i] = static_cast<int>(i);
    GroupSolveResult res = solve_group(map, tasks, heur, dist_cache, all, nullptr, config, window,
                                       w, SearchRules::windowed_ecbs(), deadline, ct_trace);
    if (res.status != SolveStatus::Solved) {
        PlannerResult r;
        r.status =
            res.status == SolveStatus::Timeout ? PlanStatus::Timeout : PlanStatus::Infeasible;
        r.solve_calls = 1;
        return r;
    }
    std::vector<GroupRecord> committed;
    committed.push_back(GroupRecord{all, std::move(res.solution)});
    return assemble(tasks, std::move(committed), window, 0, 1);
}

}  // namespace mapf
