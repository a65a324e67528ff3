#include "mapf/penalty_store.hpp"

#include <algorithm>
#include <ostream>

namespace mapf {

std::size_t PenaltyStore::KeyHash::operator()(const std::vector<std::int64_t>& key) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : key) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

std::vector<std::int64_t> PenaltyStore::make_key(const AgentGroup& group,
                                                 std::span<const Cell> locations) {
    std::vector<std::int64_t> key;
    key.reserve(group.members.size() * 2);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        key.push_back(group.members[i]);
        key.push_back(locations[i]);
    }
    return key;
}

Scaled PenaltyStore::default_heuristic(const AgentGroup& group,
                                       std::span<const Cell> locations) const {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < group.members.size(); ++i)
        sum += heur_->dist(group.members[i], locations[i]);
    return w_.scale_weighted(sum);
}

Scaled PenaltyStore::group_heuristic(const AgentGroup& group,
                                     std::span<const Cell> locations) const {
    const auto it = index_.find(make_key(group, locations));
    if (it != index_.end()) return entries_[static_cast<std::size_t>(it->second)].h_value;
    return default_heuristic(group, locations);
}

Scaled PenaltyStore::residual(const PenaltyEntry& entry) const {
    return entry.h_value - default_heuristic(entry.group, entry.locations);
}

std::vector<int> PenaltyStore::matched_penalties(const AgentGroup& planning_group,
                                                 const Configuration& terminal_by_agent,
                                                 const AgentGroup* excluded_agents) const {
    struct Candidate {
        Scaled residual;
        int index;
    };
    std::vector<Candidate> candidates;
    for (int idx = 0; idx < num_entries(); ++idx) {
        const PenaltyEntry& e = entries_[static_cast<std::size_t>(idx)];
        if (!e.group.subset_of(planning_group)) continue;
        if (excluded_agents && e.group.intersects(*excluded_agents)) continue;
        bool match = true;
        for (std::size_t i = 0; i < e.group.members.size(); ++i) {
            if (terminal_by_agent[static_cast<std::size_t>(e.group.members[i])] !=
                e.locations[i]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        const Scaled r = residual(e);
        if (r > Scaled{0}) candidates.push_back({r, idx});
    }
    std::sort(candidates.begin(), candidates.end(), [this](const Candidate& a, const Candidate& b) {
        if (a.residual != b.residual) return a.residual > b.residual;
        return entries_[static_cast<std::size_t>(a.index)].group <
               entries_[static_cast<std::size_t>(b.index)].group;
    });
    std::vector<int> kept;
    std::vector<int> taken_agents;
    for (const Candidate& c : candidates) {
        const AgentGroup& g = entries_[static_cast<std::size_t>(c.index)].group;
        bool overlap = false;
        for (int agent : g.members)
            if (std::binary_search(taken_agents.begin(), taken_agents.end(), agent)) {
                overlap = true;
                break;
            }
        if (overlap) continue;
        kept.push_back(c.index);
        for (int agent : g.members)
            taken_agents.insert(
                std::lower_bound(taken_agents.begin(), taken_agents.end(), agent), agent);
    }
    return kept;
}

bool PenaltyStore::upsert_max(const AgentGroup& group, std::span<const Cell> locations,
                              Scaled candidate) {
    auto key = make_key(group, locations);
    const auto it = index_.find(key);
    if (it == index_.end()) {
        if (candidate <= default_heuristic(group, locations)) return false;
        PenaltyEntry e;
        e.group = group;
        e.locations.assign(locations.begin(), locations.end());
        e.h_value = candidate;
        entries_.push_back(std::move(e));
        index_.emplace(std::move(key), num_entries() - 1);
        ++raise_events_;
        return true;
    }
    PenaltyEntry& e = entries_[static_cast<std::size_t>(it->second)];
    if (candidate <= e.h_value) return false;
    e.h_value = candidate;
    ++raise_events_;
    return true;
}

PenaltyStore::UpdateResult PenaltyStore::apply_terminal_update(const AgentGroup& group,
                                                               std::span<const Cell> c0_locations,
                                                               std::span<const Cell> cw_locations,
                                                               std::int64_t path_cost_plain,
                                                               Scaled h_terminal) {
    (void)cw_locations;
    const Scaled candidate = w_.scale(path_cost_plain) + h_terminal;
    const bool raised = upsert_max(group, c0_locations, candidate);
    UpdateResult res;
    res.updated_value = group_heuristic(group, c0_locations);
    res.raised = raised;
    return res;
}

void PenaltyStore::apply_intermediate_updates(const AgentGroup& group,
                                              const std::vector<std::vector<Cell>>& group_path,
                                              Scaled terminal_update_value) {
    const int window = static_cast<int>(group_path.size()) - 1;
    std::int64_t prefix_cost = 0;
    for (int t = 1; t <= window - 1; ++t) {
        const auto& prev = group_path[static_cast<std::size_t>(t) - 1];
        const auto& cur = group_path[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < group.members.size(); ++i)
            prefix_cost += transition_cost(heur_->goal(group.members[i]), prev[i], cur[i]);
        const Scaled candidate = terminal_update_value - w_.scale_weighted(prefix_cost);
        upsert_max(group, cur, candidate);
    }
}

void PenaltyStore::dump_jsonl(std::ostream& out) const {
    std::vector<int> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        const PenaltyEntry& ea = entries_[static_cast<std::size_t>(a)];
        const PenaltyEntry& eb = entries_[static_cast<std::size_t>(b)];
        if (ea.group != eb.group) return ea.group < eb.group;
        return ea.locations < eb.locations;
    });
    for (int idx : order) {
        const PenaltyEntry& e = entries_[static_cast<std::size_t>(idx)];
        out << "{\"agents\":[";
        for (std::size_t i = 0; i < e.group.members.size(); ++i)
            out << (i ? "," : "") << e.group.members[i];
        out << "],\"locations\":[";
        for (std::size_t i = 0; i < e.locations.size(); ++i)
            out << (i ? "," : "") << e.locations[i];
        out << "],\"h_value_num\":" << e.h_value.v << ",\"h_value_den\":" << w_.den
            << ",\"residual_num\":" << residual(e).v << "}\n";
    }
}

}  // namespace mapf
