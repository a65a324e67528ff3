#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "mapf/model.hpp"
#include "mapf/scaled.hpp"

namespace mapf {

// A stored heuristic value for one exact (agent set, locations) key. h_value
// is the full h(C_Gr), not just the residual above w * h^BD.
struct PenaltyEntry {
    AgentGroup group;
    std::vector<Cell> locations;  // parallel to group.members
    Scaled h_value{0};
};

// The learned group heuristic. Entries are keyed by exact agent set and
// locations; lookups during planning match stored subsets of the planning
// group against a terminal configuration. Values only ever increase.
class PenaltyStore {
public:
    PenaltyStore(const HeuristicTable& heur, SuboptFactor w) : heur_(&heur), w_(w) {}

    SuboptFactor w() const { return w_; }

    // w * sum of member h^BD values; the initial heuristic of any group.
    Scaled default_heuristic(const AgentGroup& group, std::span<const Cell> locations) const;

    // Stored value for the exact (group, locations) key, else the default.
    Scaled group_heuristic(const AgentGroup& group, std::span<const Cell> locations) const;

    // h_value - w * h^BD(locations); > 0 only for raised entries.
    Scaled residual(const PenaltyEntry& entry) const;

    // Indices of stored entries with positive residual whose group is a
    // subset of planning_group (disjoint from excluded_agents, if given) and
    // whose locations all match terminal_by_agent. Overlapping matches are
    // resolved greedily: largest residual first, ties by lexicographically
    // smaller group; the result is pairwise disjoint.
    std::vector<int> matched_penalties(const AgentGroup& planning_group,
                                       const Configuration& terminal_by_agent,
                                       const AgentGroup* excluded_agents = nullptr) const;

    struct UpdateResult {
        Scaled updated_value{0};
        bool raised = false;
    };

    // h(C0) <- max(h(C0), path_cost + h_terminal); creates or raises the
    // exact-key entry, never lowers it. path_cost is the plain windowed cost
    // c(C^0_Gr, C^W_Gr); h_terminal already includes incurred penalties.
    UpdateResult apply_terminal_update(const AgentGroup& group, std::span<const Cell> c0_locations,
                                       std::span<const Cell> cw_locations,
                                       std::int64_t path_cost_plain, Scaled h_terminal);

    // For t = 1..W-1: h(C^t) <- max(h(C^t), U - w * c(C^0, C^t)), where
    // group_path[t] holds the group's member locations at step t.
    void apply_intermediate_updates(const AgentGroup& group,
                                    const std::vector<std::vector<Cell>>& group_path,
                                    Scaled terminal_update_value);

    const PenaltyEntry& entry(int index) const { return entries_[static_cast<std::size_t>(index)]; }
    int num_entries() const { return static_cast<int>(entries_.size()); }
    const std::vector<PenaltyEntry>& entries() const { return entries_; }

    // Total number of value raises so far; strictly increases whenever any
    // stored value does. Used for revisit-progress checks and memo keys.
    std::uint64_t raise_events() const { return raise_events_; }

    // One JSON object per entry (agents, locations, h_value num/den), sorted
    // by key so identical stores dump byte-identically.
    void dump_jsonl(std::ostream& out) const;

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& key) const;
    };

    static std::vector<std::int64_t> make_key(const AgentGroup& group,
                                              std::span<const Cell> locations);
    // Returns true if the entry was created or its value raised.
    bool upsert_max(const AgentGroup& group, std::span<const Cell> locations, Scaled candidate);

    const HeuristicTable* heur_;
    SuboptFactor w_;
    std::vector<PenaltyEntry> entries_;
    std::unordered_map<std::vector<std::int64_t>, int, KeyHash> index_;
    std::uint64_t raise_events_ = 0;
};

}  // namespace mapf
