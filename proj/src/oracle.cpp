#include "mapf/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <queue>
#include <unordered_map>

namespace mapf {
namespace oracle {

namespace {

// Joint group states are packed into 64 bits: 16 bits per member cell, which
// covers the desk-scale grids the oracle accepts.
std::uint64_t pack(const std::vector<Cell>& locs) {
    std::uint64_t key = 0;
    for (Cell c : locs) key = (key << 16) | static_cast<std::uint64_t>(c & 0xFFFF);
    return key;
}

void check_limits(const GridMap& map, const AgentGroup& group, const Limits& limits) {
    if (group.size() > limits.max_agents || group.size() > 8)
        throw Refused("oracle refuses group of size " + std::to_string(group.size()));
    if (map.size() > 0xFFFF) throw Refused("oracle refuses grid with more than 65535 cells");
}

// Enumerates all collision-free joint moves from `from`, invoking fn(next).
template <typename Fn>
void for_each_joint_move(const GridMap& map, const std::vector<Cell>& from, Fn&& fn) {
    const int k = static_cast<int>(from.size());
    std::vector<Cell> next(from.size());
    std::array<std::array<Cell, 5>, 8> buffers;
    std::vector<int> counts(from.size());
    for (int i = 0; i < k; ++i)
        counts[static_cast<std::size_t>(i)] =
            map.neighbors(from[static_cast<std::size_t>(i)], buffers[static_cast<std::size_t>(i)]);

    auto rec = [&](auto&& self, int member) -> void {
        if (member == k) {
            fn(next);
            return;
        }
        const auto um = static_cast<std::size_t>(member);
        for (int c = 0; c < counts[um]; ++c) {
            const Cell target = buffers[um][static_cast<std::size_t>(c)];
            bool ok = true;
            for (int j = 0; j < member && ok; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                if (next[uj] == target) ok = false;  // vertex
                else if (next[uj] == from[um] && from[uj] == target) ok = false;  // swap
            }
            if (!ok) continue;
            next[um] = target;
            self(self, member + 1);
        }
    };
    rec(rec, 0);
}

std::int64_t joint_move_cost(const HeuristicTable& heur, const AgentGroup& group,
                             const std::vector<Cell>& from, const std::vector<Cell>& to) {
    std::int64_t cost = 0;
    for (std::size_t i = 0; i < from.size(); ++i)
        cost += transition_cost(heur.goal(group.members[i]), from[i], to[i]);
    return cost;
}

std::int64_t hbd_sum(const HeuristicTable& heur, const AgentGroup& group,
                     const std::vector<Cell>& locs) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < locs.size(); ++i) {
        const int d = heur.dist(group.members[i], locs[i]);
        if (d == kUnreachable) return -1;
        sum += d;
    }
    return sum;
}

// Maximum disjoint sum of positive matched residuals at a terminal, over the
// pre-filtered candidate entries (index, residual, member bitmask over group
// positions).
struct MatchCandidate {
    std::vector<std::size_t> positions;  // group positions of the entry's members
    std::vector<Cell> locations;
    std::int64_t residual = 0;
    std::uint32_t mask = 0;
};

std::int64_t best_disjoint_residual(const std::vector<MatchCandidate>& candidates,
                                    const std::vector<Cell>& terminal) {
    std::vector<const MatchCandidate*> live;
    for (const MatchCandidate& c : candidates) {
        bool match = true;
        for (std::size_t i = 0; i < c.positions.size(); ++i)
            if (terminal[c.positions[i]] != c.locations[i]) {
                match = false;
                break;
            }
        if (match) live.push_back(&c);
    }
    std::int64_t best = 0;
    auto rec = [&](auto&& self, std::size_t i, std::uint32_t used, std::int64_t sum) -> void {
        best = std::max(best, sum);
        for (std::size_t j = i; j < live.size(); ++j)
            if ((live[j]->mask & used) == 0)
                self(self, j + 1, used | live[j]->mask, sum + live[j]->residual);
    };
    rec(rec, 0, 0, 0);
    return best;
}

}  // namespace

std::optional<FullResult> joint_optimal_cost(const GridMap& map, const HeuristicTable& heur,
                                             const AgentGroup& group,
                                             const std::vector<Cell>& start_locs,
                                             const Limits& limits) {
    check_limits(map, group, limits);
    std::vector<Cell> goals;
    goals.reserve(group.members.size());
    for (int agent : group.members) goals.push_back(heur.goal(agent));

    struct NodeInfo {
        std::int64_t g;
        std::uint64_t parent;
        bool closed;
    };
    std::unordered_map<std::uint64_t, NodeInfo> table;

    struct QueueItem {
        std::int64_t f;
        std::int64_t g;
        std::uint64_t key;
        bool operator>(const QueueItem& o) const {
            if (f != o.f) return f > o.f;
            if (g != o.g) return g < o.g;  // prefer larger g
            return key > o.key;
        }
    };
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<QueueItem>> open;

    const std::int64_t h0 = hbd_sum(heur, group, start_locs);
    if (h0 < 0) return std::nullopt;
    const std::uint64_t start_key = pack(start_locs);
    table[start_key] = {0, start_key, false};
    open.push({h0, 0, start_key});

    auto unpack = [&](std::uint64_t key) {
        std::vector<Cell> locs(group.members.size());
        for (std::size_t i = locs.size(); i-- > 0;) {
            locs[i] = static_cast<Cell>(key & 0xFFFF);
            key >>= 16;
        }
        return locs;
    };

    std::size_t expansions = 0;
    while (!open.empty()) {
        const QueueItem item = open.top();
        open.pop();
        auto& info = table[item.key];
        if (info.closed || item.g > info.g) continue;
        info.closed = true;
        const std::vector<Cell> locs = unpack(item.key);
        if (locs == goals) {
            FullResult result;
            result.cost = item.g;
            std::uint64_t key = item.key;
            while (true) {
                result.path.push_back(unpack(key));
                const std::uint64_t parent = table[key].parent;
                if (parent == key) break;
                key = parent;
            }
            std::reverse(result.path.begin(), result.path.end());
            return result;
        }
        if (++expansions > limits.max_expansions)
            throw Refused("oracle exceeded expansion limit");
        for_each_joint_move(map, locs, [&](const std::vector<Cell>& next) {
            const std::int64_t ng = item.g + joint_move_cost(heur, group, locs, next);
            const std::int64_t nh = hbd_sum(heur, group, next);
            if (nh < 0) return;
            const std::uint64_t nkey = pack(next);
            auto it = table.find(nkey);
            if (it == table.end() || ng < it->second.g) {
                table[nkey] = {ng, item.key, false};
                open.push({ng + nh, ng, nkey});
            }
        });
    }
    return std::nullopt;
}

WindowedOptima windowed_optima(const GridMap& map, const HeuristicTable& heur,
                               const AgentGroup& group, const std::vector<Cell>& start_locs,
                               int window, SuboptFactor w, const PenaltyStore* store,
                               const Limits& limits) {
    check_limits(map, group, limits);

    std::vector<MatchCandidate> candidates;
    if (store) {
        for (const PenaltyEntry& entry : store->entries()) {
            const Scaled r = store->residual(entry);
            if (r <= Scaled{0}) continue;
            if (!entry.group.subset_of(group)) continue;
            MatchCandidate c;
            c.residual = r.v;
            c.locations = entry.locations;
            for (int agent : entry.group.members) {
                const auto it =
                    std::lower_bound(group.members.begin(), group.members.end(), agent);
                const auto pos = static_cast<std::size_t>(it - group.members.begin());
                c.positions.push_back(pos);
                c.mask |= 1u << pos;
            }
            candidates.push_back(std::move(c));
        }
    }

    // Layered exhaustive search: every reachable collision-free joint state
    // per timestep with its minimal prefix cost.
    std::unordered_map<std::uint64_t, std::int64_t> layer;
    layer[pack(start_locs)] = 0;
    std::unordered_map<std::uint64_t, std::vector<Cell>> cells;
    cells[pack(start_locs)] = start_locs;

    std::size_t expanded = 0;
    for (int t = 0; t < window; ++t) {
        std::unordered_map<std::uint64_t, std::int64_t> next_layer;
        std::unordered_map<std::uint64_t, std::vector<Cell>> next_cells;
        for (const auto& [key, g] : layer) {
            const std::vector<Cell>& locs = cells[key];
            if (++expanded > limits.max_expansions)
                throw Refused("windowed oracle exceeded expansion limit");
            for_each_joint_move(map, locs, [&](const std::vector<Cell>& next) {
                const std::int64_t ng = g + joint_move_cost(heur, group, locs, next);
                const std::uint64_t nkey = pack(next);
                auto it = next_layer.find(nkey);
                if (it == next_layer.end()) {
                    next_layer.emplace(nkey, ng);
                    next_cells.emplace(nkey, next);
                } else if (ng < it->second) {
                    it->second = ng;
                }
            });
        }
        layer = std::move(next_layer);
        cells = std::move(next_cells);
    }

    WindowedOptima result;
    bool first = true;
    for (const auto& [key, g] : layer) {
        const std::vector<Cell>& locs = cells[key];
        const std::int64_t h = hbd_sum(heur, group, locs);
        if (h < 0) continue;
        const std::int64_t physical = g + h;
        const std::int64_t residual = best_disjoint_residual(candidates, locs);
        const Scaled full = w.scale(g) + w.scale_weighted(h) + Scaled{residual};
        if (first) {
            result.physical = physical;
            result.full = full;
            first = false;
        } else {
            result.physical = std::min(result.physical, physical);
            result.full = std::min(result.full, full);
        }
    }
    if (first) throw Refused("windowed oracle found no terminal states");
    return result;
}

WBoundReport verify_group_w_bound(const GroupSolution& solution, const WindowedOptima& optima,
                                  SuboptFactor w) {
    WBoundReport report;
    report.objective = solution.objective;
    report.oracle = optima;
    // objective <= w * full  <=>  den * objective <= num * full, both scaled.
    report.pass = w.den * solution.objective.v <= w.num * optima.full.v;
    return report;
}

AdmissibilityReport verify_penalty_admissibility(const PenaltyStore& store, const GridMap& map,
                                                 const HeuristicTable& heur,
                                                 const Limits& limits) {
    AdmissibilityReport report;
    const SuboptFactor w = store.w();
    for (int idx = 0; idx < store.num_entries(); ++idx) {
        const PenaltyEntry& entry = store.entry(idx);
        const auto optimal = joint_optimal_cost(map, heur, entry.group, entry.locations, limits);
        ++report.checked;
        if (!optimal) continue;  // no joint solution: h* is infinite
        if (entry.h_value > w.scale_weighted(optimal->cost)) report.violations.push_back(idx);
    }
    return report;
}

GapDemo check_global_vs_group_gap(std::int64_t opt_a, std::int64_t opt_b, std::int64_t cost_a,
                                  std::int64_t cost_b, SuboptFactor w) {
    GapDemo demo;
    demo.global_within = w.den * (cost_a + cost_b) <= w.num * (opt_a + opt_b);
    demo.group_a_within = w.den * cost_a <= w.num * opt_a;
    demo.group_b_within = w.den * cost_b <= w.num * opt_b;
    return demo;
}

}  // namespace oracle
}  // namespace mapf
