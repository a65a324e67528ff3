#include <doctest.h>

#include <random>
#include <sstream>

#include "mapf/penalty_store.hpp"
#include "test_util.hpp"

using namespace mapf;

namespace {

// One empty 1x5 corridor; agent 0 heads right, agent 1 heads left.
struct Fixture {
    GridMap map = test::grid({"....."});
    std::vector<AgentTask> tasks = {{0, map.cell(0, 0), map.cell(0, 4)},
                                    {1, map.cell(0, 4), map.cell(0, 0)},
                                    {2, map.cell(0, 2), map.cell(0, 2)}};
    HeuristicTable heur = HeuristicTable::build(map, tasks);
};

}  // namespace

TEST_CASE("group_heuristic defaults to w times the backward-Dijkstra sum") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(2, 1));
    AgentGroup g0 = AgentGroup::single(0);
    // agent 0 at distance 3 from its goal
    const Cell at = f.map.cell(0, 1);
    CHECK(store.group_heuristic(g0, std::vector<Cell>{at}) == Scaled{6});
    // agent at its goal
    CHECK(store.group_heuristic(g0, std::vector<Cell>{f.map.cell(0, 4)}) == Scaled{0});
}

TEST_CASE("group_heuristic returns the stored exact-key value") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(1, 1));
    AgentGroup g{{0, 1}};
    const std::vector<Cell> locs = {f.map.cell(0, 1), f.map.cell(0, 3)};
    // default is 3 + 3 = 6; raise to 7 via a terminal update of matching value
    store.apply_terminal_update(g, locs, locs, 0, Scaled{7});
    CHECK(store.group_heuristic(g, locs) == Scaled{7});
    // different locations still default
    const std::vector<Cell> other = {f.map.cell(0, 2), f.map.cell(0, 3)};
    CHECK(store.group_heuristic(g, other) == Scaled{5});
}

TEST_CASE("terminal update follows max semantics and never lowers") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(1, 1));
    AgentGroup g{{0}};
    const std::vector<Cell> c0 = {f.map.cell(0, 0)};  // h^BD = 4
    const std::vector<Cell> cw = {f.map.cell(0, 1)};

    // Seed h(C0) = 5 (> default 4), then try a weaker update: stays 5.
    store.apply_terminal_update(g, c0, cw, 0, Scaled{5});
    auto res = store.apply_terminal_update(g, c0, cw, 1, Scaled{3});
    CHECK(res.updated_value == Scaled{5});
    CHECK(!res.raised);

    // h(C0)=4 default, c=1, h(CW)=4 -> becomes 5.
    PenaltyStore fresh(f.heur, SuboptFactor::make(1, 1));
    auto res2 = fresh.apply_terminal_update(g, c0, cw, 1, Scaled{4});
    CHECK(res2.updated_value == Scaled{5});
    CHECK(res2.raised);
    CHECK(fresh.residual(fresh.entry(0)) == Scaled{1});
}

TEST_CASE("matched_penalties requires subset membership and exact locations") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(1, 1));
    AgentGroup pair{{1, 2}};
    const std::vector<Cell> locs = {f.map.cell(0, 3), f.map.cell(0, 2)};
    const Scaled defaulted = store.default_heuristic(pair, locs);
    store.apply_terminal_update(pair, locs, locs, 0, defaulted + Scaled{2});

    AgentGroup planning{{0, 1, 2}};
    Configuration terminal = {f.map.cell(0, 0), f.map.cell(0, 3), f.map.cell(0, 2)};
    auto matched = store.matched_penalties(planning, terminal);
    REQUIRE(matched.size() == 1);
    CHECK(store.entry(matched[0]).group == pair);

    // agent 2 elsewhere: no match
    terminal[2] = f.map.cell(0, 1);
    CHECK(store.matched_penalties(planning, terminal).empty());

    // planning group that does not contain agent 2: no match
    AgentGroup partial{{0, 1}};
    Configuration partial_terminal = {f.map.cell(0, 0), f.map.cell(0, 3), f.map.cell(0, 2)};
    CHECK(store.matched_penalties(partial, partial_terminal).empty());
}

TEST_CASE("overlapping matches keep the greedy disjoint subset") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(1, 1));
    AgentGroup g01{{0, 1}};
    AgentGroup g12{{1, 2}};
    const std::vector<Cell> locs01 = {f.map.cell(0, 1), f.map.cell(0, 3)};
    const std::vector<Cell> locs12 = {f.map.cell(0, 3), f.map.cell(0, 2)};
    store.apply_terminal_update(g01, locs01, locs01, 0,
                                store.default_heuristic(g01, locs01) + Scaled{2});
    store.apply_terminal_update(g12, locs12, locs12, 0,
                                store.default_heuristic(g12, locs12) + Scaled{5});

    AgentGroup planning{{0, 1, 2}};
    Configuration terminal = {f.map.cell(0, 1), f.map.cell(0, 3), f.map.cell(0, 2)};
    auto matched = store.matched_penalties(planning, terminal);
    REQUIRE(matched.size() == 1);
    CHECK(store.entry(matched[0]).group == g12);  // larger residual wins

    SUBCASE("ties break toward the lexicographically smaller group") {
        PenaltyStore tie(f.heur, SuboptFactor::make(1, 1));
        tie.apply_terminal_update(g01, locs01, locs01, 0,
                                  tie.default_heuristic(g01, locs01) + Scaled{2});
        tie.apply_terminal_update(g12, locs12, locs12, 0,
                                  tie.default_heuristic(g12, locs12) + Scaled{2});
        auto kept = tie.matched_penalties(planning, terminal);
        REQUIRE(kept.size() == 1);
        CHECK(tie.entry(kept[0]).group == g01);
    }

    SUBCASE("excluded agents suppress overlapping entries") {
        AgentGroup excluded{{2}};
        auto kept = store.matched_penalties(planning, terminal, &excluded);
        REQUIRE(kept.size() == 1);
        CHECK(store.entry(kept[0]).group == g01);
    }
}

TEST_CASE("intermediate updates floor the interior configurations") {
    Fixture f;
    SUBCASE("W=1 is a no-op") {
        PenaltyStore store(f.heur, SuboptFactor::make(1, 1));
        AgentGroup g{{0}};
        std::vector<std::vector<Cell>> path = {{f.map.cell(0, 0)}, {f.map.cell(0, 1)}};
        store.apply_intermediate_updates(g, path, Scaled{100});
        CHECK(store.num_entries() == 0);
    }
    SUBCASE("U=6, one move costs 1, so the t=1 floor is 5") {
        PenaltyStore store(f.heur, SuboptFactor::make(1, 1));
        AgentGroup g{{0}};
        // W=2 path 0 -> 1 -> 2; h^BD at cell 1 is 3, so an entry appears iff
        // the floor exceeds 3.
        std::vector<std::vector<Cell>> path = {{f.map.cell(0, 0)},
                                               {f.map.cell(0, 1)},
                                               {f.map.cell(0, 2)}};
        store.apply_intermediate_updates(g, path, Scaled{6});
        REQUIRE(store.num_entries() == 1);
        CHECK(store.entry(0).locations == std::vector<Cell>{f.map.cell(0, 1)});
        CHECK(store.entry(0).h_value == Scaled{5});
        CHECK(store.group_heuristic(g, std::vector<Cell>{f.map.cell(0, 1)}) == Scaled{5});
    }
}

TEST_CASE("no store operation ever decreases a stored value") {
    Fixture f;
    std::mt19937_64 rng(23);
    PenaltyStore store(f.heur, SuboptFactor::make(3, 2));
    AgentGroup g{{0, 1}};
    for (int iter = 0; iter < 300; ++iter) {
        const std::vector<Cell> locs = {
            static_cast<Cell>(rng() % static_cast<std::uint64_t>(f.map.size())),
            static_cast<Cell>(rng() % static_cast<std::uint64_t>(f.map.size()))};
        const Scaled before = store.group_heuristic(g, locs);
        const auto cost = static_cast<std::int64_t>(rng() % 4);
        const Scaled h_term{static_cast<std::int64_t>(rng() % 20)};
        store.apply_terminal_update(g, locs, locs, cost, h_term);
        CHECK(store.group_heuristic(g, locs) >= before);
    }
}

TEST_CASE("additivity: disjoint group heuristics sum with an empty store") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(3, 2));
    AgentGroup all{{0, 1, 2}};
    Configuration locs = {f.map.cell(0, 1), f.map.cell(0, 3), f.map.cell(0, 2)};
    Scaled split{0};
    for (int agent : all.members)
        split += store.group_heuristic(AgentGroup::single(agent),
                                       std::vector<Cell>{locs[static_cast<std::size_t>(agent)]});
    CHECK(store.group_heuristic(all, locs) == split);
}

TEST_CASE("dump is sorted and carries exact rationals") {
    Fixture f;
    PenaltyStore store(f.heur, SuboptFactor::make(3, 2));
    AgentGroup g1{{1}};
    AgentGroup g0{{0}};
    store.apply_terminal_update(g1, std::vector<Cell>{f.map.cell(0, 4)},
                                std::vector<Cell>{f.map.cell(0, 4)}, 0, Scaled{99});
    store.apply_terminal_update(g0, std::vector<Cell>{f.map.cell(0, 0)},
                                std::vector<Cell>{f.map.cell(0, 0)}, 0, Scaled{98});
    std::ostringstream out;
    store.dump_jsonl(out);
    const std::string text = out.str();
    CHECK(text.find("\"agents\":[0]") < text.find("\"agents\":[1]"));
    CHECK(text.find("\"h_value_den\":2") != std::string::npos);
}
