#include <doctest.h>

#include <sstream>

#include "mapf/bench.hpp"
#include "mapf/oracle.hpp"
#include "test_util.hpp"

using namespace mapf;

TEST_CASE("deadlock suite has the documented seven instances, all solvable") {
    auto suite = generate_deadlock_suite(0);
    REQUIRE(suite.size() == 7);
    int corridors = 0;
    for (const auto& named : suite) {
        // Individually solvable by construction: Instance::from_parts already
        // rejected unreachable tasks, re-assert reachability explicitly.
        for (const AgentTask& task : named.instance.tasks)
            CHECK(named.instance.heur.dist(task.agent_id, task.start) != kUnreachable);
        if (named.name.rfind("corridor-", 0) == 0) {
            ++corridors;
            CHECK(named.instance.tasks.size() == 2);
            // Swapped ends.
            CHECK(named.instance.tasks[0].start == named.instance.tasks[1].goal);
            CHECK(named.instance.tasks[0].goal == named.instance.tasks[1].start);
        }
        // Jointly solvable: the whole team has a collision-free full plan.
        AgentGroup all;
        for (const AgentTask& task : named.instance.tasks)
            all.members.push_back(task.agent_id);
        Configuration starts;
        for (const AgentTask& task : named.instance.tasks) starts.push_back(task.start);
        auto full = oracle::joint_optimal_cost(named.instance.map, named.instance.heur, all,
                                               starts);
        CHECK(full.has_value());
    }
    CHECK(corridors == 5);
}

TEST_CASE("cartesian product yields one row per combination") {
    auto suite = generate_deadlock_suite(0);
    std::vector<NamedInstance> one;
    one.push_back(std::move(suite[0]));
    ExperimentConfig config;
    config.solvers = {SolverKind::Dag, SolverKind::EcbsBaseline};
    config.windows = {1, 2};
    config.subopts = {SuboptFactor::make(1, 1), SuboptFactor::make(2, 1)};
    config.timeout_s = 10.0;
    config.iteration_cap = 50;
    config.log_timing = false;
    auto rows = run_instances(one, config, nullptr);
    CHECK(rows.size() == 8);
}

TEST_CASE("solved single-agent episode reports avg cost per agent = start distance") {
    GridMap map = test::grid({"....."});
    std::vector<AgentTask> tasks = {{0, map.cell(0, 0), map.cell(0, 4)}};
    std::vector<NamedInstance> one;
    one.push_back({"line", Instance::from_parts(map, tasks)});
    ExperimentConfig config;
    config.solvers = {SolverKind::Dag};
    config.windows = {2};
    config.subopts = {SuboptFactor::make(1, 1)};
    config.log_timing = false;
    std::ostringstream csv;
    auto rows = run_instances(one, config, &csv);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == EpisodeStatus::Solved);
    CHECK(rows[0].sum_of_cost == 4);
    CHECK(csv.str().find("4.000000") != std::string::npos);
}

TEST_CASE("failures leave the average-cost column empty") {
    BenchRow row;
    row.map_name = "m";
    row.scen_name = "s";
    row.agents = 2;
    row.status = EpisodeStatus::Timeout;
    row.sum_of_cost = 11;
    const std::string line = to_csv(row, false);
    // column after status/iterations/sum_of_cost is empty
    CHECK(line.find("timeout,0,11,,") != std::string::npos);
}

TEST_CASE("reruns of an identical config are byte-identical with timing off") {
    auto suite = generate_deadlock_suite(0);
    std::vector<NamedInstance> subset;
    subset.push_back(std::move(suite[0]));
    subset.push_back(std::move(suite[5]));
    ExperimentConfig config;
    config.solvers = {SolverKind::Dag};
    config.windows = {1, 2};
    config.subopts = {SuboptFactor::make(1, 1), SuboptFactor::make(3, 2)};
    config.timeout_s = 30.0;
    config.log_timing = false;
    std::ostringstream first, second;
    run_instances(subset, config, &first);
    run_instances(subset, config, &second);
    CHECK(first.str() == second.str());
    CHECK(first.str().find("solved") != std::string::npos);
}

TEST_CASE("threaded and sequential runs produce identical rows") {
    auto suite = generate_deadlock_suite(0);
    std::vector<NamedInstance> subset;
    subset.push_back(std::move(suite[0]));
    subset.push_back(std::move(suite[1]));
    ExperimentConfig config;
    config.solvers = {SolverKind::Dag};
    config.windows = {1};
    config.subopts = {SuboptFactor::make(1, 1)};
    config.timeout_s = 30.0;
    config.log_timing = false;
    std::ostringstream seq, par;
    config.threads = 1;
    run_instances(subset, config, &seq);
    config.threads = 4;
    run_instances(subset, config, &par);
    CHECK(seq.str() == par.str());
}
