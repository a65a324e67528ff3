#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mapf/executor.hpp"
#include "mapf/grid.hpp"
#include "mapf/scaled.hpp"

namespace mapf {

struct ExperimentConfig {
    std::string map_path;
    std::vector<std::string> scen_paths;
    std::vector<int> agent_counts;
    std::vector<SolverKind> solvers;
    std::vector<int> windows;
    std::vector<SuboptFactor> subopts;
    double timeout_s = 60.0;
    std::int64_t iteration_cap = 0;  // 0 = auto
    std::uint64_t seed = 0;          // instance sampling only; solvers are deterministic
    int threads = 1;
    bool log_timing = true;
    std::string trace_dir;  // empty = no per-episode traces
};

struct BenchRow {
    std::string map_name;
    std::string scen_name;
    int agents = 0;
    SolverKind solver = SolverKind::Dag;
    int window = 1;
    SuboptFactor w;
    EpisodeStatus status = EpisodeStatus::PlannerFailure;
    std::int64_t iterations = 0;
    std::int64_t sum_of_cost = 0;
    double max_iter_plan_s = 0.0;
    double total_plan_s = 0.0;
    int merges = 0;
    std::vector<int> group_size_hist;  // hist[s] = count of final groups of size s+1
    std::string error;                 // load/run error text, row still emitted
};

std::string csv_header();
std::string to_csv(const BenchRow& row, bool log_timing);

// One row per (scen, N, solver, W, w), in that nesting order. Episodes run in
// a worker pool; rows are emitted in input order regardless of completion
// order. Solver failures are data, not errors.
std::vector<BenchRow> run_benchmark(const ExperimentConfig& config, std::ostream* csv_out);

// A named desk-scale instance for the deadlock suite and tests.
struct NamedInstance {
    std::string name;
    Instance instance;
};

// Deterministic family of instances where myopic windowed planning is known
// to cycle: pocket corridors (k = 3..7, 2 agents swapping ends), a 3-agent
// junction rotation, and a 4-agent square swap on a ring.
std::vector<NamedInstance> generate_deadlock_suite(std::uint64_t seed = 0);

// Same cartesian protocol as run_benchmark over in-memory instances.
std::vector<BenchRow> run_instances(const std::vector<NamedInstance>& instances,
                                    const ExperimentConfig& config, std::ostream* csv_out);

}  // namespace mapf
