#include "mapf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace mapf {

namespace {

std::string base_name(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

std::string format_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", s);
    return buf;
}

std::string hist_string(const std::vector<int>& hist) {
    std::ostringstream out;
    bool first = true;
    for (std::size_t s = 0; s < hist.size(); ++s) {
        if (hist[s] == 0) continue;
        if (!first) out << ";";
        out << (s + 1) << ":" << hist[s];
        first = false;
    }
    return out.str();
}

struct EpisodeSpec {
    const NamedInstance* instance;
    int agents;
    SolverKind solver;
    int window;
    SuboptFactor w;
    int row_index;
};

BenchRow run_one(const EpisodeSpec& spec, const ExperimentConfig& config,
                 const std::string& map_name) {
    BenchRow row;
    row.map_name = map_name;
    row.scen_name = spec.instance->name;
    row.agents = spec.agents;
    row.solver = spec.solver;
    row.window = spec.window;
    row.w = spec.w;

    std::ofstream episode_log;
    std::ofstream penalties_log;
    if (!config.trace_dir.empty()) {
        char tag[128];
        std::snprintf(tag, sizeof(tag), "row%04d-%s-n%d-%s-w%d-s%s", spec.row_index,
                      row.scen_name.c_str(), spec.agents, to_string(spec.solver), spec.window,
                      spec.w.str().c_str());
        const std::string stem = config.trace_dir + "/" + tag;
        episode_log.open(stem + ".episode.jsonl");
        penalties_log.open(stem + ".penalties.jsonl");
    }

    try {
        const Instance& inst = spec.instance->instance;
        PenaltyStore store(inst.heur, spec.w);
        EpisodeOptions options;
        options.solver = spec.solver;
        options.window = spec.window;
        options.w = spec.w;
        options.timeout_s = config.timeout_s;
        options.iteration_cap = config.iteration_cap;
        options.log_timing = config.log_timing;
        options.episode_log = episode_log.is_open() ? &episode_log : nullptr;
        EpisodeResult result = run_episode(
            inst, spec.solver == SolverKind::Dag ? &store : nullptr, options);
        row.status = result.status;
        row.iterations = result.iterations;
        row.sum_of_cost = result.total_cost;
        row.max_iter_plan_s = result.max_iter_seconds;
        row.total_plan_s = result.total_plan_seconds;
        row.merges = result.merges_total;
        for (int size : result.final_group_sizes) {
            if (static_cast<std::size_t>(size) > row.group_size_hist.size())
                row.group_size_hist.resize(static_cast<std::size_t>(size), 0);
            ++row.group_size_hist[static_cast<std::size_t>(size) - 1];
        }
        if (penalties_log.is_open()) store.dump_jsonl(penalties_log);
    } catch (const std::exception& e) {
        row.error = e.what();
        row.status = EpisodeStatus::PlannerFailure;
    }
    return row;
}

}  // namespace

std::string csv_header() {
    return "map,scen,agents,solver,window,subopt,status,iterations,sum_of_cost,"
           "avg_cost_per_agent,max_iter_plan_s,total_plan_s,merges,group_size_hist,error";
}

std::string to_csv(const BenchRow& row, bool log_timing) {
    std::ostringstream out;
    out << row.map_name << "," << row.scen_name << "," << row.agents << ","
        << to_string(row.solver) << "," << row.window << "," << row.w.str() << ","
        << to_string(row.status) << "," << row.iterations << "," << row.sum_of_cost << ",";
    if (row.status == EpisodeStatus::Solved && row.agents > 0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f",
                      static_cast<double>(row.sum_of_cost) / row.agents);
        out << buf;
    }
    out << ",";
    if (log_timing) out << format_seconds(row.max_iter_plan_s);
    out << ",";
    if (log_timing) out << format_seconds(row.total_plan_s);
    out << "," << row.merges << "," << hist_string(row.group_size_hist) << "," << row.error;
    return out.str();
}

std::vector<BenchRow> run_instances(const std::vector<NamedInstance>& instances,
                                    const ExperimentConfig& config, std::ostream* csv_out) {
    // In-memory instances carry their own agent count; only solver, window,
    // and w vary here.
    std::vector<EpisodeSpec> specs;
    int row_index = 0;
    for (const NamedInstance& inst : instances)
        for (SolverKind solver : config.solvers)
            for (int window : config.windows)
                for (const SuboptFactor& w : config.subopts)
                    specs.push_back({&inst, static_cast<int>(inst.instance.tasks.size()), solver,
                                     window, w, row_index++});

    const std::string map_name =
        config.map_path.empty() ? "builtin" : base_name(config.map_path);
    std::vector<BenchRow> rows(specs.size());
    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < specs.size(); ++i)
            rows[i] = run_one(specs[i], config, map_name);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= specs.size()) return;
                    rows[i] = run_one(specs[i], config, map_name);
                }
            });
        for (std::thread& t : pool) t.join();
    }

    if (csv_out) {
        *csv_out << csv_header() << "\n";
        for (const BenchRow& row : rows) *csv_out << to_csv(row, config.log_timing) << "\n";
    }
    return rows;
}

std::vector<BenchRow> run_benchmark(const ExperimentConfig& config, std::ostream* csv_out) {
    // Each (scen, N) pair loads its own instance; load errors become rows.
    std::vector<NamedInstance> instances;
    std::vector<BenchRow> load_failures;
    for (const std::string& scen : config.scen_paths) {
        for (int agents : config.agent_counts) {
            NamedInstance named;
            named.name = base_name(scen) + "#" + std::to_string(agents);
            try {
                named.instance = Instance::load(config.map_path, scen, agents);
            } catch (const std::exception& e) {
                BenchRow row;
                row.map_name = base_name(config.map_path);
                row.scen_name = named.name;
                row.agents = agents;
                row.error = e.what();
                load_failures.push_back(row);
                continue;
            }
            instances.push_back(std::move(named));
        }
    }

    std::vector<EpisodeSpec> specs;
    int row_index = 0;
    for (const NamedInstance& inst : instances)
        for (SolverKind solver : config.solvers)
            for (int window : config.windows)
                for (const SuboptFactor& w : config.subopts)
                    specs.push_back({&inst, static_cast<int>(inst.instance.tasks.size()), solver,
                                     window, w, row_index++});

    const std::string map_name = base_name(config.map_path);
    std::vector<BenchRow> rows(specs.size());
    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < specs.size(); ++i)
            rows[i] = run_one(specs[i], config, map_name);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= specs.size()) return;
                    rows[i] = run_one(specs[i], config, map_name);
                }
            });
        for (std::thread& t : pool) t.join();
    }

    for (BenchRow& row : load_failures) rows.push_back(std::move(row));
    if (csv_out) {
        *csv_out << csv_header() << "\n";
        for (const BenchRow& row : rows) *csv_out << to_csv(row, config.log_timing) << "\n";
    }
    return rows;
}

namespace {

GridMap grid_from_rows(const std::vector<std::string>& rows) {
    GridMap map;
    map.height = static_cast<int>(rows.size());
    map.width = static_cast<int>(rows[0].size());
    map.blocked.assign(static_cast<std::size_t>(map.size()), 0);
    for (int r = 0; r < map.height; ++r)
        for (int c = 0; c < map.width; ++c)
            map.blocked[static_cast<std::size_t>(map.cell(r, c))] =
                rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] == '.' ? 0 : 1;
    return map;
}

}  // namespace

std::vector<NamedInstance> generate_deadlock_suite(std::uint64_t seed) {
    (void)seed;  // the family is fixed; the parameter is kept for the interface
    std::vector<NamedInstance> suite;

    // Pocket corridors: two agents swap ends of a corridor whose only passing
    // place is a single pocket below the middle column.
    for (int k = 3; k <= 7; ++k) {
        std::string top(static_cast<std::size_t>(k), '.');
        std::string bottom(static_cast<std::size_t>(k), '@');
        bottom[static_cast<std::size_t>(k / 2)] = '.';
        GridMap map = grid_from_rows({top, bottom});
        std::vector<AgentTask> tasks = {
            {0, map.cell(0, 0), map.cell(0, k - 1)},
            {1, map.cell(0, k - 1), map.cell(0, 0)},
        };
        suite.push_back({"corridor-" + std::to_string(k),
                         Instance::from_parts(std::move(map), std::move(tasks))});
    }

    // Junction rotation: three agents cycle around a plus-shaped junction;
    // the free south arm is the only parking spot.
    {
        GridMap map = grid_from_rows({"@.@", "...", "@.@"});
        std::vector<AgentTask> tasks = {
            {0, map.cell(0, 1), map.cell(1, 0)},
            {1, map.cell(1, 0), map.cell(1, 2)},
            {2, map.cell(1, 2), map.cell(0, 1)},
        };
        suite.push_back({"junction-rotation",
                         Instance::from_parts(std::move(map), std::move(tasks))});
    }

    // Square swap: four agents on a ring exchange diagonally opposite corners.
    {
        GridMap map = grid_from_rows({"...", ".@.", "..."});
        std::vector<AgentTask> tasks = {
            {0, map.cell(0, 0), map.cell(2, 2)},
            {1, map.cell(0, 2), map.cell(2, 0)},
            {2, map.cell(2, 2), map.cell(0, 0)},
            {3, map.cell(2, 0), map.cell(0, 2)},
        };
        suite.push_back({"square-swap", Instance::from_parts(std::move(map), std::move(tasks))});
    }

    return suite;
}

}  // namespace mapf
