#include "mapf/grid.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

namespace mapf {

namespace {

// Strips a trailing '\r' so CRLF files parse the same as LF ones.
std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool is_passable_char(char c) { return c == '.' || c == 'G'; }
bool is_blocked_char(char c) { return c == '@' || c == 'O' || c == 'T' || c == 'W'; }

}  // namespace

int GridMap::blocked_count() const {
    return static_cast<int>(std::count(blocked.begin(), blocked.end(), std::uint8_t{1}));
}

int GridMap::neighbors(Cell c, std::array<Cell, 5>& out) const {
    const int r = row_of(c);
    const int co = col_of(c);
    int n = 0;
    out[n++] = c;  // wait
    if (r > 0 && passable(c - width)) out[n++] = c - width;
    if (r + 1 < height && passable(c + width)) out[n++] = c + width;
    if (co > 0 && passable(c - 1)) out[n++] = c - 1;
    if (co + 1 < width && passable(c + 1)) out[n++] = c + 1;
    return n;
}

std::vector<Cell> neighbors(const GridMap& map, Cell c) {
    std::array<Cell, 5> buf;
    const int n = map.neighbors(c, buf);
    return std::vector<Cell>(buf.begin(), buf.begin() + n);
}

GridMap parse_map(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw ParseError("unexpected end of map file", lineno);
        ++lineno;
        return chomp(line);
    };

    std::string type_line = next_line();
    if (type_line.rfind("type", 0) != 0)
        throw ParseError("expected 'type ...' header, got '" + type_line + "'", lineno);

    int height = -1, width = -1;
    for (int i = 0; i < 2; ++i) {
        std::string l = next_line();
        std::istringstream ss(l);
        std::string key;
        int value = -1;
        if (!(ss >> key >> value) || value <= 0)
            throw ParseError("bad map dimension line '" + l + "'", lineno);
        if (key == "height")
            height = value;
        else if (key == "width")
            width = value;
        else
            throw ParseError("unknown header key '" + key + "'", lineno);
    }
    if (height <= 0 || width <= 0) throw ParseError("missing height/width header", lineno);

    if (next_line() != "map") throw ParseError("expected 'map' line", lineno);

    GridMap map;
    map.width = width;
    map.height = height;
    map.blocked.assign(static_cast<std::size_t>(width) * height, 0);
    for (int r = 0; r < height; ++r) {
        std::string row = next_line();
        if (static_cast<int>(row.size()) != width)
            throw ParseError("row length " + std::to_string(row.size()) + " does not match width " +
                                 std::to_string(width),
                             lineno);
        for (int c = 0; c < width; ++c) {
            const char ch = row[static_cast<std::size_t>(c)];
            if (is_passable_char(ch))
                map.blocked[static_cast<std::size_t>(map.cell(r, c))] = 0;
            else if (is_blocked_char(ch))
                map.blocked[static_cast<std::size_t>(map.cell(r, c))] = 1;
            else
                throw ParseError(std::string("unknown map character '") + ch + "'", lineno);
        }
    }
    return map;
}

GridMap parse_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file: " + path);
    return parse_map(in);
}

std::string serialize_map(const GridMap& map) {
    std::ostringstream out;
    out << "type octile\n";
    out << "height " << map.height << "\n";
    out << "width " << map.width << "\n";
    out << "map\n";
    for (int r = 0; r < map.height; ++r) {
        for (int c = 0; c < map.width; ++c)
            out << (map.is_blocked(map.cell(r, c)) ? '@' : '.');
        out << "\n";
    }
    return out.str();
}

DistanceField backward_dijkstra(const GridMap& map, Cell goal) {
    if (map.is_blocked(goal)) throw std::invalid_argument("backward_dijkstra: blocked goal");
    DistanceField field;
    field.goal = goal;
    field.dist.assign(static_cast<std::size_t>(map.size()), kUnreachable);
    // Unit edge costs, so Dijkstra reduces to BFS. The wait move is excluded
    // from distance expansion.
    std::deque<Cell> queue;
    field.dist[static_cast<std::size_t>(goal)] = 0;
    queue.push_back(goal);
    std::array<Cell, 5> buf;
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        const int d = field.dist[static_cast<std::size_t>(cur)];
        const int n = map.neighbors(cur, buf);
        for (int i = 1; i < n; ++i) {  // skip wait at index 0
            const Cell next = buf[static_cast<std::size_t>(i)];
            if (field.dist[static_cast<std::size_t>(next)] == kUnreachable) {
                field.dist[static_cast<std::size_t>(next)] = d + 1;
                queue.push_back(next);
            }
        }
    }
    return field;
}

std::vector<ScenarioRow> parse_scenario(std::istream& in, const GridMap& map, int num_agents) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty scenario file", lineno);
    ++lineno;
    line = chomp(line);
    if (line.rfind("version", 0) != 0)
        throw ParseError("expected 'version ...' header, got '" + line + "'", lineno);

    std::vector<ScenarioRow> rows;
    while (static_cast<int>(rows.size()) < num_agents && std::getline(in, line)) {
        ++lineno;
        line = chomp(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        int bucket = 0, w = 0, h = 0, scol = 0, srow = 0, gcol = 0, grow = 0;
        std::string map_name;
        double declared = 0.0;
        if (!(ss >> bucket >> map_name >> w >> h >> scol >> srow >> gcol >> grow >> declared))
            throw ParseError("malformed scenario row '" + line + "'", lineno);
        if (w != map.width || h != map.height)
            throw ParseError("scenario map size " + std::to_string(w) + "x" + std::to_string(h) +
                                 " does not match map " + std::to_string(map.width) + "x" +
                                 std::to_string(map.height),
                             lineno);
        if (!map.in_bounds(srow, scol) || !map.in_bounds(grow, gcol))
            throw ParseError("scenario start/goal out of bounds", lineno);
        const Cell start = map.cell(srow, scol);
        const Cell goal = map.cell(grow, gcol);
        if (map.is_blocked(start)) throw ParseError("scenario start on blocked cell", lineno);
        if (map.is_blocked(goal)) throw ParseError("scenario goal on blocked cell", lineno);
        ScenarioRow row;
        row.task = AgentTask{static_cast<int>(rows.size()), start, goal};
        row.declared_optimal = declared;
        rows.push_back(row);
    }
    if (static_cast<int>(rows.size()) < num_agents)
        throw ParseError("scenario has only " + std::to_string(rows.size()) + " rows, requested " +
                             std::to_string(num_agents),
                         lineno);
    return rows;
}

std::vector<ScenarioRow> parse_scenario_file(const std::string& path, const GridMap& map,
                                             int num_agents) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    return parse_scenario(in, map, num_agents);
}

HeuristicTable HeuristicTable::build(const GridMap& map, const std::vector<AgentTask>& tasks) {
    HeuristicTable table;
    table.fields.reserve(tasks.size());
    for (const AgentTask& task : tasks) table.fields.push_back(backward_dijkstra(map, task.goal));
    return table;
}

Instance Instance::from_parts(GridMap map, std::vector<AgentTask> tasks) {
    Instance inst;
    inst.map = std::move(map);
    inst.tasks = std::move(tasks);
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        if (inst.tasks[i].agent_id != static_cast<int>(i))
            throw std::invalid_argument("agent ids must be contiguous from 0");
        if (inst.map.is_blocked(inst.tasks[i].start) || inst.map.is_blocked(inst.tasks[i].goal))
            throw std::invalid_argument("task " + std::to_string(i) + " on blocked cell");
    }
    inst.heur = HeuristicTable::build(inst.map, inst.tasks);
    for (const AgentTask& task : inst.tasks) {
        if (!inst.heur.fields[static_cast<std::size_t>(task.agent_id)].reachable(task.start))
            throw std::invalid_argument("agent " + std::to_string(task.agent_id) +
                                        " cannot reach its goal");
    }
    return inst;
}

Instance Instance::load(const std::string& map_path, const std::string& scen_path, int num_agents) {
    GridMap map = parse_map_file(map_path);
    std::vector<ScenarioRow> rows = parse_scenario_file(scen_path, map, num_agents);
    std::vector<AgentTask> tasks;
    tasks.reserve(rows.size());
    for (const ScenarioRow& r : rows) tasks.push_back(r.task);
    Instance inst = from_parts(std::move(map), std::move(tasks));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int bd = inst.heur.dist(static_cast<int>(i), rows[i].task.start);
        if (static_cast<double>(bd) != rows[i].declared_optimal) {
            inst.load_notes.push_back("agent " + std::to_string(i) + ": declared optimal " +
                                      std::to_string(rows[i].declared_optimal) +
                                      " differs from cardinal-move distance " + std::to_string(bd));
        }
    }
    return inst;
}

}  // namespace mapf
