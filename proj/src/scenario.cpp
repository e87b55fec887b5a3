#include "heatlab/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace heatlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        return x;
    } catch (const std::exception&) {
        throw ScenarioError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        return x;
    } catch (const std::exception&) {
        throw ScenarioError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ScenarioError("key '" + key + "': expected a boolean, got '" + v + "'");
}

Expr to_expr(const std::string& key, const std::string& v) {
    try {
        return parse_expr(v);
    } catch (const ParseError& e) {
        throw ScenarioError("key '" + key + "': " + e.what() + " at offset " +
                            std::to_string(e.offset));
    }
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

} // namespace

void apply_scenario_key(Scenario& sc, const std::string& key, const std::string& value) {
    if (key == "problem.L") sc.problem.L = to_double(key, value);
    else if (key == "problem.f") sc.problem.f = to_expr(key, value);
    else if (key == "problem.g") sc.problem.g = to_expr(key, value);
    else if (key == "problem.alpha") sc.problem.alpha = to_expr(key, value);
    else if (key == "problem.beta") sc.problem.beta = to_expr(key, value);
    else if (key == "problem.u0") sc.problem.u0 = to_expr(key, value);
    else if (key == "problem.interior_offset") sc.problem.interior_offset = to_expr(key, value);
    else if (key == "problem.boundary_offset") sc.problem.boundary_offset = to_expr(key, value);
    else if (key == "grid.n") sc.grid_n = to_int(key, value);
    else if (key == "sim.t_end") sc.sim.t_end = to_double(key, value);
    else if (key == "sim.dt_init") sc.sim.dt_init = to_double(key, value);
    else if (key == "sim.safety") sc.sim.safety = to_double(key, value);
    else if (key == "sim.abs_tol") sc.sim.abs_tol = to_double(key, value);
    else if (key == "sim.rel_tol") sc.sim.rel_tol = to_double(key, value);
    else if (key == "sim.cfl") sc.sim.cfl = to_double(key, value);
    else if (key == "sim.dt_floor") sc.sim.dt_floor = to_double(key, value);
    else if (key == "sim.record_dt") sc.sim.record_dt = to_double(key, value);
    else if (key == "sim.snapshot_times") sc.sim.snapshot_times = to_double_list(key, value);
    else if (key == "analysis.m_series") sc.m_series_enabled = to_bool(key, value);
    else if (key == "analysis.h") sc.analysis_h = to_expr(key, value);
    else if (key == "analysis.sigma") sc.analysis_sigma = to_double(key, value);
    else if (key == "analysis.t0") sc.analysis_t0 = to_double(key, value);
    else if (key == "analysis.comparison_low") sc.comparison_low = to_expr(key, value);
    else if (key == "analysis.comparison_high") sc.comparison_high = to_expr(key, value);
    else if (key == "analysis.supersolution_a") sc.supersolution_a = to_double(key, value);
    else throw ScenarioError("unknown key '" + key + "'");
}

Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    // defaults: everything off unless the scenario says otherwise
    sc.problem.f = parse_expr("0");
    sc.problem.g = parse_expr("0");
    sc.problem.alpha = parse_expr("0");
    sc.problem.beta = parse_expr("0");
    sc.problem.u0 = parse_expr("0");

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            apply_scenario_key(sc, key, value);
        } catch (const ScenarioError& e) {
            throw ScenarioError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace heatlab
