#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "heatlab/criteria.hpp"
#include "heatlab/solver.hpp"

namespace heatlab {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value scenario file with dotted section keys, e.g.
///   problem.f = s^2
///   grid.n = 65
///   sim.t_end = 10
struct Scenario {
    ProblemSpec problem;
    int grid_n = 65;
    SimConfig sim;

    bool m_series_enabled = false;
    std::optional<Expr> analysis_h;
    double analysis_sigma = 0.0;      // 0: half of min u0
    double analysis_t0 = 0.0;
    std::optional<Expr> comparison_low, comparison_high;   // alternative u0 data
    std::optional<double> supersolution_a;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Applies a single "section.key = value" override (sweep substitution).
void apply_scenario_key(Scenario& sc, const std::string& key, const std::string& value);

/// Fixed-format floating-point for CSV bodies (byte-stable across runs).
std::string csv_number(double v);

} // namespace heatlab
