#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "heatlab/analysis.hpp"
#include "heatlab/criteria.hpp"
#include "heatlab/kernel.hpp"
#include "heatlab/scenario.hpp"
#include "heatlab/solver.hpp"

namespace fs = std::filesystem;
using namespace heatlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitAmbiguous = 3;

void write_file(const fs::path& path, const std::string& body) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

std::string series_csv(const SimResult& res) {
    std::ostringstream os;
    os << "t,sup_norm,mass\n";
    for (std::size_t i = 0; i < res.times.size(); ++i)
        os << csv_number(res.times[i]) << ',' << csv_number(res.sup_norm[i]) << ','
           << csv_number(res.mass[i]) << '\n';
    return os.str();
}

std::string snapshot_csv(const Grid1D& grid, const Eigen::VectorXd& u) {
    std::ostringstream os;
    os << "x,u\n";
    for (int i = 0; i < grid.n; ++i)
        os << csv_number(grid.node(i)) << ',' << csv_number(u[i]) << '\n';
    return os.str();
}

std::optional<double> best_blowup_bound(const ProblemSpec& spec, Outcome outcome) {
    std::optional<double> best;
    auto consider = [&](const BlowupBound& b) {
        if (b.finite && (!best || b.T < *best)) best = b.T;
    };
    if (outcome != Outcome::BlowupBoundary) {
        try {
            consider(blowup_bound_reaction(spec));
        } catch (const PreconditionError&) {
        }
    }
    if (outcome != Outcome::BlowupReaction) {
        try {
            consider(blowup_bound_boundary(spec));
        } catch (const PreconditionError&) {
        }
    }
    return best;
}

std::string simulate_summary(const SimResult& res, const std::optional<double>& bound) {
    std::ostringstream os;
    os << "outcome=" << outcome_name(res.outcome) << "\n";
    if (res.outcome == SimOutcome::BlowupDetected) {
        os << "T_num=" << csv_number(res.t_blowup) << "±" << csv_number(res.t_blowup_err);
        if (bound) {
            bool pass = res.t_blowup <= *bound + res.t_blowup_err;
            os << ", T_b=" << csv_number(*bound) << ", T_num <= T_b: " << (pass ? "PASS" : "FAIL");
        }
        os << "\n";
    } else {
        os << "t=" << csv_number(res.t_final) << " sup=" << csv_number(res.sup_norm.back())
           << "\n";
        if (bound) os << "T_b=" << csv_number(*bound) << " (not reached)\n";
    }
    return os.str();
}

int report_input_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
}

bool validate_or_report(const ProblemSpec& spec) {
    auto rep = validate(spec);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!rep.ok)
        for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
    return rep.ok;
}

int cmd_classify(const std::string& scen_path, const std::string& out_dir) {
    Scenario sc = load_scenario(scen_path);
    if (!validate_or_report(sc.problem)) return kExitInput;
    Classification cls = classify(sc.problem);
    std::string text = to_text(cls);
    std::cout << text;
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "classification.txt", text);
    return kExitOk;
}

int cmd_simulate(const std::string& scen_path, const std::string& out_dir) {
    Scenario sc = load_scenario(scen_path);
    if (!validate_or_report(sc.problem)) return kExitInput;
    Grid1D grid = Grid1D::uniform(sc.problem.L, sc.grid_n);
    SimResult res = run(sc.problem, grid, sc.sim);

    std::optional<double> bound;
    try {
        bound = best_blowup_bound(sc.problem, classify(sc.problem).outcome);
    } catch (const PreconditionError&) {
    }
    std::string summary = simulate_summary(res, bound);
    std::cout << summary;

    if (!out_dir.empty()) {
        fs::path dir(out_dir);
        write_file(dir / "series.csv", series_csv(res));
        for (const auto& [t, u] : res.snapshots)
            write_file(dir / ("snapshot_" + csv_number(t) + ".csv"), snapshot_csv(grid, u));
        write_file(dir / "summary.txt", summary);
    }
    if (res.outcome == SimOutcome::StepFloorHit) return kExitAmbiguous;
    return kExitOk;
}

int cmd_verify_kernel(double L, double eps, const std::string& out_dir) {
    KernelSpec ks{L, 1e-12};
    auto rep = verify_properties(ks, eps);
    std::string text = to_text(rep);
    std::cout << text;
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "kernel_report.txt", text);
    return kExitOk;
}

int cmd_analyze(const std::string& scen_path, const std::string& out_dir) {
    Scenario sc = load_scenario(scen_path);
    if (!validate_or_report(sc.problem)) return kExitInput;
    Grid1D grid = Grid1D::uniform(sc.problem.L, sc.grid_n);
    std::ostringstream report;

    if (sc.m_series_enabled) {
        Expr h = sc.analysis_h ? *sc.analysis_h : sc.problem.g;
        double u0min = min_on_interval(sc.problem.u0, sc.problem.L);
        double sigma = sc.analysis_sigma > 0 ? sc.analysis_sigma : 0.5 * u0min;
        AuxiliaryProblem aux = make_boundary_aux(sc.problem, h, sigma);
        SimConfig cfg = sc.sim;
        if (cfg.record_dt <= 0) cfg.record_dt = cfg.t_end / 400.0;
        SimResult aux_run = run(aux.spec, grid, cfg);
        MSeries ms = m_series(aux_run, grid, h, sigma, aux.t0);
        auto ineq = check_m_inequality(ms, sc.problem.beta, aux.xi, aux.gamma, sigma, h,
                                       sc.problem.L);
        report << "m_series: points=" << ms.times.size()
               << " m_first=" << (ms.values.empty() ? 0.0 : ms.values.front())
               << " m_last=" << (ms.values.empty() ? 0.0 : ms.values.back())
               << " max_violation=" << ineq.max_violation << "\n";
        if (!out_dir.empty()) {
            std::ostringstream csv;
            csv << "t,m\n";
            for (std::size_t i = 0; i < ms.times.size(); ++i)
                csv << csv_number(ms.times[i]) << ',' << csv_number(ms.values[i]) << '\n';
            write_file(fs::path(out_dir) / "m_series.csv", csv.str());
        }
    }

    if (sc.comparison_low && sc.comparison_high) {
        SimConfig cfg = sc.sim;
        if (cfg.record_dt <= 0) cfg.record_dt = cfg.t_end / 100.0;
        ProblemSpec lo = sc.problem, hi = sc.problem;
        lo.u0 = *sc.comparison_low;
        hi.u0 = *sc.comparison_high;
        auto rl = run(lo, grid, cfg);
        auto rh = run(hi, grid, cfg);
        auto cmp = comparison_check(rl, rh);
        report << "comparison: times=" << cmp.times_compared
               << " max_excess=" << cmp.max_excess << "\n";
    }

    if (sc.supersolution_a) {
        SimConfig cfg = sc.sim;
        if (cfg.record_dt <= 0) cfg.record_dt = cfg.t_end / 100.0;
        Supersolution sup = build_supersolution(sc.problem, *sc.supersolution_a, grid, cfg);
        ProblemSpec small = sc.problem;
        small.u0 = Expr::constant(sup.eps / 2.0);
        SimResult u_run = run(small, grid, cfg);
        auto dom = domination_check(sup, u_run);
        report << "supersolution: eps=" << sup.eps << " Y=" << sup.Y
               << " z_end=" << sup.z_at(cfg.t_end)
               << " domination_max_excess=" << dom.max_excess << "\n";
    }

    std::string text = report.str();
    if (text.empty()) text = "no analysis enabled in scenario\n";
    std::cout << text;
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "analysis.txt", text);
    return kExitOk;
}

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

SweepAxis parse_vary(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw ScenarioError("--vary expects key=v1;v2;..., got '" + arg + "'");
    SweepAxis ax;
    ax.key = arg.substr(0, eq);
    std::stringstream ss(arg.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) ax.values.push_back(item);
    if (ax.values.empty()) throw ScenarioError("--vary '" + arg + "' has no values");
    return ax;
}

int cmd_sweep(const std::string& scen_path, const std::vector<std::string>& vary,
              const std::string& out_dir, int workers) {
    Scenario base = load_scenario(scen_path);
    std::vector<SweepAxis> axes;
    for (const auto& v : vary) axes.push_back(parse_vary(v));
    if (axes.empty()) throw ScenarioError("sweep needs at least one --vary axis");

    std::size_t cells = 1;
    for (const auto& ax : axes) cells *= ax.values.size();

    struct Row {
        std::vector<std::string> params;
        std::string classification = "-", outcome = "-", t_num = "-", t_err = "-", t_b = "-";
        std::string status = "ok";
    };
    std::vector<Row> rows(cells);

    auto run_cell = [&](std::size_t idx) {
        Row& row = rows[idx];
        std::size_t rem = idx;
        std::vector<std::string> vals(axes.size());
        // deterministic order: last axis varies fastest
        for (std::size_t a = axes.size(); a-- > 0;) {
            vals[a] = axes[a].values[rem % axes[a].values.size()];
            rem /= axes[a].values.size();
        }
        row.params = vals;
        try {
            Scenario sc = base;
            for (std::size_t a = 0; a < axes.size(); ++a)
                apply_scenario_key(sc, axes[a].key, vals[a]);
            auto v = validate(sc.problem);
            if (!v.ok) {
                row.status = v.errors.empty() ? "invalid" : v.errors.front();
                return;
            }
            Classification cls = classify(sc.problem);
            row.classification = outcome_name(cls.outcome);
            Grid1D grid = Grid1D::uniform(sc.problem.L, sc.grid_n);
            SimResult res = run(sc.problem, grid, sc.sim);
            row.outcome = outcome_name(res.outcome);
            if (res.outcome == SimOutcome::BlowupDetected) {
                row.t_num = csv_number(res.t_blowup);
                row.t_err = csv_number(res.t_blowup_err);
            }
            if (auto b = best_blowup_bound(sc.problem, cls.outcome)) row.t_b = csv_number(*b);
        } catch (const std::exception& e) {
            row.status = e.what();
        }
    };

    if (workers <= 1) {
        for (std::size_t i = 0; i < cells; ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= cells) return;
                    run_cell(i);
                }
            });
        for (auto& th : pool) th.join();
    }

    std::ostringstream csv;
    for (const auto& ax : axes) csv << ax.key << ',';
    csv << "classification,outcome,T_num,T_err,T_b,status\n";
    for (const auto& row : rows) {
        for (const auto& p : row.params) csv << p << ',';
        csv << row.classification << ',' << row.outcome << ',' << row.t_num << ','
            << row.t_err << ',' << row.t_b << ',' << row.status << '\n';
    }
    std::cout << csv.str();
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "sweep.csv", csv.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for semilinear heat equations with "
                 "nonlinear boundary flux"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    int workers = 1;
    unsigned seed = 0;
    double kernel_L = 1.0, kernel_eps = 1e-2;
    std::vector<std::string> vary;

    app.add_option("--seed", seed, "seed for randomized property suites");

    auto* c_classify = app.add_subcommand("classify", "evaluate the blow-up / global-existence hypotheses");
    c_classify->add_option("--scenario", scenario_path)->required();
    c_classify->add_option("--out", out_dir);

    auto* c_sim = app.add_subcommand("simulate", "integrate the problem to blow-up or horizon");
    c_sim->add_option("--scenario", scenario_path)->required();
    c_sim->add_option("--out", out_dir);

    auto* c_kernel = app.add_subcommand("verify-kernel", "measure the heat-kernel bounds");
    c_kernel->add_option("--L", kernel_L);
    c_kernel->add_option("--eps", kernel_eps);
    c_kernel->add_option("--out", out_dir);

    auto* c_analyze = app.add_subcommand("analyze",
                                         "m-series / comparison / supersolution checks");
    c_analyze->add_option("--scenario", scenario_path)->required();
    c_analyze->add_option("--out", out_dir);

    auto* c_sweep = app.add_subcommand("sweep", "parameter sweep over a scenario template");
    c_sweep->add_option("--scenario", scenario_path)->required();
    c_sweep->add_option("--vary", vary, "key=v1;v2;... (repeatable)");
    c_sweep->add_option("--out", out_dir);
    c_sweep->add_option("--workers", workers);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_classify->parsed()) return cmd_classify(scenario_path, out_dir);
        if (c_sim->parsed()) return cmd_simulate(scenario_path, out_dir);
        if (c_kernel->parsed()) return cmd_verify_kernel(kernel_L, kernel_eps, out_dir);
        if (c_analyze->parsed()) return cmd_analyze(scenario_path, out_dir);
        if (c_sweep->parsed()) return cmd_sweep(scenario_path, vary, out_dir, workers);
    } catch (const ScenarioError& e) {
        return report_input_error(e);
    } catch (const ParseError& e) {
        return report_input_error(e);
    } catch (const PreconditionError& e) {
        return report_input_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
