#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/criteria.hpp"

namespace heatlab {

struct Grid1D {
    double L = 1.0;
    int n = 65;   // nodes including both endpoints

    static Grid1D uniform(double L, int n);
    double dx() const { return L / (n - 1); }
    double node(int i) const { return L * i / (n - 1); }
};

struct SimConfig {
    double t_end = 10.0;
    double dt_init = 1e-6;
    double safety = 0.9;              // step controller safety factor
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double cfl = 0.5;                 // dt <= cfl * dx^2 / 2
    double dt_floor = 1e-13;
    double record_dt = 0.0;           // 0: record every accepted step
    std::vector<double> snapshot_times;
    std::vector<double> blowup_thresholds;   // default 10^2 .. 10^8
    double neg_reject_tol = 1e-10;

    static std::vector<double> default_thresholds();
};

enum class SimOutcome { ReachedHorizon, BlowupDetected, StepFloorHit, Failed };

const char* outcome_name(SimOutcome o);

struct SimResult {
    std::vector<double> times, sup_norm, mass;
    std::vector<std::pair<double, Eigen::VectorXd>> fields;     // recorded states
    std::vector<std::pair<double, Eigen::VectorXd>> snapshots;  // at requested times
    std::vector<double> threshold_times;                        // tau_k crossings
    SimOutcome outcome = SimOutcome::ReachedHorizon;
    double t_final = 0.0;
    double t_blowup = 0.0;
    double t_blowup_err = 0.0;
    std::string message;
};

/// Single embedded RK(2,3) attempt; does not enforce event alignment.
struct StepResult {
    Eigen::VectorXd state;
    double err_norm = 0.0;   // scaled; accepted when <= 1
    bool accepted = false;
    double dt_next = 0.0;
};
StepResult step(const Eigen::VectorXd& u, double t, double dt, const ProblemSpec& spec,
                const Grid1D& grid, const SimConfig& cfg);

/// Method-of-lines integration of the problem to blow-up, horizon, or
/// step-floor.
SimResult run(const ProblemSpec& spec, const Grid1D& grid, const SimConfig& cfg);

/// Same, with explicit nodal initial data (for data outside the expression
/// grammar, e.g. trigonometric eigenmodes in accuracy tests).
SimResult run(const ProblemSpec& spec, const Grid1D& grid, const SimConfig& cfg,
              Eigen::VectorXd u0);

/// Same stepper in dimension 0: v' = rhs(t, v), v(t0) = v0.
SimResult ode_solve(const std::function<double(double, double)>& rhs, double v0, double t0,
                    const SimConfig& cfg);

/// Auxiliary scalar right-hand sides (coef - off) f(v) and (coef + off) f(v).
std::function<double(double, double)> make_ode_rhs(const Expr& coef, const Expr& offset,
                                                   const Expr& f, bool subtract_offset);

/// Semidiscrete right-hand side (exposed for the mass-balance check).
void pde_rhs(const ProblemSpec& spec, const Grid1D& grid, double t, const Eigen::VectorXd& u,
             Eigen::VectorXd& out);

/// Trapezoid mass of a nodal field.
double trapezoid_mass(const Grid1D& grid, const Eigen::VectorXd& u);

} // namespace heatlab
