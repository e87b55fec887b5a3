#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatlab/kernel.hpp"
#include "heatlab/solver.hpp"

namespace heatlab {

/// Series of m(t) = int_0^L int_{v(x,t)}^inf ds/h(s) dx over the recorded
/// fields of a simulation.
struct MSeries {
    std::vector<double> times;
    std::vector<double> values;
    double sigma = 0.0;
    double t0 = 0.0;
};

MSeries m_series(const SimResult& sim, const Grid1D& grid, const Expr& h, double sigma,
                 double t0);

struct MInequalityReport {
    double max_violation = 0.0;   // max positive excess of slope over the bound
    std::vector<double> mid_times, slopes, bounds;
};

/// Finite-difference slope of m against -2 beta(t) + (L xi(t) + 2 gamma(t)) / h(sigma).
MInequalityReport check_m_inequality(const MSeries& ms, const Expr& beta, const Expr& xi,
                                     const Expr& gamma, double sigma, const Expr& h, double L);

struct ComparisonReport {
    double max_excess = 0.0;      // max over shared times/nodes of u_low - u_high
    int times_compared = 0;
};

/// Discrete comparison principle: fields of the smaller-data run must stay
/// below the larger-data run at every shared record time.
ComparisonReport comparison_check(const SimResult& run_low, const SimResult& run_high);

/// The auxiliary interior/boundary-deficit problem used in the boundary
/// blow-up argument, with admissible xi(t), gamma(t) chosen via the kernel
/// boundary-sum bound.
struct AuxiliaryProblem {
    ProblemSpec spec;       // v_t = v_xx - xi, dv/dnu = beta h(v) - gamma, v(.,t0) = 2 sigma
    Expr xi, gamma;
    double sigma = 0.0;
    double t0 = 0.0;
};

AuxiliaryProblem make_boundary_aux(const ProblemSpec& orig, const Expr& h, double sigma);

struct Supersolution {
    double eps = 0.0;
    double a = 0.0;
    double Y = 0.0;
    Expr xi, eta;
    SimResult y_run;        // pure-diffusion run with inflow flux xi + beta
    SimResult z_run;        // scalar amplitude z(t)
    double lhs_integral = 0.0;   // int_{eps Y}^a ds/f
    double rhs_integral = 0.0;   // Y int_0^inf (alpha + eta)

    /// z(t) by linear interpolation of the recorded series.
    double z_at(double t) const;
};

struct SupersolutionError : std::runtime_error {
    SupersolutionError(const std::string& m, double lhs, double rhs)
        : std::runtime_error(m), lhs(lhs), rhs(rhs) {}
    double lhs, rhs;
};

/// Builds the dominating profile eps * z(t) * y(x,t) for a spec satisfying
/// the small-data global-existence hypotheses; a must lie in (0, p).
Supersolution build_supersolution(const ProblemSpec& spec, double a, const Grid1D& grid,
                                  const SimConfig& cfg);

struct DominationReport {
    double max_excess = 0.0;      // max of u - eps z y over shared record times
    int times_compared = 0;
};

DominationReport domination_check(const Supersolution& super, const SimResult& u_run);

} // namespace heatlab
