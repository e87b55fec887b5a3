#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "heatlab/solver.hpp"

using namespace heatlab;

namespace {

ProblemSpec make_spec(const char* f, const char* g, const char* alpha, const char* beta,
                      const char* u0, double L = 1.0) {
    ProblemSpec s;
    s.L = L;
    s.f = parse_expr(f);
    s.g = parse_expr(g);
    s.alpha = parse_expr(alpha);
    s.beta = parse_expr(beta);
    s.u0 = parse_expr(u0);
    return s;
}

// pure-heat run from u0 = 1 + cos(pi x); exact solution 1 + e^{-pi^2 t} cos(pi x)
double eigenmode_error(int n, double t_end) {
    auto spec = make_spec("0", "0", "0", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, n);
    Eigen::VectorXd u0(n);
    for (int i = 0; i < n; ++i) u0[i] = 1.0 + std::cos(M_PI * grid.node(i));
    SimConfig cfg;
    cfg.t_end = t_end;
    cfg.abs_tol = 1e-12;
    cfg.rel_tol = 1e-10;
    auto res = run(spec, grid, cfg, u0);
    double decay = std::exp(-M_PI * M_PI * t_end);
    double err = 0.0;
    const auto& u = res.fields.back().second;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(u[i] - (1.0 + decay * std::cos(M_PI * grid.node(i)))));
    return err;
}

} // namespace

TEST_CASE("constant state is exact") {
    auto spec = make_spec("0", "0", "0", "0", "3");
    Grid1D grid = Grid1D::uniform(1.0, 33);
    SimConfig cfg;
    cfg.t_end = 1.0;
    auto res = run(spec, grid, cfg);
    CHECK(res.outcome == SimOutcome::ReachedHorizon);
    CHECK(res.sup_norm.back() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK((res.fields.back().second.array() - 3.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("stationary zero of f is preserved") {
    auto spec = make_spec("s - s^2", "0", "1", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, 33);
    SimConfig cfg;
    cfg.t_end = 10.0;
    auto res = run(spec, grid, cfg);
    CHECK(res.outcome == SimOutcome::ReachedHorizon);
    CHECK(std::abs(res.sup_norm.back() - 1.0) <= 1e-8);
    CHECK((res.fields.back().second.array() - 1.0).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("pure-heat eigenmode decays at the analytic rate") {
    auto spec = make_spec("0", "0", "0", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, 129);
    Eigen::VectorXd u0(grid.n);
    for (int i = 0; i < grid.n; ++i) u0[i] = std::cos(M_PI * grid.node(i));
    SimConfig cfg;
    cfg.t_end = 0.1;
    auto res = run(spec, grid, cfg, u0);
    REQUIRE(res.outcome == SimOutcome::ReachedHorizon);
    CHECK(res.sup_norm.back() ==
          doctest::Approx(std::exp(-M_PI * M_PI * 0.1)).epsilon(0.005));
}

TEST_CASE("spatial convergence is second order") {
    double e33 = eigenmode_error(33, 0.1);
    double e65 = eigenmode_error(65, 0.1);
    double e129 = eigenmode_error(129, 0.1);
    double p1 = std::log2(e33 / e65);
    double p2 = std::log2(e65 / e129);
    CHECK(p1 >= 1.8);
    CHECK(p1 <= 2.2);
    CHECK(p2 >= 1.8);
    CHECK(p2 <= 2.2);
}

TEST_CASE("uniform reaction blow-up matches the ODE oracle") {
    auto spec = make_spec("s^2", "0", "1", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto res = run(spec, grid, cfg);
    REQUIRE(res.outcome == SimOutcome::BlowupDetected);
    CHECK(std::abs(res.t_blowup - 1.0) <= 0.02);
    CHECK(res.t_blowup_err >= 0.0);
    // threshold crossings must be recorded and increasing
    REQUIRE(res.threshold_times.size() >= 4);
    for (std::size_t i = 1; i < res.threshold_times.size(); ++i)
        CHECK(res.threshold_times[i] > res.threshold_times[i - 1]);
}

TEST_CASE("grid refinement leaves the blow-up estimate stable") {
    auto spec = make_spec("s^2", "0", "1", "0", "1");
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto r1 = run(spec, Grid1D::uniform(1.0, 33), cfg);
    auto r2 = run(spec, Grid1D::uniform(1.0, 65), cfg);
    REQUIRE(r1.outcome == SimOutcome::BlowupDetected);
    REQUIRE(r2.outcome == SimOutcome::BlowupDetected);
    double allowance = 3.0 * std::max(r1.t_blowup_err, r2.t_blowup_err) + 1e-6;
    CHECK(std::abs(r1.t_blowup - r2.t_blowup) <= allowance);
}

TEST_CASE("uniform exponential growth reaches e^5") {
    auto spec = make_spec("s", "0", "1", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto res = run(spec, grid, cfg);
    REQUIRE(res.outcome == SimOutcome::ReachedHorizon);
    CHECK(res.sup_norm.back() == doctest::Approx(std::exp(5.0)).epsilon(0.01));
}

TEST_CASE("boundary-driven blow-up stays under the coefficient-mass bound") {
    auto spec = make_spec("0", "s^2", "0", "1", "1");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto res = run(spec, grid, cfg);
    REQUIRE(res.outcome == SimOutcome::BlowupDetected);
    CHECK(res.t_blowup <= 0.5 + 0.02);
}

TEST_CASE("nonnegativity is enforced for nonnegative data") {
    auto spec = make_spec("s^2", "s", "exp(-t)", "exp(-t)", "x*(1-x)");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 2.0;
    auto res = run(spec, grid, cfg);
    REQUIRE(res.outcome == SimOutcome::ReachedHorizon);
    for (const auto& [t, u] : res.fields) CHECK(u.minCoeff() >= -1e-10);
}

TEST_CASE("discrete mass balance holds semidiscretely") {
    auto spec = make_spec("s^2", "s", "1", "0.5", "1 + x^2");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    Eigen::VectorXd u(grid.n);
    for (int i = 0; i < grid.n; ++i) u[i] = spec.u0(grid.node(i));
    Eigen::VectorXd du(grid.n);
    double t = 0.3;
    pde_rhs(spec, grid, t, u, du);

    // trapezoid mass of du must equal interior production + endpoint fluxes
    double lhs = trapezoid_mass(grid, du);
    double production = 0.0;
    Eigen::VectorXd prod(grid.n);
    for (int i = 0; i < grid.n; ++i) prod[i] = spec.alpha(t) * spec.f(u[i]);
    production = trapezoid_mass(grid, prod);
    double flux = spec.beta(t) * (spec.g(u[0]) + spec.g(u[grid.n - 1]));
    CHECK(lhs == doctest::Approx(production + flux).epsilon(1e-10));
}

TEST_CASE("scalar ODE: blow-up and growth oracles") {
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto res = ode_solve([](double, double v) { return v * v; }, 2.0, 0.0, cfg);
    REQUIRE(res.outcome == SimOutcome::BlowupDetected);
    CHECK(res.t_blowup == doctest::Approx(0.5).epsilon(0.01));

    cfg.t_end = 3.0;
    res = ode_solve([](double t, double v) { return (1.0 + std::exp(-t)) * v; }, 1.0, 0.0, cfg);
    REQUIRE(res.outcome == SimOutcome::ReachedHorizon);
    double exact = std::exp(3.0 + 1.0 - std::exp(-3.0));
    CHECK(res.sup_norm.back() == doctest::Approx(exact).epsilon(0.005));
}

TEST_CASE("deficit ODE stays above the threshold") {
    // v' = (alpha - xi) f(v), alpha = 1, f = s^2, xi = 0.05 e^{-t}, v0 = 2 sigma
    // with sigma = 1: the xi-deficit mass (0.05 sup f over the window) cannot
    // pull v below sigma before blow-up
    auto rhs = make_ode_rhs(parse_expr("1"), parse_expr("0.05*exp(-t)"), parse_expr("s^2"),
                            /*subtract_offset=*/true);
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto res = ode_solve(rhs, 2.0, 0.0, cfg);
    REQUIRE(res.outcome == SimOutcome::BlowupDetected);
    for (const auto& [t, v] : res.fields) CHECK(v[0] > 1.0);
}

TEST_CASE("sup norm is nondecreasing for uniform data with production") {
    auto spec = make_spec("s^2", "s^2", "1", "1", "1");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 5.0;
    auto res = run(spec, grid, cfg);
    REQUIRE(res.outcome == SimOutcome::BlowupDetected);
    for (std::size_t i = 1; i < res.sup_norm.size(); ++i)
        CHECK(res.sup_norm[i] >= res.sup_norm[i - 1] - 1e-12);
}

TEST_CASE("grid constructor enforces the minimum size") {
    CHECK_THROWS(Grid1D::uniform(1.0, 8));
    CHECK_THROWS(Grid1D::uniform(-1.0, 65));
    auto g = Grid1D::uniform(2.0, 17);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(16) == doctest::Approx(2.0));
}
