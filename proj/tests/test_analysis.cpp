#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "heatlab/analysis.hpp"

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

// SimResult holding a single constant-in-x field
SimResult constant_field_result(const Grid1D& grid, double value, double t) {
    SimResult res;
    Eigen::VectorXd u = Eigen::VectorXd::Constant(grid.n, value);
    res.times = {t};
    res.sup_norm = {value};
    res.mass = {value * grid.L};
    res.fields.emplace_back(t, u);
    return res;
}

} // namespace

TEST_CASE("m value for a constant field") {
    Grid1D grid = Grid1D::uniform(1.0, 65);
    auto sim = constant_field_result(grid, 2.0, 0.0);
    auto ms = m_series(sim, grid, parse_expr("s^2"), 0.5, 0.0);
    REQUIRE(ms.times.size() == 1);
    CHECK(ms.values[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("pointwise doubling of the field halves m for h = s^2") {
    Grid1D grid = Grid1D::uniform(1.0, 65);
    auto a = m_series(constant_field_result(grid, 2.0, 0.0), grid, parse_expr("s^2"), 0.1, 0.0);
    auto b = m_series(constant_field_result(grid, 4.0, 0.0), grid, parse_expr("s^2"), 0.1, 0.0);
    CHECK(b.values[0] == doctest::Approx(0.5 * a.values[0]).epsilon(1e-10));
}

TEST_CASE("m series rejects nonpositive fields") {
    Grid1D grid = Grid1D::uniform(1.0, 65);
    auto sim = constant_field_result(grid, -1.0, 0.0);
    CHECK_THROWS_AS(m_series(sim, grid, parse_expr("s^2"), 0.1, 0.0), PreconditionError);
}

TEST_CASE("m decays along the boundary-deficit run and satisfies the slope bound") {
    auto orig = make_spec("0", "s^2", "0", "1", "2");
    Expr h = parse_expr("s^2");
    double sigma = 1.0;
    auto aux = make_boundary_aux(orig, h, sigma);

    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.record_dt = 1e-3;
    auto sim = run(aux.spec, grid, cfg);
    auto ms = m_series(sim, grid, h, sigma, aux.t0);
    REQUIRE(ms.times.size() > 10);

    // positive, finite, and strictly lower at the end than at the start
    for (double m : ms.values) {
        CHECK(m > 0.0);
        CHECK(std::isfinite(m));
    }
    CHECK(ms.values.back() < ms.values.front());

    auto rep = check_m_inequality(ms, orig.beta, aux.xi, aux.gamma, sigma, h, orig.L);
    CHECK(rep.max_violation <= 5e-3);
}

TEST_CASE("slope bound reduces to m' <= 0 without forcing") {
    // no boundary coefficient, no deficits: m of a pure-diffusion positive run
    auto spec = make_spec("0", "0", "0", "0", "2 + x*(1-x)");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 0.5;
    cfg.record_dt = 5e-3;
    auto sim = run(spec, grid, cfg);
    auto ms = m_series(sim, grid, parse_expr("s^2"), 0.1, 0.0);
    auto rep = check_m_inequality(ms, parse_expr("0"), parse_expr("0"), parse_expr("0"), 0.1,
                                  parse_expr("s^2"), 1.0);
    CHECK(rep.max_violation <= 1e-6);
}

TEST_CASE("comparison principle on an ordered pair") {
    auto lo = make_spec("s^2", "0", "1", "0", "0.5");
    auto hi = make_spec("s^2", "0", "1", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 0.9;
    cfg.record_dt = 0.01;
    auto rl = run(lo, grid, cfg);
    auto rh = run(hi, grid, cfg);
    auto rep = comparison_check(rl, rh);
    CHECK(rep.times_compared > 50);
    CHECK(rep.max_excess <= 1e-8);
}

TEST_CASE("identical runs compare with zero excess") {
    auto spec = make_spec("s^2", "0", "1", "0", "1");
    Grid1D grid = Grid1D::uniform(1.0, 33);
    SimConfig cfg;
    cfg.t_end = 0.5;
    cfg.record_dt = 0.01;
    auto r1 = run(spec, grid, cfg);
    auto r2 = run(spec, grid, cfg);
    auto rep = comparison_check(r1, r2);
    CHECK(rep.times_compared > 10);
    CHECK(rep.max_excess == 0.0);
}

TEST_CASE("comparison property suite over randomized ordered data") {
    std::mt19937 rng(424243);
    std::uniform_real_distribution<double> base(0.2, 1.0);
    std::uniform_real_distribution<double> gap(0.05, 0.5);
    std::uniform_int_distribution<int> pick_f(0, 2), pick_g(0, 2);
    const char* fs[] = {"s", "s^2", "0"};
    const char* gs[] = {"0", "s", "s^2"};

    Grid1D grid = Grid1D::uniform(1.0, 33);
    for (int trial = 0; trial < 10; ++trial) {
        double lo_c = base(rng);
        double hi_c = lo_c + gap(rng);
        const char* f = fs[pick_f(rng)];
        const char* g = gs[pick_g(rng)];
        auto lo = make_spec(f, g, "exp(-t)", "exp(-t)", "1");
        auto hi = lo;
        lo.u0 = Expr::constant(lo_c);
        hi.u0 = Expr::constant(hi_c);
        SimConfig cfg;
        cfg.t_end = 0.5;
        cfg.record_dt = 0.01;
        auto rl = run(lo, grid, cfg);
        auto rh = run(hi, grid, cfg);
        auto rep = comparison_check(rl, rh);
        CHECK(rep.times_compared > 0);
        CHECK(rep.max_excess <= 1e-8);
    }
}

TEST_CASE("supersolution construction for the canonical small-data spec") {
    auto spec = make_spec("s^2", "s^2", "exp(-t)", "exp(-t)", "0.01");
    Grid1D grid = Grid1D::uniform(1.0, 65);
    SimConfig cfg;
    cfg.t_end = 20.0;
    cfg.record_dt = 0.1;
    auto sup = build_supersolution(spec, 0.5, grid, cfg);

    CHECK(sup.eps > 0.0);
    CHECK(sup.Y > 1.0);
    CHECK(sup.lhs_integral > sup.rhs_integral);

    // z starts at 1, is nondecreasing, and confinement eps Y z < a holds
    double prev = 0.0;
    for (const auto& [t, z] : sup.z_run.fields) {
        CHECK(z[0] >= prev - 1e-12);
        CHECK(sup.eps * sup.Y * z[0] < 0.5);
        prev = z[0];
    }
    CHECK(sup.z_at(0.0) == doctest::Approx(1.0).epsilon(1e-9));

    // y stays within [1, Y]
    for (const auto& [t, y] : sup.y_run.fields) {
        CHECK(y.minCoeff() >= 1.0 - 1e-9);
        CHECK(y.maxCoeff() <= sup.Y + 1e-9);
    }

    // a solution started at eps/2 stays under eps z y through the horizon
    ProblemSpec small = spec;
    small.u0 = Expr::constant(sup.eps / 2.0);
    auto u_run = run(small, grid, cfg);
    REQUIRE(u_run.outcome == SimOutcome::ReachedHorizon);
    auto dom = domination_check(sup, u_run);
    CHECK(dom.times_compared > 100);
    CHECK(dom.max_excess <= 1e-8);
}

TEST_CASE("supersolution requires the small-data classification") {
    auto spec = make_spec("s^2", "0", "1", "0", "1");   // reaction blow-up spec
    Grid1D grid = Grid1D::uniform(1.0, 33);
    SimConfig cfg;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(build_supersolution(spec, 0.5, grid, cfg), PreconditionError);
}
