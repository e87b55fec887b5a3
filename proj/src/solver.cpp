#include "heatlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatlab {

Grid1D Grid1D::uniform(double L, int n) {
    if (n < 16) throw std::invalid_argument("grid needs at least 16 nodes");
    if (!(L > 0)) throw std::invalid_argument("L must be positive");
    return Grid1D{L, n};
}

std::vector<double> SimConfig::default_thresholds() {
    std::vector<double> th;
    for (int k = 2; k <= 8; ++k) th.push_back(std::pow(10.0, k));
    return th;
}

const char* outcome_name(SimOutcome o) {
    switch (o) {
    case SimOutcome::ReachedHorizon: return "ReachedHorizon";
    case SimOutcome::BlowupDetected: return "BlowupDetected";
    case SimOutcome::StepFloorHit: return "StepFloorHit";
    case SimOutcome::Failed: return "Failed";
    }
    return "?";
}

double trapezoid_mass(const Grid1D& grid, const Eigen::VectorXd& u) {
    const int n = grid.n;
    double s = 0.5 * (u[0] + u[n - 1]);
    for (int i = 1; i < n - 1; ++i) s += u[i];
    return s * grid.dx();
}

void pde_rhs(const ProblemSpec& spec, const Grid1D& grid, double t, const Eigen::VectorXd& u,
             Eigen::VectorXd& out) {
    const int n = grid.n;
    const double dx = grid.dx();
    const double idx2 = 1.0 / (dx * dx);
    const double at = spec.alpha(t);
    const double bt = spec.beta(t);
    const double ioff = spec.interior_offset ? (*spec.interior_offset)(t) : 0.0;
    const double boff = spec.boundary_offset ? (*spec.boundary_offset)(t) : 0.0;

    out.resize(n);
    // tiny negatives are clamped before f, g see them
    auto pos = [](double s) { return s < 0.0 ? 0.0 : s; };

    for (int i = 1; i < n - 1; ++i) {
        double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * idx2;
        out[i] = lap + (at != 0.0 ? at * spec.f(pos(u[i])) : 0.0) + ioff;
    }
    // ghost nodes from the flux: du/dnu = beta g(u) + boundary_offset
    double flux0 = (bt != 0.0 ? bt * spec.g(pos(u[0])) : 0.0) + boff;
    double fluxL = (bt != 0.0 ? bt * spec.g(pos(u[n - 1])) : 0.0) + boff;
    out[0] = 2.0 * (u[1] - u[0] + dx * flux0) * idx2 +
             (at != 0.0 ? at * spec.f(pos(u[0])) : 0.0) + ioff;
    out[n - 1] = 2.0 * (u[n - 2] - u[n - 1] + dx * fluxL) * idx2 +
                 (at != 0.0 ? at * spec.f(pos(u[n - 1])) : 0.0) + ioff;
}

namespace {

using Rhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
using MassFn = std::function<double(const Eigen::VectorXd&)>;

struct LoopOptions {
    double cfl_cap = std::numeric_limits<double>::infinity();  // hard dt ceiling
    bool enforce_nonneg = false;
};

double scaled_error(const Eigen::VectorXd& err, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& ynew, double atol, double rtol) {
    double acc = 0.0;
    for (int i = 0; i < err.size(); ++i) {
        double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        double e = err[i] / sc;
        acc += e * e;
    }
    return std::sqrt(acc / err.size());
}

// Bogacki-Shampine 3(2) with FSAL.
struct Stepper {
    Rhs rhs;
    Eigen::VectorXd k1, k2, k3, k4, tmp;
    bool have_k1 = false;

    void invalidate() { have_k1 = false; }

    // returns scaled error; fills ynew
    double attempt(double t, double dt, const Eigen::VectorXd& y, Eigen::VectorXd& ynew,
                   double atol, double rtol) {
        if (!have_k1) {
            rhs(t, y, k1);
            have_k1 = true;
        }
        tmp = y + (0.5 * dt) * k1;
        rhs(t + 0.5 * dt, tmp, k2);
        tmp = y + (0.75 * dt) * k2;
        rhs(t + 0.75 * dt, tmp, k3);
        ynew = y + dt * ((2.0 / 9.0) * k1 + (1.0 / 3.0) * k2 + (4.0 / 9.0) * k3);
        rhs(t + dt, ynew, k4);
        tmp = dt * ((-5.0 / 72.0) * k1 + (1.0 / 12.0) * k2 + (1.0 / 9.0) * k3 - (1.0 / 8.0) * k4);
        return scaled_error(tmp, y, ynew, atol, rtol);
    }

    void advance() { k1.swap(k4); }  // FSAL
};

bool geometric_clustering(const std::vector<double>& taus) {
    if (taus.size() < 4) return false;
    std::size_t m = taus.size();
    double d2 = taus[m - 1] - taus[m - 2];
    double d1 = taus[m - 2] - taus[m - 3];
    double d0 = taus[m - 3] - taus[m - 4];
    if (d0 <= 0 || d1 <= 0 || d2 <= 0) return false;
    return d1 / d0 <= 0.8 && d2 / d1 <= 0.8;
}

void finish_blowup_estimate(SimResult& res, double last_dt) {
    const auto& tau = res.threshold_times;
    std::size_t m = tau.size();
    if (m >= 3) {
        double t0 = tau[m - 3], t1 = tau[m - 2], t2 = tau[m - 1];
        double denom = (t2 - t1) - (t1 - t0);
        double T = denom != 0.0 ? t2 - (t2 - t1) * (t2 - t1) / denom : t2;
        if (!(T >= t2)) T = t2;  // Aitken can misfire on noisy increments
        res.t_blowup = T;
        res.t_blowup_err = std::abs(tau.back() - T) + last_dt;
    } else if (m >= 1) {
        res.t_blowup = tau.back();
        res.t_blowup_err = last_dt;
    }
}

SimResult integrate_loop(const Rhs& rhs, const MassFn& mass_fn, Eigen::VectorXd u, double t0,
                         const SimConfig& cfg, const LoopOptions& opt) {
    SimResult res;
    std::vector<double> thresholds =
        cfg.blowup_thresholds.empty() ? SimConfig::default_thresholds() : cfg.blowup_thresholds;
    std::size_t next_thr = 0;

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= t0) ++next_snap;

    Stepper st;
    st.rhs = rhs;

    double t = t0;
    double dt = cfg.dt_init;

    long next_record = 1;  // multiples of record_dt past t0

    auto record = [&](double tt, const Eigen::VectorXd& uu) {
        res.times.push_back(tt);
        res.sup_norm.push_back(uu.cwiseAbs().maxCoeff());
        res.mass.push_back(mass_fn(uu));
        res.fields.emplace_back(tt, uu);
    };
    record(t, u);

    double sup0 = res.sup_norm[0];
    while (next_thr < thresholds.size() && sup0 >= thresholds[next_thr]) ++next_thr;

    Eigen::VectorXd unew;
    double last_dt = dt;
    const long max_steps = 20'000'000;
    bool finished = false;

    for (long steps = 0; steps < max_steps; ++steps) {
        if (t >= cfg.t_end - 1e-14 * std::max(1.0, std::abs(cfg.t_end))) {
            res.outcome = SimOutcome::ReachedHorizon;
            finished = true;
            break;
        }

        // cap to the next event so records land on exact times
        double stop = cfg.t_end;
        if (cfg.record_dt > 0.0) stop = std::min(stop, t0 + next_record * cfg.record_dt);
        if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
        dt = std::min(dt, opt.cfl_cap);
        double dt_try = std::min(dt, stop - t);
        if (dt_try <= 0) dt_try = dt;

        bool ok = true;
        double err = 0.0;
        try {
            err = st.attempt(t, dt_try, u, unew, cfg.abs_tol, cfg.rel_tol);
        } catch (const EvalError&) {
            ok = false;
        }
        if (ok && !unew.allFinite()) ok = false;
        if (ok && err > 1.0) ok = false;
        if (ok && opt.enforce_nonneg && unew.minCoeff() < -cfg.neg_reject_tol) ok = false;

        if (!ok) {
            double shrink = (std::isfinite(err) && err > 1.0)
                                ? std::max(0.2, cfg.safety * std::pow(err, -1.0 / 3.0))
                                : 0.5;
            dt = dt_try * shrink;
            // k1 is still valid at (t, u); the retry reuses it
            if (dt < cfg.dt_floor) {
                res.outcome = geometric_clustering(res.threshold_times)
                                  ? SimOutcome::BlowupDetected
                                  : SimOutcome::StepFloorHit;
                res.message = "time step fell below the floor";
                finished = true;
                break;
            }
            continue;
        }

        // accept
        t += dt_try;
        // snap onto event times so that records are bit-identical across runs
        if (cfg.record_dt > 0.0) {
            double tr = t0 + next_record * cfg.record_dt;
            if (std::abs(t - tr) <= 1e-12 * std::max(1.0, std::abs(tr))) t = tr;
        }
        if (next_snap < snaps.size() &&
            std::abs(t - snaps[next_snap]) <= 1e-12 * std::max(1.0, std::abs(snaps[next_snap])))
            t = snaps[next_snap];
        last_dt = dt_try;
        for (int i = 0; i < unew.size(); ++i)
            if (unew[i] < 0.0 && unew[i] > -cfg.neg_reject_tol) unew[i] = 0.0;
        u.swap(unew);
        st.advance();

        double sup = u.cwiseAbs().maxCoeff();
        while (next_thr < thresholds.size() && sup >= thresholds[next_thr]) {
            res.threshold_times.push_back(t);
            ++next_thr;
        }

        bool at_record = cfg.record_dt <= 0.0;
        if (cfg.record_dt > 0.0 &&
            std::abs(t - (t0 + next_record * cfg.record_dt)) <= 1e-12 * std::max(1.0, t)) {
            at_record = true;
            ++next_record;
        }
        if (at_record) record(t, u);
        if (next_snap < snaps.size() &&
            std::abs(t - snaps[next_snap]) <= 1e-12 * std::max(1.0, t)) {
            res.snapshots.emplace_back(snaps[next_snap], u);
            ++next_snap;
        }

        if (next_thr == thresholds.size() && geometric_clustering(res.threshold_times)) {
            res.outcome = SimOutcome::BlowupDetected;
            finished = true;
            break;
        }

        double grow = err > 1e-12 ? cfg.safety * std::pow(err, -1.0 / 3.0) : 5.0;
        dt = dt_try * std::clamp(grow, 0.2, 5.0);
        if (dt < cfg.dt_floor) {
            res.outcome = geometric_clustering(res.threshold_times)
                              ? SimOutcome::BlowupDetected
                              : SimOutcome::StepFloorHit;
            res.message = "time step fell below the floor";
            finished = true;
            break;
        }
    }

    if (!finished) {
        res.outcome = SimOutcome::Failed;
        res.message = "step budget exhausted";
    }
    res.t_final = t;
    if (res.outcome == SimOutcome::BlowupDetected) finish_blowup_estimate(res, last_dt);
    if (!res.times.empty() && res.times.back() != t) record(t, u);
    return res;
}

} // namespace

StepResult step(const Eigen::VectorXd& u, double t, double dt, const ProblemSpec& spec,
                const Grid1D& grid, const SimConfig& cfg) {
    Stepper st;
    st.rhs = [&](double tt, const Eigen::VectorXd& uu, Eigen::VectorXd& out) {
        pde_rhs(spec, grid, tt, uu, out);
    };
    StepResult out;
    Eigen::VectorXd unew;
    out.err_norm = st.attempt(t, dt, u, unew, cfg.abs_tol, cfg.rel_tol);
    out.accepted = out.err_norm <= 1.0 && unew.allFinite();
    out.state = std::move(unew);
    double fac = out.err_norm > 1e-12 ? cfg.safety * std::pow(out.err_norm, -1.0 / 3.0) : 5.0;
    out.dt_next = dt * std::clamp(fac, 0.2, 5.0);
    return out;
}

SimResult run(const ProblemSpec& spec, const Grid1D& grid, const SimConfig& cfg,
              Eigen::VectorXd u0) {
    LoopOptions opt;
    opt.cfl_cap = cfg.cfl * grid.dx() * grid.dx() / 2.0;
    opt.enforce_nonneg =
        u0.minCoeff() >= 0.0 && !spec.interior_offset && !spec.boundary_offset;

    Rhs rhs = [&spec, &grid](double t, const Eigen::VectorXd& u, Eigen::VectorXd& out) {
        pde_rhs(spec, grid, t, u, out);
    };
    MassFn mass = [&grid](const Eigen::VectorXd& u) { return trapezoid_mass(grid, u); };
    return integrate_loop(rhs, mass, std::move(u0), 0.0, cfg, opt);
}

SimResult run(const ProblemSpec& spec, const Grid1D& grid, const SimConfig& cfg) {
    Eigen::VectorXd u0(grid.n);
    for (int i = 0; i < grid.n; ++i) u0[i] = spec.u0(grid.node(i));
    return run(spec, grid, cfg, std::move(u0));
}

SimResult ode_solve(const std::function<double(double, double)>& rhs, double v0, double t0,
                    const SimConfig& cfg) {
    Eigen::VectorXd u(1);
    u[0] = v0;
    Rhs vec_rhs = [&rhs](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
        out.resize(1);
        out[0] = rhs(t, y[0]);
    };
    MassFn mass = [](const Eigen::VectorXd& y) { return y[0]; };
    LoopOptions opt;  // no CFL cap, no positivity rejection in dimension 0
    return integrate_loop(vec_rhs, mass, std::move(u), t0, cfg, opt);
}

std::function<double(double, double)> make_ode_rhs(const Expr& coef, const Expr& offset,
                                                   const Expr& f, bool subtract_offset) {
    double sign = subtract_offset ? -1.0 : 1.0;
    return [coef, offset, f, sign](double t, double v) {
        double s = v < 0 ? 0.0 : v;
        return (coef(t) + sign * offset(t)) * f(s);
    };
}

} // namespace heatlab
