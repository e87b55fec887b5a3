#include "heatlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatlab/quadrature.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fast tail evaluator for int_u^inf ds/h(s): closed form for the canonical
// families, decade quadrature otherwise.
struct TailOfReciprocal {
    Expr h;
    CanonicalForm cf;

    explicit TailOfReciprocal(const Expr& h_) : h(h_), cf(canonicalize(h_)) {}

    double operator()(double u) const {
        switch (cf.tag) {
        case CanonTag::PowerLaw:
            if (cf.q > 1.0) return std::pow(u, 1.0 - cf.q) / (cf.c * (cf.q - 1.0));
            break;
        case CanonTag::ExpLaw:
            if (cf.lambda > 0.0) return std::exp(-cf.lambda * u) / (cf.c * cf.lambda);
            break;
        case CanonTag::PowerLogLaw:
            if (cf.q == 1.0 && cf.r > 1.0 && u > 1.0)
                return std::pow(std::log(u), 1.0 - cf.r) / (cf.c * (cf.r - 1.0));
            break;
        default:
            break;
        }
        return tail_integral_value(h, u);
    }
};

double expr_time_integral_to_infinity(const Expr& coef) {
    Verdict v = integral_time_diverges(coef);
    if (v.holds() || !v.payload)
        throw PreconditionError("coefficient integral over [0, inf) must be finite");
    return *v.payload;
}

// int_lo^hi ds/f(s); closed form for the canonical families, otherwise a
// log-substituted adaptive pass with relative tolerance (the raw integrand
// can span many orders of magnitude near lo).
double reciprocal_integral(const Expr& f, double lo, double hi) {
    CanonicalForm cf = canonicalize(f);
    switch (cf.tag) {
    case CanonTag::PowerLaw:
        if (cf.q == 1.0) return (std::log(hi) - std::log(lo)) / cf.c;
        return (std::pow(hi, 1.0 - cf.q) - std::pow(lo, 1.0 - cf.q)) / (cf.c * (1.0 - cf.q));
    case CanonTag::ExpLaw:
        if (cf.lambda == 0.0) return (hi - lo) / cf.c;
        return (std::exp(-cf.lambda * lo) - std::exp(-cf.lambda * hi)) / (cf.c * cf.lambda);
    default:
        break;
    }
    auto integrand = [&](double w) {
        double s = std::exp(w);
        return s / f(s);
    };
    return integrate_rel(integrand, std::log(lo), std::log(hi), 1e-9).value;
}

Expr expr_const(double v) { return Expr::constant(v); }
Expr expr_t() { return Expr::variable("t"); }

// c * exp(-lambda t)
Expr decaying_exp(double c, double lambda) {
    Expr e = Expr::unary(UnaryOp::Exp,
                         Expr::unary(UnaryOp::Neg,
                                     Expr::binary(BinaryOp::Mul, expr_const(lambda), expr_t())));
    return Expr::binary(BinaryOp::Mul, expr_const(c), std::move(e));
}

} // namespace

MSeries m_series(const SimResult& sim, const Grid1D& grid, const Expr& h, double sigma,
                 double t0) {
    MSeries ms;
    ms.sigma = sigma;
    ms.t0 = t0;
    TailOfReciprocal tail(h);

    for (const auto& [t, v] : sim.fields) {
        if (t < t0) continue;
        double vmin = v.minCoeff();
        if (vmin <= 0)
            throw PreconditionError("simulated field not positive: m(t) machinery inapplicable",
                                    t);
        if (vmin <= sigma) break;  // the lower-bound regime ends here
        double m = 0.0;
        const int n = grid.n;
        for (int i = 0; i < n; ++i) {
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            m += w * tail(v[i]);
        }
        m *= grid.dx();
        if (!std::isfinite(m) || m <= 0)
            throw PreconditionError("m(t) not finite and positive", t);
        ms.times.push_back(t);
        ms.values.push_back(m);
    }
    return ms;
}

MInequalityReport check_m_inequality(const MSeries& ms, const Expr& beta, const Expr& xi,
                                     const Expr& gamma, double sigma, const Expr& h, double L) {
    MInequalityReport rep;
    double h_sigma = h(sigma);
    for (std::size_t j = 0; j + 1 < ms.times.size(); ++j) {
        double dtj = ms.times[j + 1] - ms.times[j];
        if (dtj <= 0) continue;
        double slope = (ms.values[j + 1] - ms.values[j]) / dtj;
        double tm = 0.5 * (ms.times[j] + ms.times[j + 1]);
        double bound = -2.0 * beta(tm) + (L * xi(tm) + 2.0 * gamma(tm)) / h_sigma;
        rep.mid_times.push_back(tm);
        rep.slopes.push_back(slope);
        rep.bounds.push_back(bound);
        rep.max_violation = std::max(rep.max_violation, slope - bound);
    }
    return rep;
}

ComparisonReport comparison_check(const SimResult& run_low, const SimResult& run_high) {
    ComparisonReport rep;
    rep.max_excess = -kInf;
    std::size_t i = 0, j = 0;
    while (i < run_low.fields.size() && j < run_high.fields.size()) {
        double tl = run_low.fields[i].first, th = run_high.fields[j].first;
        double tol = 1e-9 * std::max(1.0, std::max(std::abs(tl), std::abs(th)));
        if (std::abs(tl - th) <= tol) {
            const auto& ul = run_low.fields[i].second;
            const auto& uh = run_high.fields[j].second;
            if (ul.size() != uh.size())
                throw PreconditionError("comparison requires matching grids");
            rep.max_excess = std::max(rep.max_excess, (ul - uh).maxCoeff());
            ++rep.times_compared;
            ++i;
            ++j;
        } else if (tl < th) {
            ++i;
        } else {
            ++j;
        }
    }
    if (rep.times_compared == 0) rep.max_excess = 0.0;
    return rep;
}

AuxiliaryProblem make_boundary_aux(const ProblemSpec& orig, const Expr& h, double sigma) {
    AuxiliaryProblem aux;
    aux.sigma = sigma;
    aux.t0 = 0.0;

    // xi with total mass 0.4 sigma < sigma / 2
    aux.xi = decaying_exp(0.4 * sigma, 1.0);

    // gamma(0) = beta(0) h(2 sigma); pick the decay rate from the kernel
    // boundary-sum bound so that the smoothing integral stays below sigma/2:
    //   int_0^t e^{-lambda(t-r)} S(r) dr <= 2 c4 sqrt(eps) + M / lambda
    double gamma0 = orig.beta(0.0) * h(2.0 * sigma);
    KernelSpec ks{orig.L, 1e-12};
    auto boundary_sum = [&](double r) {
        double s = 0.0;
        for (int i = 0; i <= 16; ++i) {
            double x = orig.L * i / 16.0;
            s = std::max(s, green_eval(ks, x, 0.0, r) + green_eval(ks, x, orig.L, r));
        }
        return s;
    };
    double c4 = 0.0;
    double eps = 1e-2;
    for (int i = 0; i <= 32; ++i) {
        double r = 1e-8 * std::pow(eps / 1e-8, i / 32.0);
        c4 = std::max(c4, std::sqrt(r) * boundary_sum(r));
    }
    // shrink eps until the singular part uses at most a quarter of the budget
    while (gamma0 > 0 && 2.0 * c4 * std::sqrt(eps) > 0.25 * sigma / (2.0 * gamma0) && eps > 1e-10)
        eps *= 0.25;
    double M = 0.0;
    for (int i = 0; i <= 48; ++i) {
        double r = eps * std::pow(50.0 / eps, i / 48.0);
        M = std::max(M, boundary_sum(r));
    }
    double lambda = 1.0;
    while (gamma0 > 0 &&
           gamma0 * (2.0 * c4 * std::sqrt(eps) + M / lambda) >= 0.5 * sigma && lambda < 1e8)
        lambda *= 2.0;
    aux.gamma = decaying_exp(gamma0, lambda);

    aux.spec.L = orig.L;
    aux.spec.f = expr_const(0.0);
    aux.spec.alpha = expr_const(0.0);
    aux.spec.g = h;
    aux.spec.beta = orig.beta;
    aux.spec.u0 = expr_const(2.0 * sigma);
    aux.spec.interior_offset = Expr::unary(UnaryOp::Neg, aux.xi);
    aux.spec.boundary_offset = Expr::unary(UnaryOp::Neg, aux.gamma);
    return aux;
}

double Supersolution::z_at(double t) const {
    const auto& ts = z_run.times;
    const auto& fs = z_run.fields;
    if (ts.empty()) return 1.0;
    if (t <= ts.front()) return fs.front().second[0];
    if (t >= ts.back()) return fs.back().second[0];
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = std::size_t(it - ts.begin());
    double t0 = ts[j - 1], t1 = ts[j];
    double z0 = fs[j - 1].second[0], z1 = fs[j].second[0];
    return z0 + (z1 - z0) * (t - t0) / (t1 - t0);
}

Supersolution build_supersolution(const ProblemSpec& spec, double a, const Grid1D& grid,
                                  const SimConfig& cfg) {
    Classification cls = classify(spec);
    if (cls.outcome != Outcome::GlobalSmallData)
        throw PreconditionError("supersolution construction needs the small-data hypotheses");
    if (!(a > 0)) throw PreconditionError("a must be positive");

    Supersolution sup;
    sup.a = a;
    sup.xi = decaying_exp(1.0, 1.0);
    sup.eta = decaying_exp(1.0, 1.0);

    // auxiliary diffusion run with inflow flux xi + beta
    ProblemSpec yspec;
    yspec.L = spec.L;
    yspec.f = Expr::constant(0.0);
    yspec.g = Expr::constant(0.0);
    yspec.alpha = Expr::constant(0.0);
    yspec.beta = Expr::constant(0.0);
    yspec.u0 = Expr::constant(1.0);
    yspec.boundary_offset = Expr::binary(BinaryOp::Add, sup.xi, spec.beta);
    sup.y_run = run(yspec, grid, cfg);

    double ymax = *std::max_element(sup.y_run.sup_norm.begin(), sup.y_run.sup_norm.end());
    sup.Y = 1.05 * ymax;   // finite-horizon sup plus margin

    double alpha_mass = expr_time_integral_to_infinity(spec.alpha);
    double eta_mass = 1.0;
    sup.rhs_integral = sup.Y * (alpha_mass + eta_mass);

    auto lhs = [&](double eps) { return reciprocal_integral(spec.f, eps * sup.Y, a); };

    double eps_hi = (a / sup.Y) * (1.0 - 1e-9);
    double eps_lo = eps_hi * 1e-10;
    if (!(lhs(eps_lo) > sup.rhs_integral)) {
        throw SupersolutionError("no admissible epsilon: data-side integral stays too small",
                                 lhs(eps_lo), sup.rhs_integral);
    }
    if (lhs(eps_hi) > sup.rhs_integral) {
        sup.eps = 0.5 * eps_hi;
    } else {
        // bisect for the threshold where the two sides meet, then back off
        double lo = eps_lo, hi = eps_hi;
        for (int it = 0; it < 100; ++it) {
            double mid = std::sqrt(lo * hi);
            (lhs(mid) > sup.rhs_integral ? lo : hi) = mid;
        }
        sup.eps = 0.5 * lo;
    }
    sup.lhs_integral = lhs(sup.eps);

    // amplitude ODE z' = (alpha + eta) f(eps Y z) / eps, z(0) = 1
    const Expr alpha_e = spec.alpha, eta_e = sup.eta, f_e = spec.f;
    const double eps_v = sup.eps, Y_v = sup.Y;
    SimConfig zcfg = cfg;
    zcfg.cfl = 1e300;  // no grid, no CFL
    sup.z_run = ode_solve(
        [alpha_e, eta_e, f_e, eps_v, Y_v](double t, double z) {
            return (alpha_e(t) + eta_e(t)) * f_e(eps_v * Y_v * std::max(z, 0.0)) / eps_v;
        },
        1.0, 0.0, zcfg);

    // confinement: eps Y z(t) < a on the whole horizon
    for (const auto& [t, z] : sup.z_run.fields) {
        if (!(eps_v * Y_v * z[0] < a))
            throw SupersolutionError("confinement eps Y z < a violated during integration",
                                     eps_v * Y_v * z[0], a);
    }
    return sup;
}

DominationReport domination_check(const Supersolution& super, const SimResult& u_run) {
    DominationReport rep;
    rep.max_excess = -kInf;
    std::size_t i = 0, j = 0;
    const auto& yf = super.y_run.fields;
    while (i < u_run.fields.size() && j < yf.size()) {
        double tu = u_run.fields[i].first, ty = yf[j].first;
        double tol = 1e-9 * std::max(1.0, std::max(std::abs(tu), std::abs(ty)));
        if (std::abs(tu - ty) <= tol) {
            double z = super.z_at(tu);
            const auto& u = u_run.fields[i].second;
            const auto& y = yf[j].second;
            if (u.size() != y.size())
                throw PreconditionError("domination check requires matching grids");
            for (int k = 0; k < u.size(); ++k)
                rep.max_excess = std::max(rep.max_excess, u[k] - super.eps * z * y[k]);
            ++rep.times_compared;
            ++i;
            ++j;
        } else if (tu < ty) {
            ++i;
        } else {
            ++j;
        }
    }
    if (rep.times_compared == 0) rep.max_excess = 0.0;
    return rep;
}

} // namespace heatlab
