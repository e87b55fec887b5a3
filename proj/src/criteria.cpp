#include "heatlab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "heatlab/quadrature.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Verdict make(VerdictValue v, Confidence c, std::string ev,
             std::optional<double> payload = std::nullopt) {
    return Verdict{v, c, std::move(ev), payload};
}

double safe_eval(const Expr& e, double x, double fallback = std::numeric_limits<double>::quiet_NaN()) {
    try {
        return e(x);
    } catch (const EvalError&) {
        return fallback;
    }
}

} // namespace

// ---------------------------------------------------------------------------

ValidationReport validate(const ProblemSpec& spec) {
    ValidationReport rep;
    auto err = [&](std::string m) { rep.ok = false; rep.errors.push_back(std::move(m)); };

    if (!(spec.L > 0)) err("L must be positive");
    if (!spec.f.valid() || !spec.g.valid() || !spec.alpha.valid() || !spec.beta.valid() ||
        !spec.u0.valid()) {
        err("all of f, g, alpha, beta, u0 must be set");
        return rep;
    }

    auto f_sign = check_shape(spec.f, Shape::Nonnegative, 0.0, kInf);
    if (!f_sign.holds) err("f is negative on s >= 0");
    auto g_sign = check_shape(spec.g, Shape::Nonnegative, 0.0, kInf);
    if (!g_sign.holds) err("g is negative on s >= 0");

    if (spec.L > 0) {
        double m0 = min_on_interval(spec.u0, spec.L);
        if (m0 < -1e-12) err("u0 is negative on [0, L]");

        // t = 0 boundary compatibility: -u0'(0) and u0'(L) against the flux.
        double flux0 = safe_eval(spec.beta, 0.0, 0.0) * safe_eval(spec.g, safe_eval(spec.u0, 0.0), 0.0);
        double fluxL = safe_eval(spec.beta, 0.0, 0.0) * safe_eval(spec.g, safe_eval(spec.u0, spec.L), 0.0);
        if (spec.boundary_offset) {
            double off = safe_eval(*spec.boundary_offset, 0.0, 0.0);
            flux0 += off;
            fluxL += off;
        }
        const double h = 1e-5 * spec.L;
        double d0 = (safe_eval(spec.u0, h) - safe_eval(spec.u0, 0.0)) / h;
        double dL = (safe_eval(spec.u0, spec.L) - safe_eval(spec.u0, spec.L - h)) / h;
        if (std::abs(-d0 - flux0) > 1e-6 || std::abs(dL - fluxL) > 1e-6)
            rep.warnings.push_back("u0 does not satisfy the boundary condition at t = 0");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Improper-integral predicates

Verdict integral_tail_converges(const Expr& den, double a, Tier tier) {
    auto pos = check_shape(den, Shape::Positive, a, kInf);
    if (!pos.holds)
        throw PreconditionError("denominator not positive on [a, inf)", pos.witness);

    CanonicalForm cf = canonicalize(den);
    if (tier == Tier::Auto && cf.tag != CanonTag::General) {
        switch (cf.tag) {
        case CanonTag::Constant:
            return make(VerdictValue::Fails, Confidence::Exact,
                        "constant denominator: tail diverges");
        case CanonTag::PowerLaw:
            if (cf.q > 1.0) {
                double v = std::pow(a, 1.0 - cf.q) / (cf.c * (cf.q - 1.0));
                return make(VerdictValue::Holds, Confidence::Exact, cf.describe(), v);
            }
            return make(VerdictValue::Fails, Confidence::Exact,
                        cf.describe() + ": q <= 1 diverges");
        case CanonTag::ExpLaw:
            if (cf.lambda > 0.0) {
                double v = std::exp(-cf.lambda * a) / (cf.c * cf.lambda);
                return make(VerdictValue::Holds, Confidence::Exact, cf.describe(), v);
            }
            return make(VerdictValue::Fails, Confidence::Exact,
                        cf.describe() + ": lambda <= 0 diverges");
        case CanonTag::PowerLogLaw:
            if (a > 1.0) {
                if (cf.q > 1.0) {
                    auto parts = decade_partials([&](double s) { return 1.0 / den(s); },
                                                 a, 2, 8);
                    auto est = classify_partials(parts);
                    return make(VerdictValue::Holds, Confidence::Exact, cf.describe(),
                                est.converges ? std::make_optional(est.value) : std::nullopt);
                }
                if (cf.q == 1.0 && cf.r > 1.0) {
                    double v = std::pow(std::log(a), 1.0 - cf.r) / (cf.c * (cf.r - 1.0));
                    return make(VerdictValue::Holds, Confidence::Exact, cf.describe(), v);
                }
                return make(VerdictValue::Fails, Confidence::Exact,
                            cf.describe() + ": q < 1, or q = 1 with r <= 1, diverges");
            }
            break;  // log sign changes below 1; fall through to quadrature
        case CanonTag::General:
            break;
        }
    }

    auto parts = decade_partials([&](double s) { return 1.0 / den(s); }, a, 2, 8);
    auto est = classify_partials(parts);
    if (est.converges)
        return make(VerdictValue::Holds, Confidence::Heuristic,
                    "decade quadrature with tail extrapolation", est.value);
    return make(VerdictValue::Fails, Confidence::Heuristic,
                "decade partial integrals do not stabilize");
}

Verdict integral_time_diverges(const Expr& coef, Tier tier) {
    auto nn = check_shape(coef, Shape::Nonnegative, 0.0, kInf);
    if (!nn.holds)
        throw PreconditionError("coefficient negative on [0, inf)", nn.witness);

    CanonicalForm cf = canonicalize(coef);
    if (tier == Tier::Auto && cf.tag != CanonTag::General) {
        switch (cf.tag) {
        case CanonTag::Constant:
            if (cf.c > 0.0)
                return make(VerdictValue::Holds, Confidence::Exact, "positive constant diverges");
            return make(VerdictValue::Fails, Confidence::Exact, "identically zero", 0.0);
        case CanonTag::PowerLaw:
            if (cf.c == 0.0)
                return make(VerdictValue::Fails, Confidence::Exact, "identically zero", 0.0);
            if (cf.q >= -1.0)
                return make(VerdictValue::Holds, Confidence::Exact,
                            cf.describe() + ": q >= -1 diverges");
            return make(VerdictValue::Fails, Confidence::Exact,
                        cf.describe() + ": tail converges");
        case CanonTag::ExpLaw:
            if (cf.lambda >= 0.0)
                return make(VerdictValue::Holds, Confidence::Exact,
                            cf.describe() + ": lambda >= 0 diverges");
            return make(VerdictValue::Fails, Confidence::Exact, cf.describe(),
                        cf.c / (-cf.lambda));
        case CanonTag::PowerLogLaw:
            if (cf.q > -1.0 || (cf.q == -1.0 && cf.r >= -1.0))
                return make(VerdictValue::Holds, Confidence::Exact,
                            cf.describe() + ": tail diverges");
            return make(VerdictValue::Fails, Confidence::Exact,
                        cf.describe() + ": tail converges");
        case CanonTag::General:
            break;
        }
    }

    auto parts = decade_partials([&](double t) { return coef(t); }, 0.0, 2, 8);
    auto est = classify_partials(parts);
    if (est.converges)
        return make(VerdictValue::Fails, Confidence::Heuristic,
                    "decade quadrature with tail extrapolation", est.value);
    return make(VerdictValue::Holds, Confidence::Heuristic,
                "decade partial integrals keep growing");
}

// ---------------------------------------------------------------------------
// Small-s hypotheses

SmallSVerdicts small_s_details(const Expr& f, const Expr& g, Tier tier) {
    SmallSVerdicts out;
    CanonicalForm cff = canonicalize(f);
    CanonicalForm cfg = canonicalize(g);

    // local Hoelder continuity of f at 0
    if (tier == Tier::Auto) {
        switch (cff.tag) {
        case CanonTag::Constant:
        case CanonTag::ExpLaw:
            out.holder = make(VerdictValue::Holds, Confidence::Exact, cff.describe());
            break;
        case CanonTag::PowerLaw:
            if (cff.q >= 0.0)
                out.holder = make(VerdictValue::Holds, Confidence::Exact,
                                  cff.describe() + ": Hoelder near 0 for q >= 0");
            else
                out.holder = make(VerdictValue::Fails, Confidence::Exact,
                                  cff.describe() + ": unbounded at 0");
            break;
        default:
            out.holder = make(VerdictValue::Holds, Confidence::Heuristic,
                              "assumed (not decidable from the syntax tree)");
        }
    } else {
        out.holder = make(VerdictValue::Holds, Confidence::Heuristic,
                          "assumed (not decidable from the syntax tree)");
    }

    // f positive nondecreasing on some (0, p)
    bool shape_exact = false;
    if (tier == Tier::Auto) {
        switch (cff.tag) {
        case CanonTag::Constant:
            out.shape = make(cff.c > 0 ? VerdictValue::Holds : VerdictValue::Fails,
                             Confidence::Exact, cff.describe());
            shape_exact = true;
            break;
        case CanonTag::PowerLaw:
            out.shape = make(cff.c > 0 && cff.q >= 0 ? VerdictValue::Holds : VerdictValue::Fails,
                             Confidence::Exact, cff.describe());
            shape_exact = true;
            break;
        case CanonTag::ExpLaw:
            out.shape = make(cff.c > 0 && cff.lambda >= 0 ? VerdictValue::Holds : VerdictValue::Fails,
                             Confidence::Exact, cff.describe());
            shape_exact = true;
            break;
        default:
            break;
        }
    }
    if (!shape_exact) {
        bool ok = true;
        double prev = -kInf;
        for (int k = 80; k >= 10; --k) {
            double s = std::pow(10.0, -k / 10.0);
            double y = safe_eval(f, s);
            if (!std::isfinite(y) || y <= 0 || y < prev - 1e-14 * (1 + std::abs(prev))) {
                ok = false;
                break;
            }
            prev = y;
        }
        out.shape = make(ok ? VerdictValue::Holds : VerdictValue::Fails, Confidence::Heuristic,
                         "sampled on s = 10^{-8}..10^{-1}");
    }

    // divergence of int_0 ds/f
    Verdict div0;
    bool div0_done = false;
    if (tier == Tier::Auto) {
        switch (cff.tag) {
        case CanonTag::Constant:
            div0 = make(cff.c > 0 ? VerdictValue::Fails : VerdictValue::Holds, Confidence::Exact,
                        cff.describe() + (cff.c > 0 ? ": integral at 0 finite" : ": degenerate"));
            div0_done = true;
            break;
        case CanonTag::PowerLaw:
            if (cff.c > 0) {
                div0 = make(cff.q >= 1 ? VerdictValue::Holds : VerdictValue::Fails,
                            Confidence::Exact, cff.describe());
                div0_done = true;
            }
            break;
        case CanonTag::ExpLaw:
            if (cff.c > 0) {
                div0 = make(VerdictValue::Fails, Confidence::Exact,
                            cff.describe() + ": f(0) > 0, integral at 0 finite");
                div0_done = true;
            }
            break;
        default:
            break;
        }
    }
    if (!div0_done) {
        // partial integrals of 1/f over [10^{-k}, 0.1]
        try {
            std::vector<double> parts;
            for (int k = 2; k <= 8; ++k) {
                double lo = std::pow(10.0, -k);
                parts.push_back(integrate([&](double s) { return 1.0 / f(s); }, lo, 0.1, 1e-9).value);
            }
            auto est = classify_partials(parts);
            div0 = make(est.converges ? VerdictValue::Fails : VerdictValue::Holds,
                        Confidence::Heuristic, "decade quadrature toward 0",
                        est.converges ? std::make_optional(est.value) : std::nullopt);
        } catch (const EvalError&) {
            div0 = make(VerdictValue::Unknown, Confidence::Heuristic,
                        "1/f undefined near 0");
        }
    }

    // g(s)/s -> 0 as s -> 0
    Verdict glim;
    bool glim_done = false;
    if (tier == Tier::Auto) {
        switch (cfg.tag) {
        case CanonTag::Constant:
            glim = make(cfg.c == 0 ? VerdictValue::Holds : VerdictValue::Fails,
                        Confidence::Exact, cfg.describe(),
                        cfg.c == 0 ? std::make_optional(0.0) : std::nullopt);
            glim_done = true;
            break;
        case CanonTag::PowerLaw:
            if (cfg.c == 0)
                glim = make(VerdictValue::Holds, Confidence::Exact, cfg.describe(), 0.0);
            else if (cfg.q > 1)
                glim = make(VerdictValue::Holds, Confidence::Exact, cfg.describe(), 0.0);
            else if (cfg.q == 1)
                glim = make(VerdictValue::Fails, Confidence::Exact,
                            cfg.describe() + ": limit equals c", cfg.c);
            else
                glim = make(VerdictValue::Fails, Confidence::Exact,
                            cfg.describe() + ": limit infinite");
            glim_done = true;
            break;
        case CanonTag::ExpLaw:
            glim = make(cfg.c == 0 ? VerdictValue::Holds : VerdictValue::Fails,
                        Confidence::Exact, cfg.describe() + ": g(0) = c");
            glim_done = true;
            break;
        default:
            break;
        }
    }
    if (!glim_done) {
        double r8 = safe_eval(g, 1e-8) / 1e-8;
        double r4 = safe_eval(g, 1e-4) / 1e-4;
        bool ok = std::isfinite(r8) && r8 < 1e-3 && r8 <= r4;
        glim = make(ok ? VerdictValue::Holds : VerdictValue::Fails, Confidence::Heuristic,
                    "sampled ratio g(s)/s at s = 10^{-4}, 10^{-8}", r8);
    }

    Confidence conf = (div0.confidence == Confidence::Exact && glim.confidence == Confidence::Exact)
                          ? Confidence::Exact
                          : Confidence::Heuristic;
    out.small_s = make(div0.holds() && glim.holds() ? VerdictValue::Holds : VerdictValue::Fails,
                       conf, "1/f at 0: " + div0.evidence + "; g/s limit: " + glim.evidence,
                       glim.payload);
    return out;
}

Verdict small_s_conditions(const Expr& f, const Expr& g, Tier tier) {
    auto d = small_s_details(f, g, tier);
    bool ok = d.small_s.holds() && d.shape.holds();
    Confidence conf =
        (d.small_s.confidence == Confidence::Exact && d.shape.confidence == Confidence::Exact)
            ? Confidence::Exact
            : Confidence::Heuristic;
    return make(ok ? VerdictValue::Holds : VerdictValue::Fails, conf,
                d.small_s.evidence + "; shape: " + d.shape.evidence);
}

// ---------------------------------------------------------------------------
// (1.14)-type moving singular window

Verdict kernel_bound_114(const Expr& beta, double t0, double gamma_start) {
    if (!(t0 > 0) || !(gamma_start > t0))
        throw PreconditionError("need t0 > 0 and gamma_start > t0");
    auto nn = check_shape(beta, Shape::Nonnegative, 0.0, kInf);
    if (!nn.holds)
        throw PreconditionError("beta negative", nn.witness);

    // substitution tau = t - r^2 removes the square-root singularity:
    //   int_{t-t0}^t beta(tau)/sqrt(t-tau) dtau = 2 int_0^{sqrt(t0)} beta(t - r^2) dr
    auto window = [&](double t) {
        return 2.0 * integrate_rel([&](double r) { return beta(t - r * r); },
                                   0.0, std::sqrt(t0), 1e-10).value;
    };

    CanonicalForm cf = canonicalize(beta);
    bool nonincreasing = false;
    switch (cf.tag) {
    case CanonTag::Constant: nonincreasing = cf.c >= 0; break;
    case CanonTag::PowerLaw: nonincreasing = cf.c >= 0 && cf.q <= 0; break;
    case CanonTag::ExpLaw: nonincreasing = cf.c >= 0 && cf.lambda <= 0; break;
    default: break;
    }
    if (nonincreasing) {
        // the window integrand is largest at the earliest admissible t
        double sup = window(gamma_start);
        return make(VerdictValue::Holds, Confidence::Exact,
                    cf.describe() + ": nonincreasing, sup at t = gamma_start", sup);
    }

    // geometric grid of t in [gamma_start, 1e4], 8 points per decade
    const double ratio = std::pow(10.0, 1.0 / 8.0);
    double sup = 0.0, sup_before_last_decade = 0.0;
    for (double t = gamma_start; t <= 1e4; t *= ratio) {
        double w = window(t);
        if (t <= 1e3) sup_before_last_decade = std::max(sup_before_last_decade, w);
        sup = std::max(sup, w);
    }
    bool stabilized = std::isfinite(sup) && sup <= sup_before_last_decade * (1.0 + 1e-3);
    return make(stabilized ? VerdictValue::Holds : VerdictValue::Fails, Confidence::Heuristic,
                "running sup over geometric t grid", sup);
}

// ---------------------------------------------------------------------------
// Classification

const char* outcome_name(Outcome o) {
    switch (o) {
    case Outcome::BlowupBoundary: return "BlowupBoundary";
    case Outcome::BlowupReaction: return "BlowupReaction";
    case Outcome::GlobalSmallData: return "GlobalSmallData";
    case Outcome::GlobalAllData: return "GlobalAllData";
    case Outcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

Verdict from_shape(const ShapeVerdict& sv, const std::string& what) {
    return make(sv.holds ? VerdictValue::Holds : VerdictValue::Fails,
                sv.numerical_only ? Confidence::Heuristic : Confidence::Exact, what,
                sv.witness);
}

bool is_zero_expr(const Expr& e) {
    CanonicalForm cf = canonicalize(e);
    return cf.tag == CanonTag::Constant && cf.c == 0.0;
}

} // namespace

Classification classify(const ProblemSpec& spec) {
    Classification cls;
    auto& hyp = cls.hypotheses;

    auto g_pos = check_shape(spec.g, Shape::Positive, 0.0, kInf);
    auto g_mono = check_shape(spec.g, Shape::Nondecreasing, 0.0, kInf);
    hyp["(g)"] = make((g_pos.holds && g_mono.holds) ? VerdictValue::Holds : VerdictValue::Fails,
                      (g_pos.numerical_only || g_mono.numerical_only) ? Confidence::Heuristic
                                                                      : Confidence::Exact,
                      "g positive nondecreasing on s > 0");

    if (g_pos.holds)
        hyp["(01)"] = integral_tail_converges(spec.g, 1.0);
    else
        hyp["(01)"] = make(VerdictValue::Fails,
                           g_pos.numerical_only ? Confidence::Heuristic : Confidence::Exact,
                           "g not positive: tail integral undefined");
    hyp["(1)"] = integral_time_diverges(spec.beta);

    auto f_pos = check_shape(spec.f, Shape::Positive, 0.0, kInf);
    hyp["(f>0)"] = from_shape(f_pos, "f positive on s > 0");
    if (f_pos.holds)
        hyp["(21)"] = integral_tail_converges(spec.f, 1.0);
    else
        hyp["(21)"] = make(VerdictValue::Fails,
                           f_pos.numerical_only ? Confidence::Heuristic : Confidence::Exact,
                           "f not positive: tail integral undefined");
    hyp["(211)"] = integral_time_diverges(spec.alpha);

    auto small = small_s_details(spec.f, spec.g);
    hyp["(1.12)"] = small.holder;
    hyp["(1.12b)"] = small.shape;
    hyp["(1.12a)"] = small.small_s;

    {
        const Verdict& va = hyp["(211)"];
        const Verdict& vb = hyp["(1)"];
        bool both_conv = va.value == VerdictValue::Fails && vb.value == VerdictValue::Fails;
        Confidence conf =
            (va.confidence == Confidence::Exact && vb.confidence == Confidence::Exact)
                ? Confidence::Exact
                : Confidence::Heuristic;
        std::optional<double> total;
        if (both_conv && va.payload && vb.payload) total = *va.payload + *vb.payload;
        hyp["(1.13)"] = make(both_conv ? VerdictValue::Holds : VerdictValue::Fails, conf,
                             "integral of alpha + beta over [0, inf)", total);
    }

    {
        // the hypothesis is existential in (gamma, t0, K); probe a fixed grid
        Verdict best = make(VerdictValue::Fails, Confidence::Heuristic, "no t0 probed");
        for (double t0 : {0.1, 1.0, 10.0}) {
            Verdict v = kernel_bound_114(spec.beta, t0, 2.0 * t0);
            std::ostringstream ev;
            ev << "t0 = " << t0 << ": " << v.evidence;
            v.evidence = ev.str();
            if (v.holds()) { best = v; break; }
            best = v;
        }
        hyp["(1.14)"] = best;
    }

    const bool boundary_blowup =
        hyp["(g)"].holds() && hyp["(01)"].holds() && hyp["(1)"].holds();
    const bool reaction_blowup =
        hyp["(f>0)"].holds() && hyp["(21)"].holds() && hyp["(211)"].holds();
    const bool global_all =
        is_zero_expr(spec.beta) && hyp["(f>0)"].holds() &&
        hyp["(21)"].value == VerdictValue::Fails;
    const bool global_small =
        hyp["(1.12)"].holds() && hyp["(1.12b)"].holds() && hyp["(1.12a)"].holds() &&
        hyp["(1.13)"].holds() && hyp["(1.14)"].holds();

    if (boundary_blowup)
        cls.outcome = Outcome::BlowupBoundary;
    else if (reaction_blowup)
        cls.outcome = Outcome::BlowupReaction;
    else if (global_all)
        cls.outcome = Outcome::GlobalAllData;
    else if (global_small)
        cls.outcome = Outcome::GlobalSmallData;
    else
        cls.outcome = Outcome::Inconclusive;
    return cls;
}

std::string to_text(const Classification& cls) {
    std::ostringstream os;
    os << "classification: " << outcome_name(cls.outcome) << "\n";
    for (const auto& [label, v] : cls.hypotheses) {
        os << "  " << label << ": ";
        switch (v.value) {
        case VerdictValue::Holds: os << "holds"; break;
        case VerdictValue::Fails: os << "fails"; break;
        case VerdictValue::Unknown: os << "unknown"; break;
        }
        os << " [" << (v.confidence == Confidence::Exact ? "exact" : "heuristic") << "]";
        if (v.payload) os << " value=" << *v.payload;
        if (!v.evidence.empty()) os << " -- " << v.evidence;
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Blow-up time bounds

double tail_integral_value(const Expr& den, double a) {
    Verdict v = integral_tail_converges(den, a);
    if (!v.holds())
        throw PreconditionError("tail integral of 1/den diverges");
    if (v.payload) return *v.payload;
    auto parts = decade_partials([&](double s) { return 1.0 / den(s); }, a, 2, 8);
    auto est = classify_partials(parts);
    return est.value;
}

double min_on_interval(const Expr& e, double L) {
    const int n = 2048;
    double best = kInf;
    int best_i = 0;
    for (int i = 0; i <= n; ++i) {
        double x = L * i / n;
        double y = safe_eval(e, x, kInf);
        if (y < best) { best = y; best_i = i; }
    }
    // golden-section refinement around the best sample
    double lo = L * std::max(0, best_i - 1) / n;
    double hi = L * std::min(n, best_i + 1) / n;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = safe_eval(e, x1, kInf), f2 = safe_eval(e, x2, kInf);
    for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = safe_eval(e, x1, kInf);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = safe_eval(e, x2, kInf);
        }
    }
    return std::min({best, f1, f2});
}

namespace {

// Solves coef_mass(T) = target for nondecreasing T -> int_0^T coef.
double invert_coef_mass(const Expr& coef, double target) {
    auto mass = [&](double T) { return integrate([&](double t) { return coef(t); }, 0.0, T, 1e-11).value; };
    double hi = 1.0;
    int guard = 0;
    while (mass(hi) < target && guard++ < 80) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (mass(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

BlowupBound blowup_bound_boundary(const ProblemSpec& spec, const Expr& h) {
    auto hp = check_shape(h, Shape::Positive, 0.0, kInf);
    auto hm = check_shape(h, Shape::Nondecreasing, 0.0, kInf);
    if (!hp.holds || !hm.holds)
        throw PreconditionError("h must be positive and nondecreasing");
    // h <= g pointwise, sampled
    for (int i = 0; i <= 200; ++i) {
        double s = std::pow(10.0, -6.0 + 12.0 * i / 200.0);
        double hv = safe_eval(h, s), gv = safe_eval(spec.g, s);
        if (std::isfinite(hv) && std::isfinite(gv) && hv > gv + 1e-12 * (1 + std::abs(gv)))
            throw PreconditionError("h exceeds g", s);
    }
    double u0min = min_on_interval(spec.u0, spec.L);
    if (!(u0min > 0)) throw PreconditionError("u0 must be positive on [0, L]");

    BlowupBound b;
    b.lhs = integrate([&](double x) { return tail_integral_value(h, spec.u0(x)); },
                      0.0, spec.L, 1e-8).value;

    Verdict beta_div = integral_time_diverges(spec.beta);
    if (beta_div.holds()) {
        b.rhs_total = kInf;
    } else {
        b.rhs_total = beta_div.payload ? 2.0 * *beta_div.payload : 0.0;
        if (b.rhs_total <= b.lhs) {
            b.finite = false;
            return b;
        }
    }
    b.finite = true;
    b.T = invert_coef_mass(spec.beta, b.lhs / 2.0);
    return b;
}

BlowupBound blowup_bound_boundary(const ProblemSpec& spec) {
    return blowup_bound_boundary(spec, spec.g);
}

BlowupBound blowup_bound_reaction(const ProblemSpec& spec) {
    auto fp = check_shape(spec.f, Shape::Positive, 0.0, kInf);
    if (!fp.holds) throw PreconditionError("f must be positive on s > 0", fp.witness);
    double m0 = min_on_interval(spec.u0, spec.L);
    if (!(m0 > 0)) throw PreconditionError("min u0 must be positive");

    BlowupBound b;
    b.lhs = tail_integral_value(spec.f, m0);

    Verdict alpha_div = integral_time_diverges(spec.alpha);
    if (alpha_div.holds()) {
        b.rhs_total = kInf;
    } else {
        b.rhs_total = alpha_div.payload ? *alpha_div.payload : 0.0;
        if (b.rhs_total <= b.lhs) {
            b.finite = false;
            return b;
        }
    }
    b.finite = true;
    b.T = invert_coef_mass(spec.alpha, b.lhs);
    return b;
}

} // namespace heatlab
