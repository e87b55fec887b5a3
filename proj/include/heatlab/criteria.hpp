#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/expr.hpp"

namespace heatlab {

struct PreconditionError : std::runtime_error {
    PreconditionError(const std::string& msg, std::optional<double> witness = std::nullopt)
        : std::runtime_error(msg), witness(witness) {}
    std::optional<double> witness;
};

/// One problem instance on the interval (0, L):
///   u_t = u_xx + alpha(t) f(u) + interior_offset(t)
///   du/dnu = beta(t) g(u) + boundary_offset(t)   at x = 0 and x = L
///   u(x, 0) = u0(x)
struct ProblemSpec {
    double L = 1.0;
    Expr f, g, alpha, beta, u0;
    std::optional<Expr> interior_offset;
    std::optional<Expr> boundary_offset;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Checks L > 0, u0 >= 0 by sampling, f,g >= 0 on s >= 0, and the t = 0
/// boundary compatibility of u0 (compatibility failures are warnings; the
/// classical theory assumes it but constant test data routinely violates it).
ValidationReport validate(const ProblemSpec& spec);

enum class VerdictValue { Holds, Fails, Unknown };
enum class Confidence { Exact, Heuristic };

struct Verdict {
    VerdictValue value = VerdictValue::Unknown;
    Confidence confidence = Confidence::Heuristic;
    std::string evidence;
    std::optional<double> payload;   // integral value / sup, when finite

    bool holds() const { return value == VerdictValue::Holds; }
};

/// Force the quadrature tier even when a canonical form is available
/// (used to cross-check the exact tier).
enum class Tier { Auto, ForceHeuristic };

/// Decides whether the tail integral of 1/den over [a, inf) is finite.
Verdict integral_tail_converges(const Expr& den, double a, Tier tier = Tier::Auto);

/// Decides whether the integral of coef over [0, inf) diverges.
Verdict integral_time_diverges(const Expr& coef, Tier tier = Tier::Auto);

struct SmallSVerdicts {
    Verdict holder;        // local Hoelder continuity of f at 0
    Verdict shape;         // f positive nondecreasing on some (0, p)
    Verdict small_s;       // divergent integral of 1/f at 0 and g(s)/s -> 0
};
SmallSVerdicts small_s_details(const Expr& f, const Expr& g, Tier tier = Tier::Auto);
Verdict small_s_conditions(const Expr& f, const Expr& g, Tier tier = Tier::Auto);

/// Decides whether the singular moving-window integral of
/// beta(tau)/sqrt(t - tau) over [t - t0, t] stays bounded for t >= gamma_start;
/// payload is the observed (or proven) sup.
Verdict kernel_bound_114(const Expr& beta, double t0, double gamma_start);

enum class Outcome {
    BlowupBoundary,
    BlowupReaction,
    GlobalSmallData,
    GlobalAllData,
    Inconclusive,
};

const char* outcome_name(Outcome o);

struct Classification {
    Outcome outcome = Outcome::Inconclusive;
    std::map<std::string, Verdict> hypotheses;
};

Classification classify(const ProblemSpec& spec);
std::string to_text(const Classification& cls);

struct BlowupBound {
    bool finite = false;
    double T = 0.0;
    double lhs = 0.0;        // data-side integral
    double rhs_total = 0.0;  // total available coefficient mass (may be inf)
};

/// Upper bound on blow-up time from the boundary term: solves
///   int_0^L int_{u0(x)}^inf ds/h(s) dx = 2 * int_0^T beta(t) dt.
BlowupBound blowup_bound_boundary(const ProblemSpec& spec, const Expr& h);
/// Same, with h defaulting to g itself.
BlowupBound blowup_bound_boundary(const ProblemSpec& spec);

/// Upper bound from the reaction term: solves
///   int_{min u0}^inf ds/f(s) = int_0^T alpha(t) dt.
BlowupBound blowup_bound_reaction(const ProblemSpec& spec);

/// Value of int_a^inf ds/den (exact for canonical forms, decade quadrature
/// with extrapolation otherwise). Throws PreconditionError when divergent.
double tail_integral_value(const Expr& den, double a);

/// Minimum of e over [0, L] by dense sampling plus local refinement.
double min_on_interval(const Expr& e, double L);

} // namespace heatlab
