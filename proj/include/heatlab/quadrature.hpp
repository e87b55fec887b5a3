#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace heatlab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 on [a, b]; err is the embedded error estimate.
template <class F>
double gk15(F&& f, double a, double b, double& err) {
    static const double nw[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0,               0.204432940075298},
        {0.586087235467691, 0.0,               0.169004726639267},
        {0.864864423359769, 0.0,               0.104790010322250},
        {0.991455371120813, 0.0,               0.022935322010529},
    };
    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double y0 = f(mid);
    double g7 = nw[0][1] * y0;
    double k15 = nw[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        double dx = hl * nw[i][0];
        double yi = f(mid + dx) + f(mid - dx);
        g7 += nw[i][1] * yi;
        k15 += nw[i][2] * yi;
    }
    g7 *= hl;
    k15 *= hl;
    err = std::abs(k15 - g7);
    err = 200.0 * err * std::sqrt(err);
    return k15;
}

template <class F>
void adapt(F&& f, double a, double b, double tol, int depth, QuadResult& acc) {
    double err = 0.0;
    double v = gk15(f, a, b, err);
    if (err <= tol || depth >= 48 || !(std::isfinite(v))) {
        acc.value += v;
        acc.error += err;
        if (depth >= 48 || !std::isfinite(v)) acc.converged = false;
        return;
    }
    double mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth + 1, acc);
    adapt(f, mid, b, 0.5 * tol, depth + 1, acc);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = 1e-10) {
    QuadResult acc;
    acc.converged = true;
    if (a == b) return acc;
    detail::adapt(f, a, b, tol, 0, acc);
    return acc;
}

/// Adaptive integration with tolerance relative to a coarse magnitude
/// estimate (for integrands spanning many orders of magnitude, where a fixed
/// absolute tolerance would subdivide without bound).
template <class F>
QuadResult integrate_rel(F&& f, double a, double b, double rel = 1e-9) {
    double rough_err = 0.0;
    double rough = detail::gk15(f, a, b, rough_err);
    if (!std::isfinite(rough)) {
        QuadResult r;
        r.value = rough;
        return r;
    }
    // normalize so the embedded error estimate stays in a sane range
    double scale = 1.0 + std::abs(rough);
    QuadResult r = integrate([&](double x) { return f(x) / scale; }, a, b, rel);
    r.value *= scale;
    r.error *= scale;
    return r;
}

/// Partial integrals of f over [a, 10^k] for k = k_lo..k_hi (used by the
/// improper-integral heuristics).
template <class F>
std::vector<double> decade_partials(F&& f, double a, int k_lo, int k_hi, double tol = 1e-9) {
    std::vector<double> out;
    double upper_prev = a;
    double total = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        double upper = std::pow(10.0, k);
        if (upper > upper_prev) {
            total += integrate(f, upper_prev, upper, tol).value;
            upper_prev = upper;
        }
        out.push_back(total);
    }
    return out;
}

/// Classification of a growing sequence of partial integrals I_k over
/// [a, 10^k]: converges when the increments are Cauchy (each of the last
/// three below 1e-6), or when the increment ratios stay below 0.9 (a
/// geometric-type tail, with a Richardson-style extrapolated remainder).
struct TailEstimate {
    bool converges = false;
    double value = 0.0;   // extrapolated limit, when convergent
};

inline TailEstimate classify_partials(const std::vector<double>& partials) {
    TailEstimate out;
    const std::size_t n = partials.size();
    if (n < 4) return out;
    std::vector<double> inc;
    for (std::size_t i = 1; i < n; ++i) inc.push_back(partials[i] - partials[i - 1]);

    bool cauchy = true;
    for (std::size_t i = inc.size() - 3; i < inc.size(); ++i)
        if (std::abs(inc[i]) >= 1e-6) cauchy = false;
    if (cauchy) {
        out.converges = true;
        out.value = partials.back();
        return out;
    }

    bool geometric = true;
    double ratio = 0.0;
    for (std::size_t i = inc.size() - 3; i < inc.size(); ++i) {
        double prev = inc[i - 1];
        if (prev <= 0.0 || inc[i] <= 0.0) { geometric = false; break; }
        double r = inc[i] / prev;
        if (r >= 0.9) { geometric = false; break; }
        ratio = r;
    }
    if (geometric) {
        out.converges = true;
        out.value = partials.back() + inc.back() * ratio / (1.0 - ratio);
        return out;
    }
    return out;
}

} // namespace heatlab
