#pragma once

#include <string>

namespace heatlab {

/// Neumann heat kernel on the interval (0, L), dual representation:
/// cosine eigenseries for t >= crossover, reflected-image Gaussians below.
struct KernelSpec {
    double L = 1.0;
    double tol = 1e-12;

    double crossover() const { return 1e-6 * L * L; }
};

double green_eval(const KernelSpec& ks, double x, double y, double t);

// individual representations, exposed for the overlap-window cross-check
double green_eigen(const KernelSpec& ks, double x, double y, double t);
double green_images(const KernelSpec& ks, double x, double y, double t);

struct KernelPropertyReport {
    bool g1_pass = false;
    double g1_min = 0.0;

    bool g2_pass = false;
    double g2_max_dev = 0.0;

    bool g3_pass = false;
    double c1 = 0.0;

    bool g4_pass = false;
    double c2 = 0.0, c3 = 0.0, c3_expected = 0.0;

    bool g5_pass = false;
    double c4 = 0.0;

    bool all_pass() const { return g1_pass && g2_pass && g3_pass && g4_pass && g5_pass; }
};

/// Empirically measures the kernel bounds: nonnegativity, unit mass,
/// uniform lower bound past eps, exponential approach to 1/L, and the
/// sqrt-singular boundary sum below eps.
KernelPropertyReport verify_properties(const KernelSpec& ks, double eps = 1e-2);

std::string to_text(const KernelPropertyReport& rep);

} // namespace heatlab
