#include "heatlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "heatlab/quadrature.hpp"

namespace heatlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double green_eigen(const KernelSpec& ks, double x, double y, double t) {
    if (!(t > 0)) throw std::domain_error("green_eval requires t > 0");
    const double L = ks.L;
    const double a = (kPi / L) * (kPi / L) * t;
    double sum = 1.0 / L;
    for (int k = 1;; ++k) {
        double term = (2.0 / L) * std::cos(k * kPi * x / L) * std::cos(k * kPi * y / L) *
                      std::exp(-double(k) * k * a);
        sum += term;
        // certified tail: sum_{j>k} e^{-j^2 a} <= e^{-(k+1)^2 a} / (1 - e^{-(2k+3)a})
        double m = k + 1;
        double tail = (2.0 / L) * std::exp(-m * m * a) / (1.0 - std::exp(-(2.0 * m + 1.0) * a));
        if (tail < ks.tol) break;
        if (k > 100000) break;  // unreachable for t above the crossover
    }
    return sum;
}

double green_images(const KernelSpec& ks, double x, double y, double t) {
    if (!(t > 0)) throw std::domain_error("green_eval requires t > 0");
    const double L = ks.L;
    const double norm = 1.0 / std::sqrt(4.0 * kPi * t);
    auto phi = [&](double d) { return norm * std::exp(-d * d / (4.0 * t)); };
    double sum = phi(x - y) + phi(x + y);
    for (int n = 1;; ++n) {
        double inc = phi(x - y - 2 * n * L) + phi(x + y - 2 * n * L) +
                     phi(x - y + 2 * n * L) + phi(x + y + 2 * n * L);
        sum += inc;
        if (inc < ks.tol) break;
        if (n > 10000) break;
    }
    return sum;
}

double green_eval(const KernelSpec& ks, double x, double y, double t) {
    if (!(t > 0)) throw std::domain_error("green_eval requires t > 0");
    return t < ks.crossover() ? green_images(ks, x, y, t) : green_eigen(ks, x, y, t);
}

KernelPropertyReport verify_properties(const KernelSpec& ks, double eps) {
    KernelPropertyReport rep;
    const double L = ks.L;
    const int n = 64;

    std::vector<double> xs(n), ts(n);
    for (int i = 0; i < n; ++i) xs[i] = L * i / (n - 1);
    for (int i = 0; i < n; ++i)
        ts[i] = 1e-4 * std::pow(10.0 / 1e-4, double(i) / (n - 1));  // log-spaced [1e-4, 10]

    // G1: nonnegativity over the full grid
    double g1min = 1e300;
    for (double t : ts)
        for (double x : xs)
            for (double y : xs)
                g1min = std::min(g1min, green_eval(ks, x, y, t));
    rep.g1_min = g1min;
    rep.g1_pass = g1min >= -ks.tol;

    // G2: unit mass in y
    double g2dev = 0.0;
    for (int i = 0; i < 16; ++i) {
        double t = 1e-3 * std::pow(10.0 / 1e-3, double(i) / 15);
        for (int j = 0; j < 8; ++j) {
            double x = L * j / 7.0;
            double mass = integrate([&](double y) { return green_eval(ks, x, y, t); },
                                    0.0, L, 1e-11).value;
            g2dev = std::max(g2dev, std::abs(mass - 1.0));
        }
    }
    rep.g2_max_dev = g2dev;
    rep.g2_pass = g2dev <= 1e-8;

    // G3: uniform lower bound for t >= eps
    double c1 = 1e300;
    for (double t : ts) {
        if (t < eps) continue;
        for (double x : xs)
            for (double y : xs)
                c1 = std::min(c1, green_eval(ks, x, y, t));
    }
    rep.c1 = c1;
    rep.g3_pass = c1 > 0;

    // G4: fit sup |G - 1/L| ~ c2 exp(-c3 t). Fit only past ~0.3 L^2 so the
    // slowest eigenmode dominates (higher modes decay 4x faster but pollute
    // the slope at small t).
    {
        const double t_fit = std::max(eps, 0.3 * L * L);
        std::vector<double> lt, ld;
        for (double t : ts) {
            if (t < t_fit) continue;
            double dev = 0.0;
            for (double x : xs)
                for (double y : xs)
                    dev = std::max(dev, std::abs(green_eval(ks, x, y, t) - 1.0 / L));
            if (dev > 1e-280) {
                lt.push_back(t);
                ld.push_back(std::log(dev));
            }
        }
        double n_ = double(lt.size()), st = 0, sd = 0, stt = 0, std_ = 0;
        for (std::size_t i = 0; i < lt.size(); ++i) {
            st += lt[i];
            sd += ld[i];
            stt += lt[i] * lt[i];
            std_ += lt[i] * ld[i];
        }
        double slope = (n_ * std_ - st * sd) / (n_ * stt - st * st);
        double icept = (sd - slope * st) / n_;
        rep.c3 = -slope;
        rep.c2 = std::exp(icept);
        rep.c3_expected = (kPi / L) * (kPi / L);
        rep.g4_pass = rep.c3 > 0 && std::abs(rep.c3 - rep.c3_expected) <= 0.02 * rep.c3_expected;
    }

    // G5: sup over t <= eps of sqrt(t) * (G(x,0;t) + G(x,L;t)); the boundary
    // integral is the two-endpoint sum in 1D
    {
        double c4 = 0.0;
        for (int i = 0; i < 64; ++i) {
            double t = 1e-8 * std::pow(eps / 1e-8, double(i) / 63);
            for (double x : xs) {
                double s = green_eval(ks, x, 0.0, t) + green_eval(ks, x, L, t);
                c4 = std::max(c4, std::sqrt(t) * s);
            }
        }
        rep.c4 = c4;
        rep.g5_pass = c4 < 1e300 && c4 > 0;
    }

    return rep;
}

std::string to_text(const KernelPropertyReport& rep) {
    std::ostringstream os;
    os << "G1 nonnegativity: " << (rep.g1_pass ? "PASS" : "FAIL")
       << " (min = " << rep.g1_min << ")\n";
    os << "G2 unit mass: " << (rep.g2_pass ? "PASS" : "FAIL")
       << " (max deviation = " << rep.g2_max_dev << ")\n";
    os << "G3 lower bound: " << (rep.g3_pass ? "PASS" : "FAIL") << " (c1 = " << rep.c1 << ")\n";
    os << "G4 decay to 1/L: " << (rep.g4_pass ? "PASS" : "FAIL") << " (c2 = " << rep.c2
       << ", c3 = " << rep.c3 << ", expected c3 = " << rep.c3_expected << ")\n";
    os << "G5 boundary sum: " << (rep.g5_pass ? "PASS" : "FAIL") << " (c4 = " << rep.c4 << ")\n";
    return os.str();
}

} // namespace heatlab
