#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

// Shared statistical helpers and small independent oracles for the test
// suites. Everything here is deliberately decoupled from the library's own
// numerical paths.

namespace testsupport {

// One-sample Kolmogorov-Smirnov statistic against a cdf.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// alpha = 0.01 asymptotic KS critical value
inline double ks_critical(std::size_t n) {
    return 1.63 / std::sqrt(static_cast<double>(n));
}

// cdf of |N(0, sigma^2)|
inline double half_normal_cdf(double x, double sigma) {
    if (x <= 0.0) return 0.0;
    return std::erf(x / (sigma * std::sqrt(2.0)));
}

// Exact sampler for the endpoint of reflected Brownian motion on [0, inf):
// |x0 + sigma W_t| in distribution.
inline double reflected_bm_endpoint(double x0, double sigma, double t, double g) {
    return std::abs(x0 + sigma * std::sqrt(t) * g);
}

// Mean first-exit time of the generator div(grad) (Laplacian, variance 2t per
// coordinate) from a disk of radius R started at radius r, via the radial ODE
// (r m')' = -r integrated numerically.
inline double disk_exit_time_quadrature(double r_start, double radius,
                                        std::size_t n = 20000) {
    // m'(r) = -r/2 (regular at 0), m(R) = 0 => m(r) = int_r^R s/2 ds
    const double h = (radius - r_start) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = r_start + (static_cast<double>(i) + 0.5) * h;
        acc += 0.5 * s * h;
    }
    return acc;
}

// Harmonic extension of cos(n theta) boundary data evaluated at (r, theta):
// independent Fourier oracle for Dirichlet checks.
inline double harmonic_extension_cos(std::size_t n, double r, double theta) {
    return std::pow(r, static_cast<double>(n)) *
           std::cos(static_cast<double>(n) * theta);
}

// Normalized Neumann solution on the unit disk for data cos(n theta):
// u = r^n cos(n theta) / n (series solution, summed independently here).
inline double neumann_solution_cos(std::size_t n, double r, double theta) {
    return harmonic_extension_cos(n, r, theta) / static_cast<double>(n);
}

// Two-layer radial conductivity on the unit disk (kappa = k1 for r < a,
// kappa = k2 for a < r < 1) with Neumann data cos(theta): the solution is
// A r cos(theta) inside and (B r + C / r) cos(theta) outside, glued by
// continuity of the potential and of the radial flux.
struct TwoLayerDisk {
    double k1, k2, a;

    // flux condition at r = 1: k2 (B - C) ... derivative (B - C/r^2)
    void coefficients(double& A, double& B, double& C) const {
        // unknowns A, B, C:
        //   A a = B a + C / a                  (continuity)
        //   k1 A = k2 (B - C / a^2)            (flux continuity)
        //   k2 (B - C) = 1                     (outer Neumann, data cos)
        const double a2 = a * a;
        // solve the 3x3 by elimination
        // from (1): A = B + C/a2
        // into (2): k1 B + k1 C / a2 = k2 B - k2 C / a2
        //   -> B (k1 - k2) = -C (k1 + k2) / a2
        //   -> B = C (k2 + k1) / (a2 (k2 - k1))   [k1 != k2]
        if (k1 == k2) {
            B = 1.0 / k2;
            C = 0.0;
            A = B;
            return;
        }
        const double ratio = (k2 + k1) / (a2 * (k2 - k1));
        // k2 (B - C) = 1 -> C (k2 ratio - k2) = 1
        C = 1.0 / (k2 * (ratio - 1.0));
        B = C * ratio;
        A = B + C / a2;
    }

    double evaluate(double r, double theta) const {
        double A, B, C;
        coefficients(A, B, C);
        const double radial = r < a ? A * r : B * r + C / r;
        return radial * std::cos(theta);
    }
};

}  // namespace testsupport
