#pragma once

// Reference computations for the tests. Each one avoids the code path it
// checks: direct definitions, brute-force sums and independent integrals.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

inline double sgn(double v) { return static_cast<double>((v > 0) - (v < 0)); }

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(X <= h, Y <= k) as int_{-inf}^{h} phi(t) Phi((k - rho t) / sqrt(1 - rho^2)) dt.
inline double bvn_by_conditioning(double h, double k, double rho) {
    const double c = std::sqrt(1.0 - rho * rho);
    auto f = [&](double t) { return phi(t) * Phi((k - rho * t) / c); };
    const double lo = -12.0;
    if (h <= lo) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, std::min(h, 12.0), 20,
                                                                          1e-14);
}

// Pr[(X - a)(Y - b) > 0] under a standard bivariate normal with correlation rho.
inline double concordance(double a, double b, double rho) {
    return 2.0 * bvn_by_conditioning(a, b, rho) + 1.0 - Phi(a) - Phi(b);
}

// sum_{i<j} sgn(x_i - x_j) sgn(y_i - y_j) straight from the definition.
inline std::int64_t kendall_net(std::span<const double> x, std::span<const double> y) {
    std::int64_t net = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            net += static_cast<std::int64_t>(sgn(x[i] - x[j]) * sgn(y[i] - y[j]));
    return net;
}

// Midpoint-rule integral over [0, 1].
inline double midpoint(const std::function<double(double)>& f, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    return s / static_cast<double>(n);
}

struct BruteForcePlim {
    double lambda;
    double kendall;
};

// Riemann sums: n nodes for the 1-D integrals, m x m for the double integral.
inline BruteForcePlim brute_force_plim(const std::function<double(double)>& sx,
                                       const std::function<double(double)>& sy, double rho,
                                       std::size_t n, std::size_t m) {
    const double ixy = midpoint([&](double u) { return sx(u) * sy(u); }, n);
    const double ixx = midpoint([&](double u) { return sx(u) * sx(u); }, n);
    const double iyy = midpoint([&](double u) { return sy(u) * sy(u); }, n);
    std::vector<double> ax(m), ay(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
        ax[i] = sx(u);
        ay[i] = sy(u);
    }
    double k = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double h = (ax[i] * ay[i] + ax[j] * ay[j]) /
                             std::sqrt((ax[i] * ax[i] + ax[j] * ax[j]) * (ay[i] * ay[i] + ay[j] * ay[j]));
            k += std::asin(std::min(1.0, h) * rho);
        }
    k /= static_cast<double>(m) * static_cast<double>(m);
    return {ixy / std::sqrt(ixx * iyy), std::sin(k)};
}

}  // namespace oracle
