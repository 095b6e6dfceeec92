#include "qscorr/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qscorr/errors.hpp"

namespace qsc {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bvn_cdf(double x, double y, double rho) {
    if (!(std::abs(rho) <= 1.0)) throw InputError("bvn_cdf: |rho| must be <= 1");
    if (std::isnan(x) || std::isnan(y)) throw InputError("bvn_cdf: NaN argument");
    if (rho == 1.0) return norm_cdf(std::min(x, y));
    if (rho == -1.0) return std::max(0.0, norm_cdf(x) + norm_cdf(y) - 1.0);
    const double base = norm_cdf(x) * norm_cdf(y);
    if (rho == 0.0 || std::isinf(x) || std::isinf(y)) return base;

    const double hs = 0.5 * (x * x + y * y);
    const double hk = x * y;
    auto f = [&](double theta) {
        const double s = std::sin(theta);
        const double c2 = 1.0 - s * s;
        return std::exp((s * hk - hs) / c2);
    };
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, 0.0, std::asin(rho), 15, 1e-14, &err);
    if (err > 1e-11) throw NumericalError("bvn_cdf: quadrature error estimate " + std::to_string(err));
    return std::clamp(base + integral / (2.0 * std::numbers::pi), 0.0, 1.0);
}

}  // namespace qsc
