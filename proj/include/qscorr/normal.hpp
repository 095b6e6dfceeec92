#pragma once

namespace qsc {

// Standard normal CDF.
double norm_cdf(double x);

// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
// Sheppard's integral over theta in [0, asin rho], integrated adaptively;
// accurate to about 1e-12 for |rho| < 1, exact limits at rho = +-1.
double bvn_cdf(double x, double y, double rho);

}  // namespace qsc
