#pragma once

// Closed-form and quadrature-defined population quantities: asymptotic
// variances of the estimators, probability limits under time-varying
// volatility, orthant probabilities and influence functions.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qscorr/estimators.hpp"

namespace qsc {

double avar_pearson(double rho);
double avar_kendall(double rho);
double avar_quadrant(double rho);

// Asymptotic variance of Q_S for span S (per sqrt(n), n = N / S).
double avar_subsampled(double rho, std::size_t S);

// Lower bound of avar_subsampled as S grows without bound.
double avar_subsampled_limit(double rho);

struct AsymVarCurve {
    EstimatorKind kind = EstimatorKind::Pearson;
    std::vector<double> rho_grid;
    std::vector<double> variance;
    std::size_t S = 1;  // SubsampledQuadrant only; 0 means the S -> infinity bound
};

AsymVarCurve avar_curve(EstimatorKind kind, std::vector<double> rho_grid, std::size_t S = 1);

// Pr[X > 0, Y > 0] for a standard bivariate normal with correlation rho.
double quadrant_prob(double rho);

// Pr[X > 0, Y > 0, X~ > 0, Y~ > 0] for a Gaussian vector with covariance
// [[1, w], [w, 1]] (x) [[1, rho], [rho, 1]].
double orthant_G(double rho, double omega);

// cov(1{XY > 0}, 1{X~Y~ > 0}) under the same covariance.
double sign_product_cov(double rho, double omega);

// Deterministic volatility paths on u in [0, 1]. Either closures or a dense
// tabulation read as piecewise constant on M equal cells.
struct VolPathSpec {
    std::function<double(double)> sigma_x;
    std::function<double(double)> sigma_y;
    std::vector<double> table_x;
    std::vector<double> table_y;

    static VolPathSpec from_functions(std::function<double(double)> sx,
                                      std::function<double(double)> sy);
    static VolPathSpec from_table(std::vector<double> tx, std::vector<double> ty);

    bool tabulated() const { return !table_x.empty(); }
    void validate() const;
};

// sigma_x = 1/5 + 4u/5 and sigma_y = (6/5 + cos 2 pi u) / 2.
VolPathSpec low_collinearity_design();
// sigma_x = 0.3 g + 0.6 h and sigma_y = h with g, h as above.
VolPathSpec high_collinearity_design();

struct PlimResult {
    double lambda_factor = 1.0;
    double pearson_plim = 0.0;
    double kendall_plim = 0.0;
    double qs_plim = 0.0;
};

// Quadrature: 1-D to 1e-8, nested 2-D to 1e-6; NumericalError when the
// error estimate is above tolerance. Tabulated specs use exact cell sums.
PlimResult plim_under_tv_vol(const VolPathSpec& spec, double rho);

// sin( int_0^1 asin rho(u) du ), the Q_S limit under time-varying correlation.
double plim_qs_tv_corr(const std::function<double(double)>& rho_path);

enum class SparseQuadrantScale { SqrtSMinus1, Sqrt2SMinus1 };

struct InfluenceOptions {
    SparseQuadrantScale quadrant_scale = SparseQuadrantScale::SqrtSMinus1;
};

struct InfluenceValue {
    EstimatorKind kind = EstimatorKind::Pearson;
    double x0 = 0.0;
    double y0 = 0.0;
    double rho = 0.0;
    std::size_t S = 1;
    double value = 0.0;
};

// Influence function at Phi_rho. S = 1 gives the unsampled estimators;
// S > 1 the sparse-sampled versions (Pearson does not depend on S).
// SubsampledQuadrant is treated as Quadrant with span S.
InfluenceValue influence(EstimatorKind kind, double x0, double y0, double rho, std::size_t S = 1,
                         const InfluenceOptions& options = {});

}  // namespace qsc
