#pragma once

// Rolling-window intraday correlation, relative volatility and beta.
//
// Window ending at base index e covers the span-S returns ending at
// e - W + S .. e (W - S + 1 overlapping returns). Q_S uses all of them;
// P, K and the regression beta use the W / S non-overlapping returns
// ending at e. Returns are truncated at thresholds computed once per day
// from bipower variation of the day's non-overlapping span-S returns.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qscorr/sampling.hpp"

namespace qsc {

struct RollingConfig {
    std::size_t W = 3'600;
    std::size_t S = 180;
    std::size_t N = 23'400;
    std::size_t step = 1;

    void validate() const;
    std::size_t products_per_window() const { return W - S + 1; }
};

enum class LambdaAggregation { Absolute, Signed };  // Signed is experimental

struct TruncationThresholds {
    double nu_x = 0.0;  // market
    double nu_y = 0.0;  // asset
    double bv_x = 0.0;
    double bv_y = 0.0;
};

struct IntradayCurves {
    std::vector<double> eval_times;
    std::vector<double> rho_P, rho_K, rho_QS;
    std::vector<double> lambda;
    std::vector<double> beta_P, beta_K, beta_QS;
    std::vector<double> beta_reg;

    std::size_t size() const { return eval_times.size(); }
};

struct BetaDecomposition {
    double delta_log_rho = 0.0;
    double delta_log_lambda = 0.0;
    double delta_log_beta = 0.0;
};

// (pi/2) sum_{j>=2} |r_j| |r_{j-1}| over non-overlapping span-S returns.
double bipower_variation(std::span<const double> values, std::size_t S);

// nu = 4 sqrt(BV) / n^0.49 with n the day's count of span-S returns.
TruncationThresholds thresholds(const SampledPath& market, const SampledPath& asset, std::size_t S);

// |x| < nu keeps x, otherwise 0.
inline double truncate(double x, double nu) { return std::abs(x) < nu ? x : 0.0; }

// Ratio of aggregated truncated asset returns to aggregated truncated
// market returns over one window's overlapping returns.
double relative_volatility(std::span<const double> asset_returns,
                           std::span<const double> market_returns, double nu_asset,
                           double nu_market, LambdaAggregation agg = LambdaAggregation::Absolute);

// sum(a m) / sum(m^2) after truncation; DegenerateInputError if sum(m^2) = 0.
double beta_regression(std::span<const double> asset_returns, std::span<const double> market_returns,
                       double nu_asset, double nu_market);

// Curves for one day. Windows on which an estimator is undefined yield NaN.
IntradayCurves rolling_curves(const SampledPath& asset, const SampledPath& market,
                              const RollingConfig& cfg,
                              LambdaAggregation agg = LambdaAggregation::Absolute);

// Running pointwise mean over days; NaN entries are skipped per point.
// Days are summed in the order they are added.
class CurveAccumulator {
public:
    void add(const IntradayCurves& day);
    std::size_t days() const { return days_; }
    IntradayCurves mean() const;

private:
    std::vector<double> eval_times_;
    std::vector<std::vector<double>> sums_;
    std::vector<std::vector<std::size_t>> counts_;
    std::size_t days_ = 0;
};

IntradayCurves average_curves(std::span<const IntradayCurves> days);

// Log change between the first and the last point of the Q_S curves.
// Throws DegenerateInputError when a correlation or lambda is not positive.
BetaDecomposition decompose_beta(const IntradayCurves& curves);
BetaDecomposition decompose_beta(double rho_first, double lambda_first, double rho_last,
                                 double lambda_last);

// OLS slope of asset on market daily returns.
double low_frequency_beta(std::span<const double> asset, std::span<const double> market);

}  // namespace qsc
