#pragma once

// Correlation estimators: Pearson (P), Kendall (K), quadrant (Q) and the
// subsampled quadrant estimator (Q_S). The sign-based estimators estimate
// the concordance tau and map it to a correlation with rho = sin(pi/2 tau).
//
// Conventions: sgn(0) = 0 everywhere; Kendall is the tau-a statistic (ties
// contribute zero, no tie correction in the denominator).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qscorr/kernels.hpp"
#include "qscorr/sampling.hpp"

namespace qsc {

enum class EstimatorKind { Pearson, Kendall, Quadrant, SubsampledQuadrant };

std::string_view to_string(EstimatorKind kind);

struct CorrEstimate {
    EstimatorKind kind = EstimatorKind::Pearson;
    std::optional<double> tau_hat;  // absent for Pearson
    double rho_hat = 0.0;
    std::size_t n_used = 0;
    std::size_t n_nonzero = 0;
};

// Recentered observations. Build with center_by_mean / center_by_median, or
// directly when the data are already centered (e.g. intraday returns).
struct CenteredPairs {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

CenteredPairs center_by_mean(std::span<const double> x, std::span<const double> y);

// Subtracts the lower median (element floor((n-1)/2) of the sorted sample).
CenteredPairs center_by_median(std::span<const double> x, std::span<const double> y);

double lower_median(std::span<const double> v);

// rho = sin(pi/2 tau); throws InputError for |tau| > 1.
double greiner_link(double tau);

CorrEstimate pearson(std::span<const double> x, std::span<const double> y);
CorrEstimate pearson(const CenteredPairs& pairs);

CorrEstimate quadrant_tau(std::span<const double> x, std::span<const double> y);
CorrEstimate quadrant_tau(const CenteredPairs& pairs);

// O(n log n) Kendall tau-a (merge-sort inversion count).
CorrEstimate kendall_tau(std::span<const double> x, std::span<const double> y);
CorrEstimate kendall_tau(const CenteredPairs& pairs);

// Net concordance count sum_{i<j} sgn(dx) sgn(dy), fast and by definition.
std::int64_t kendall_net_concordance(std::span<const double> x, std::span<const double> y);
std::int64_t kendall_net_concordance_naive(std::span<const double> x, std::span<const double> y);

namespace serial {
// O(n^2) Kendall straight from the definition; kept as the reference.
CorrEstimate kendall_tau(std::span<const double> x, std::span<const double> y);
}  // namespace serial

CorrEstimate subsampled_quadrant(const ReturnGrid& grid);

// Q_S on the overlapping span-S returns of two level arrays.
CorrEstimate subsampled_quadrant(std::span<const double> x_levels,
                                 std::span<const double> y_levels, std::size_t S);

// Q_S averaging only over the non-zero products; throws DegenerateInputError
// when every product is zero.
CorrEstimate subsampled_quadrant_zero_aware(const ReturnGrid& grid);
CorrEstimate subsampled_quadrant_zero_aware(std::span<const double> x_levels,
                                            std::span<const double> y_levels, std::size_t S);

// Builds the zero-aware estimate from counts of one grid with span S.
CorrEstimate zero_aware_from_counts(const SignCounts& counts, std::size_t S);

}  // namespace qsc
