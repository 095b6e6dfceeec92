#include "qscorr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qscorr/errors.hpp"

namespace qsc {

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Pearson: return "P";
        case EstimatorKind::Kendall: return "K";
        case EstimatorKind::Quadrant: return "Q";
        case EstimatorKind::SubsampledQuadrant: return "QS";
    }
    return "?";
}

namespace {

void check_pairs(std::span<const double> x, std::span<const double> y, std::size_t min_n,
                 const char* who) {
    if (x.size() != y.size()) throw InputError(std::string(who) + ": series differ in length");
    if (x.size() < min_n)
        throw InputError(std::string(who) + ": need at least " + std::to_string(min_n) + " pairs");
}

double tau_ratio(std::int64_t net, std::int64_t denom) {
    return static_cast<double>(net) / static_cast<double>(denom);
}

}  // namespace

double lower_median(std::span<const double> v) {
    if (v.empty()) throw InputError("median of an empty sample");
    std::vector<double> tmp(v.begin(), v.end());
    const auto mid = tmp.begin() + static_cast<std::ptrdiff_t>((tmp.size() - 1) / 2);
    std::nth_element(tmp.begin(), mid, tmp.end());
    return *mid;
}

CenteredPairs center_by_mean(std::span<const double> x, std::span<const double> y) {
    check_pairs(x, y, 1, "center_by_mean");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    CenteredPairs p;
    p.x.reserve(x.size());
    p.y.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        p.x.push_back(x[i] - mx);
        p.y.push_back(y[i] - my);
    }
    return p;
}

CenteredPairs center_by_median(std::span<const double> x, std::span<const double> y) {
    check_pairs(x, y, 1, "center_by_median");
    const double mx = lower_median(x);
    const double my = lower_median(y);
    CenteredPairs p;
    p.x.reserve(x.size());
    p.y.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        p.x.push_back(x[i] - mx);
        p.y.push_back(y[i] - my);
    }
    return p;
}

double greiner_link(double tau) {
    if (!(std::abs(tau) <= 1.0)) throw InputError("greiner_link: |tau| must be <= 1");
    return std::sin(0.5 * std::numbers::pi * tau);
}

CorrEstimate pearson(std::span<const double> x, std::span<const double> y) {
    check_pairs(x, y, 2, "pearson");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw DegenerateInputError("pearson: zero variance in an input series");
    CorrEstimate e;
    e.kind = EstimatorKind::Pearson;
    e.rho_hat = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    e.n_used = x.size();
    e.n_nonzero = x.size();
    return e;
}

CorrEstimate pearson(const CenteredPairs& pairs) { return pearson(pairs.x, pairs.y); }

CorrEstimate quadrant_tau(std::span<const double> x, std::span<const double> y) {
    check_pairs(x, y, 1, "quadrant_tau");
    const SignCounts c = sign_counts(x, y);
    CorrEstimate e;
    e.kind = EstimatorKind::Quadrant;
    e.tau_hat = tau_ratio(c.net(), c.total());
    e.rho_hat = greiner_link(*e.tau_hat);
    e.n_used = x.size();
    e.n_nonzero = static_cast<std::size_t>(c.nonzero());
    return e;
}

CorrEstimate quadrant_tau(const CenteredPairs& pairs) { return quadrant_tau(pairs.x, pairs.y); }

namespace {

std::int64_t tie_pairs(std::int64_t run) { return run * (run - 1) / 2; }

// Sorts v[lo, hi) ascending and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                         std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inv += static_cast<std::int64_t>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

void check_finite(std::span<const double> v, const char* who) {
    for (double d : v)
        if (!std::isfinite(d)) throw InputError(std::string(who) + ": non-finite observation");
}

}  // namespace

std::int64_t kendall_net_concordance(std::span<const double> x, std::span<const double> y) {
    check_pairs(x, y, 2, "kendall_tau");
    check_finite(x, "kendall_tau");
    check_finite(y, "kendall_tau");
    const std::size_t n = x.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    std::int64_t x_ties = 0, joint_ties = 0;
    std::int64_t x_run = 1, joint_run = 1;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t a = order[i - 1], b = order[i];
        if (x[a] == x[b]) {
            ++x_run;
            joint_run = y[a] == y[b] ? joint_run + 1 : (joint_ties += tie_pairs(joint_run), 1);
        } else {
            x_ties += tie_pairs(x_run);
            joint_ties += tie_pairs(joint_run);
            x_run = joint_run = 1;
        }
    }
    x_ties += tie_pairs(x_run);
    joint_ties += tie_pairs(joint_run);

    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const std::int64_t discordant = merge_count(ys, buf, 0, n);

    std::int64_t y_ties = 0, y_run = 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (ys[i] == ys[i - 1]) {
            ++y_run;
        } else {
            y_ties += tie_pairs(y_run);
            y_run = 1;
        }
    }
    y_ties += tie_pairs(y_run);

    const auto total = tie_pairs(static_cast<std::int64_t>(n));
    return total - x_ties - y_ties + joint_ties - 2 * discordant;
}

std::int64_t kendall_net_concordance_naive(std::span<const double> x, std::span<const double> y) {
    check_pairs(x, y, 2, "kendall_tau");
    std::int64_t net = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) net += sign_product(x[i] - x[j], y[i] - y[j]);
    return net;
}

namespace {

CorrEstimate kendall_from_net(std::int64_t net, std::size_t n) {
    CorrEstimate e;
    e.kind = EstimatorKind::Kendall;
    e.tau_hat = tau_ratio(net, tie_pairs(static_cast<std::int64_t>(n)));
    e.rho_hat = greiner_link(*e.tau_hat);
    e.n_used = n;
    e.n_nonzero = n;
    return e;
}

}  // namespace

CorrEstimate kendall_tau(std::span<const double> x, std::span<const double> y) {
    return kendall_from_net(kendall_net_concordance(x, y), x.size());
}

CorrEstimate kendall_tau(const CenteredPairs& pairs) { return kendall_tau(pairs.x, pairs.y); }

namespace serial {

CorrEstimate kendall_tau(std::span<const double> x, std::span<const double> y) {
    return kendall_from_net(kendall_net_concordance_naive(x, y), x.size());
}

}  // namespace serial

namespace {

CorrEstimate qs_from_counts(const SignCounts& c) {
    CorrEstimate e;
    e.kind = EstimatorKind::SubsampledQuadrant;
    e.tau_hat = tau_ratio(c.net(), c.total());
    e.rho_hat = greiner_link(*e.tau_hat);
    e.n_used = static_cast<std::size_t>(c.total());
    e.n_nonzero = static_cast<std::size_t>(c.nonzero());
    return e;
}

void check_grid(const ReturnGrid& grid) {
    if (grid.returns_x.size() != grid.returns_y.size())
        throw InputError("return grid: series differ in length");
    if (grid.S < 1 || grid.S > grid.base_N || grid.returns_x.size() != grid.base_N - grid.S + 1)
        throw InputError("return grid: expected N - S + 1 returns with 1 <= S <= N");
}

}  // namespace

CorrEstimate subsampled_quadrant(const ReturnGrid& grid) {
    check_grid(grid);
    return qs_from_counts(sign_counts(grid.returns_x, grid.returns_y));
}

CorrEstimate subsampled_quadrant(std::span<const double> x_levels, std::span<const double> y_levels,
                                 std::size_t S) {
    return qs_from_counts(overlapping_sign_counts(x_levels, y_levels, S));
}

CorrEstimate zero_aware_from_counts(const SignCounts& c, std::size_t S) {
    if (c.nonzero() == 0)
        throw DegenerateInputError("zero-aware Q_S: every return product is zero");
    // N1 counts non-zero indicators over the full base index range, so that
    // N1 - S + 1 is the number of non-zero span-S products.
    const auto s = static_cast<std::int64_t>(S);
    const std::int64_t n1 = c.total() + s - 1 - c.zero;
    const std::int64_t denom = std::max<std::int64_t>(1, n1 - s + 1);

    CorrEstimate e;
    e.kind = EstimatorKind::SubsampledQuadrant;
    e.tau_hat = std::clamp(tau_ratio(c.net(), denom), -1.0, 1.0);
    e.rho_hat = greiner_link(*e.tau_hat);
    e.n_used = static_cast<std::size_t>(c.total());
    e.n_nonzero = static_cast<std::size_t>(c.nonzero());
    return e;
}

CorrEstimate subsampled_quadrant_zero_aware(const ReturnGrid& grid) {
    check_grid(grid);
    return zero_aware_from_counts(sign_counts(grid.returns_x, grid.returns_y), grid.S);
}

CorrEstimate subsampled_quadrant_zero_aware(std::span<const double> x_levels,
                                            std::span<const double> y_levels, std::size_t S) {
    return zero_aware_from_counts(overlapping_sign_counts(x_levels, y_levels, S), S);
}

}  // namespace qsc
