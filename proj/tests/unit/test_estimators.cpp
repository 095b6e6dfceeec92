#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qscorr/errors.hpp"
#include "qscorr/estimators.hpp"
#include "qscorr/kernels.hpp"

using namespace qsc;

namespace {

std::vector<double> draw(std::mt19937_64& g, std::size_t n, double step = 0.0) {
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& d : v) d = step > 0.0 ? std::round(z(g) / step) * step : z(g);
    return v;
}

std::vector<double> levels_from(const std::vector<double>& inc) {
    std::vector<double> lv(inc.size() + 1, 0.0);
    for (std::size_t i = 0; i < inc.size(); ++i) lv[i + 1] = lv[i] + inc[i];
    return lv;
}

}  // namespace

TEST(SignProduct, ZeroAndTinyValues) {
    EXPECT_EQ(sign_product(0.0, 5.0), 0);
    EXPECT_EQ(sign_product(-0.0, -5.0), 0);
    EXPECT_EQ(sign_product(-2.0, -3.0), 1);
    // 1e-200 * 1e-200 underflows to zero, the sign product must not
    EXPECT_EQ(sign_product(1e-200, -1e-200), -1);
}

TEST(GreinerLink, KnownPoints) {
    EXPECT_EQ(greiner_link(0.0), 0.0);
    EXPECT_DOUBLE_EQ(greiner_link(1.0), 1.0);
    EXPECT_NEAR(greiner_link(1.0 / 3.0), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(greiner_link(-0.4), -greiner_link(0.4));
    EXPECT_THROW(greiner_link(1.0000001), InputError);
    EXPECT_THROW(greiner_link(std::nan("")), InputError);
}

TEST(Median, LowerMedianForEvenSamples) {
    const std::vector<double> odd{5, 1, 3};
    const std::vector<double> even{4, 1, 3, 2};
    EXPECT_EQ(lower_median(odd), 3.0);
    EXPECT_EQ(lower_median(even), 2.0);
    const auto c = center_by_median(even, std::vector<double>{1, 2, 3, 4});
    EXPECT_EQ(c.x, (std::vector<double>{2, -1, 1, 0}));
    EXPECT_EQ(c.y, (std::vector<double>{-1, 0, 1, 2}));
}

TEST(Pearson, PerfectAndHandComputed) {
    const std::vector<double> x{1, 2, 3, 4.5};
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    EXPECT_DOUBLE_EQ(pearson(x, x).rho_hat, 1.0);
    EXPECT_DOUBLE_EQ(pearson(x, neg).rho_hat, -1.0);
    // centered: (-1,0,1) and (-1,1,0); sxy = 1, sxx = syy = 2
    EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}).rho_hat, 0.5, 1e-15);
    EXPECT_FALSE(pearson(x, x).tau_hat.has_value());
}

TEST(Pearson, DegenerateAndShortInputs) {
    const std::vector<double> c{2, 2, 2}, v{1, 2, 3};
    EXPECT_THROW(pearson(c, v), DegenerateInputError);
    EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), InputError);
    EXPECT_THROW(pearson(v, std::vector<double>{1, 2}), InputError);
}

TEST(Quadrant, HandEnumeratedSigns) {
    const auto e = quadrant_tau(std::vector<double>{1, -1, 2}, std::vector<double>{1, 1, -2});
    EXPECT_NEAR(*e.tau_hat, -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(e.rho_hat, -0.5, 1e-15);

    const auto all = quadrant_tau(std::vector<double>{1, -2, 3}, std::vector<double>{4, -5, 6});
    EXPECT_EQ(*all.tau_hat, 1.0);
    EXPECT_DOUBLE_EQ(all.rho_hat, 1.0);

    const auto half = quadrant_tau(std::vector<double>{1, 1, -1, -1}, std::vector<double>{1, -1, -1, 1});
    EXPECT_EQ(*half.tau_hat, 0.0);
    EXPECT_EQ(half.rho_hat, 0.0);
}

TEST(Quadrant, ZerosCountInTheDenominator) {
    const auto e = quadrant_tau(std::vector<double>{1, 0, 1, 1}, std::vector<double>{1, 1, 0, 1});
    EXPECT_DOUBLE_EQ(*e.tau_hat, 0.5);
    EXPECT_EQ(e.n_nonzero, 2u);
    EXPECT_THROW(quadrant_tau(std::vector<double>{}, std::vector<double>{}), InputError);
}

TEST(Kendall, HandEnumeratedPairs) {
    EXPECT_EQ(*kendall_tau(std::vector<double>{1, 2, 3}, std::vector<double>{2, 5, 9}).tau_hat, 1.0);
    EXPECT_EQ(*kendall_tau(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}).tau_hat, -1.0);
    const auto e = kendall_tau(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2});
    EXPECT_NEAR(*e.tau_hat, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(e.rho_hat, 0.5, 1e-15);
    EXPECT_THROW(kendall_tau(std::vector<double>{1}, std::vector<double>{1}), InputError);
}

TEST(Kendall, TiesContributeZero) {
    // pairs: (1,2) tie in x, (1,3) +, (2,3) +, so net 2 over 3 pairs
    const std::vector<double> x{1, 1, 2}, y{1, 2, 3};
    EXPECT_EQ(kendall_net_concordance(x, y), 2);
    EXPECT_NEAR(*kendall_tau(x, y).tau_hat, 2.0 / 3.0, 1e-15);
}

TEST(Kendall, FastMatchesDefinitionOnRandomAndTiedFixtures) {
    std::mt19937_64 g(11);
    for (std::size_t n : {2u, 3u, 17u, 200u, 1000u}) {
        for (double step : {0.0, 0.5, 2.0}) {
            const auto x = draw(g, n, step), y = draw(g, n, step);
            const auto expected = oracle::kendall_net(x, y);
            EXPECT_EQ(kendall_net_concordance(x, y), expected) << "n=" << n << " step=" << step;
            EXPECT_EQ(kendall_net_concordance_naive(x, y), expected);
            EXPECT_EQ(kendall_tau(x, y).rho_hat, serial::kendall_tau(x, y).rho_hat);
        }
    }
}

TEST(Kendall, RejectsNonFinite) {
    const std::vector<double> x{1, std::nan(""), 3}, y{1, 2, 3};
    EXPECT_THROW(kendall_tau(x, y), InputError);
}

TEST(Kendall, EqualsQuadrantOnPairwiseDifferences) {
    std::mt19937_64 g(5);
    for (std::size_t n : {2u, 10u, 50u}) {
        const auto x = draw(g, n, 0.25), y = draw(g, n, 0.25);
        std::vector<double> dx, dy;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                dx.push_back(x[i] - x[j]);
                dy.push_back(y[i] - y[j]);
            }
        EXPECT_EQ(*kendall_tau(x, y).tau_hat, *quadrant_tau(dx, dy).tau_hat);
    }
}

TEST(EstimatorProperties, PositiveScaleInvariance) {
    std::mt19937_64 g(3);
    const auto x = draw(g, 300), y = draw(g, 300);
    std::vector<double> xs(x), ys(y);
    for (auto& v : xs) v *= 4.0;  // powers of two keep Pearson exact too
    for (auto& v : ys) v *= 0.125;
    EXPECT_EQ(pearson(x, y).rho_hat, pearson(xs, ys).rho_hat);
    EXPECT_EQ(quadrant_tau(x, y).rho_hat, quadrant_tau(xs, ys).rho_hat);
    EXPECT_EQ(kendall_tau(x, y).rho_hat, kendall_tau(xs, ys).rho_hat);
    const auto lx = levels_from(x), ly = levels_from(y);
    const auto lxs = levels_from(xs), lys = levels_from(ys);
    EXPECT_EQ(subsampled_quadrant(lx, ly, 5).rho_hat, subsampled_quadrant(lxs, lys, 5).rho_hat);

    // arbitrary positive scales leave the sign-based estimators untouched
    for (auto& v : ys) v *= 3.7;
    EXPECT_EQ(kendall_tau(x, y).rho_hat, kendall_tau(xs, ys).rho_hat);
    EXPECT_NEAR(pearson(x, y).rho_hat, pearson(xs, ys).rho_hat, 1e-14);
}

TEST(EstimatorProperties, NegatingYNegates) {
    std::mt19937_64 g(4);
    const auto x = draw(g, 101), y = draw(g, 101);
    std::vector<double> ny(y);
    for (auto& v : ny) v = -v;
    EXPECT_NEAR(pearson(x, ny).rho_hat, -pearson(x, y).rho_hat, 1e-15);
    EXPECT_EQ(*quadrant_tau(x, ny).tau_hat, -*quadrant_tau(x, y).tau_hat);
    EXPECT_EQ(*kendall_tau(x, ny).tau_hat, -*kendall_tau(x, y).tau_hat);
    EXPECT_EQ(kendall_tau(x, ny).rho_hat, -kendall_tau(x, y).rho_hat);
    const auto lx = levels_from(x), ly = levels_from(y), lny = levels_from(ny);
    EXPECT_EQ(*subsampled_quadrant(lx, lny, 4).tau_hat, -*subsampled_quadrant(lx, ly, 4).tau_hat);
}

TEST(EstimatorProperties, SignEstimatorsHaveBoundedSensitivity) {
    std::mt19937_64 g(8);
    const std::size_t n = 60;
    auto x = draw(g, n), y = draw(g, n);
    const double q0 = *quadrant_tau(x, y).tau_hat;
    const double k0 = *kendall_tau(x, y).tau_hat;
    x[0] = y[0] = 1e12;
    EXPECT_LE(std::abs(*quadrant_tau(x, y).tau_hat - q0), 2.0 / n + 1e-15);
    // one point touches n - 1 of the n(n-1)/2 pairs, each moving by at most 2
    EXPECT_LE(std::abs(*kendall_tau(x, y).tau_hat - k0), 2.0 * (n - 1) / (n * (n - 1) / 2.0) + 1e-15);
    EXPECT_GT(pearson(x, y).rho_hat, 0.999);
}

TEST(SubsampledQuadrant, SpanOneIsTheQuadrantOnBaseReturns) {
    std::mt19937_64 g(1);
    const auto lx = levels_from(draw(g, 500)), ly = levels_from(draw(g, 500));
    const SampledPath px(lx), py(ly);
    const auto grid = make_return_grid(px, py, 1);
    EXPECT_EQ(subsampled_quadrant(grid).rho_hat,
              quadrant_tau(grid.returns_x, grid.returns_y).rho_hat);
    EXPECT_EQ(subsampled_quadrant(grid).n_used, 500u);
}

TEST(SubsampledQuadrant, AverageOfShiftedGrids) {
    std::mt19937_64 g(2);
    const std::size_t N = 600;
    const auto lx = levels_from(draw(g, N, 0.5)), ly = levels_from(draw(g, N, 0.5));
    for (std::size_t S : {2u, 3u, 10u, 60u}) {
        // summing shifted non-overlapping sign totals in integers is exact
        std::int64_t net = 0, count = 0;
        for (std::size_t shift = 0; shift < S; ++shift) {
            const auto rx = sparse_returns(lx, S, shift), ry = sparse_returns(ly, S, shift);
            for (std::size_t k = 0; k < rx.size(); ++k) net += sign_product(rx[k], ry[k]);
            count += static_cast<std::int64_t>(rx.size());
        }
        ASSERT_EQ(count, static_cast<std::int64_t>(N - S + 1));
        const auto e = subsampled_quadrant(lx, ly, S);
        EXPECT_EQ(*e.tau_hat, static_cast<double>(net) / static_cast<double>(count)) << "S=" << S;
        EXPECT_EQ(e.n_used, N - S + 1);
    }
}

TEST(SubsampledQuadrant, MonotonePathsGiveOne) {
    std::vector<double> lx(101), ly(101);
    for (std::size_t i = 0; i < lx.size(); ++i) {
        lx[i] = 0.01 * i;
        ly[i] = std::exp(0.003 * i);
    }
    EXPECT_EQ(*subsampled_quadrant(lx, ly, 7).tau_hat, 1.0);
}

TEST(SubsampledQuadrant, GridAndLevelOverloadsAgree) {
    std::mt19937_64 g(6);
    const auto lx = levels_from(draw(g, 300, 0.7)), ly = levels_from(draw(g, 300, 0.7));
    const auto grid = make_return_grid(SampledPath(lx), SampledPath(ly), 9);
    EXPECT_EQ(subsampled_quadrant(grid).rho_hat, subsampled_quadrant(lx, ly, 9).rho_hat);
    EXPECT_EQ(subsampled_quadrant_zero_aware(grid).rho_hat,
              subsampled_quadrant_zero_aware(lx, ly, 9).rho_hat);
    ReturnGrid broken = grid;
    broken.returns_x.pop_back();
    EXPECT_THROW(subsampled_quadrant(broken), InputError);
}

TEST(ZeroAware, NoZerosMatchesPlainVersion) {
    std::mt19937_64 g(7);
    const auto lx = levels_from(draw(g, 400)), ly = levels_from(draw(g, 400));
    for (std::size_t S : {1u, 4u, 20u})
        EXPECT_EQ(subsampled_quadrant_zero_aware(lx, ly, S).rho_hat, subsampled_quadrant(lx, ly, S).rho_hat);
}

TEST(ZeroAware, AllPositiveWithSomeZerosGivesOne) {
    // 7 positive, 3 zero, S = 3. Counting N1 as non-zero products gives
    // 7 / (7 - 3 + 1) > 1 before clamping; counting it over base indices
    // gives 7 / 7. Either way the reported tau is 1.
    EXPECT_EQ(*zero_aware_from_counts(SignCounts{7, 0, 3}, 3).tau_hat, 1.0);
    EXPECT_EQ(*zero_aware_from_counts(SignCounts{2, 0, 8}, 5).tau_hat, 1.0);
    EXPECT_EQ(*zero_aware_from_counts(SignCounts{1, 0, 40}, 30).tau_hat, 1.0);
}

TEST(ZeroAware, DenominatorIsTheNonZeroCount) {
    SignCounts c{6, 2, 12};
    const auto e = zero_aware_from_counts(c, 4);
    // N1 = 20 + 3 - 12 = 11, N1 - S + 1 = 8 = positive + negative
    EXPECT_DOUBLE_EQ(*e.tau_hat, 4.0 / 8.0);
    EXPECT_EQ(e.n_nonzero, 8u);
    EXPECT_EQ(e.n_used, 20u);
}

TEST(ZeroAware, BalancedSignsAndAllZeros) {
    EXPECT_EQ(*zero_aware_from_counts(SignCounts{5, 5, 7}, 2).tau_hat, 0.0);
    EXPECT_THROW(zero_aware_from_counts(SignCounts{0, 0, 9}, 2), DegenerateInputError);
    const std::vector<double> flat(50, 1.0), moving = levels_from(std::vector<double>(49, 1.0));
    EXPECT_THROW(subsampled_quadrant_zero_aware(flat, moving, 3), DegenerateInputError);
}

TEST(Kernels, SerialAndParallelCountsAgree) {
    std::mt19937_64 g(9);
    const std::size_t n = 300'000;
    const auto x = draw(g, n, 0.3), y = draw(g, n, 0.3);
    const auto lx = levels_from(x), ly = levels_from(y);
    const int saved = thread_count();
    for (int t : {1, 2, 4}) {
        set_thread_count(t);
        EXPECT_EQ(omp::sign_counts(x, y), serial::sign_counts(x, y));
        EXPECT_EQ(omp::overlapping_sign_counts(lx, ly, 17), serial::overlapping_sign_counts(lx, ly, 17));
        EXPECT_EQ(sign_counts(x, y), serial::sign_counts(x, y));
    }
    set_thread_count(saved);
    const auto c = serial::sign_counts(x, y);
    EXPECT_EQ(c.total(), static_cast<std::int64_t>(n));
}

TEST(Kernels, OverlappingCountsMatchMaterialisedReturns) {
    std::mt19937_64 g(10);
    const auto lx = levels_from(draw(g, 250, 0.4)), ly = levels_from(draw(g, 250, 0.4));
    for (std::size_t S : {1u, 2u, 13u, 250u}) {
        const auto grid = make_return_grid(SampledPath(lx), SampledPath(ly), S);
        EXPECT_EQ(serial::overlapping_sign_counts(lx, ly, S), serial::sign_counts(grid.returns_x, grid.returns_y));
    }
    EXPECT_THROW(serial::overlapping_sign_counts(lx, ly, 251), InputError);
}
