#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "qscorr/errors.hpp"
#include "qscorr/estimators.hpp"
#include "qscorr/simulator.hpp"

using namespace qsc;

namespace {

std::vector<double> diffs(const std::vector<double>& v) {
    std::vector<double> d(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) d[i - 1] = v[i] - v[i - 1];
    return d;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double d : v) s += (d - m) * (d - m);
    return s / (v.size() - 1);
}

SimPath small_path(std::uint64_t seed, std::size_t N = 2'340) {
    auto spec = table1_spec(0.5);
    spec.N = N;
    return simulate_heston(spec, seed);
}

}  // namespace

TEST(Heston, CalibrationTable) {
    const auto s = table1_spec(0.25);
    EXPECT_EQ(s.x.mu, 0.05);
    EXPECT_EQ(s.x.sigma_bar_sq, 0.16);
    EXPECT_EQ(s.x.kappa, 3.0);
    EXPECT_EQ(s.x.s_volvol, 0.8);
    EXPECT_EQ(s.x.varrho, -0.60);
    EXPECT_EQ(s.y.mu, 0.03);
    EXPECT_EQ(s.y.sigma_bar_sq, 0.09);
    EXPECT_EQ(s.y.kappa, 2.0);
    EXPECT_EQ(s.y.s_volvol, 0.5);
    EXPECT_EQ(s.y.varrho, -0.75);
    EXPECT_EQ(s.rho, 0.25);
    EXPECT_EQ(s.N, 23'400u);
    EXPECT_DOUBLE_EQ(s.x0, std::log(100.0));
    EXPECT_DOUBLE_EQ(s.y0, std::log(40.0));
}

TEST(Heston, InvalidSpecsAreRejected) {
    auto s = table1_spec(0.5);
    s.rho = 1.2;
    EXPECT_THROW(simulate_heston(s, 1), InputError);
    s = table1_spec(0.5);
    s.x.kappa = 0;
    EXPECT_THROW(simulate_heston(s, 1), InputError);
    s = table1_spec(0.5);
    s.y.varrho = -1.5;
    EXPECT_THROW(simulate_heston(s, 1), InputError);
}

TEST(Heston, SameSeedSamePathBitForBit) {
    const auto a = small_path(77), b = small_path(77), c = small_path(78);
    EXPECT_EQ(a.latent_x.values, b.latent_x.values);
    EXPECT_EQ(a.latent_y.values, b.latent_y.values);
    EXPECT_EQ(a.spot_var_x, b.spot_var_x);
    EXPECT_NE(a.latent_x.values, c.latent_x.values);
    EXPECT_EQ(a.observed_x.values, a.latent_x.values);
}

TEST(Heston, ShapesAndPositivity) {
    const auto p = small_path(3);
    EXPECT_EQ(p.latent_x.N, 2'340u);
    EXPECT_EQ(p.spot_var_y.size(), 2'341u);
    EXPECT_DOUBLE_EQ(p.latent_x.values[0], std::log(100.0));
    EXPECT_DOUBLE_EQ(p.latent_y.values[0], std::log(40.0));
    for (double v : p.spot_var_x) EXPECT_GE(v, 0.0);
}

TEST(Heston, NoVolOfVolIsCorrelatedBrownianMotion) {
    HestonSpec s;
    s.x = {0.0, 0.04, 1.0, 0.0, 0.0, std::nullopt};
    s.y = {0.0, 0.09, 1.0, 0.0, 0.0, std::nullopt};
    s.rho = 0.5;
    s.N = 23'400;
    const auto p = simulate_heston(s, 12);
    for (double v : p.spot_var_x) EXPECT_EQ(v, 0.04);
    const auto rx = diffs(p.latent_x.values), ry = diffs(p.latent_y.values);
    const double se = (1 - 0.25) / std::sqrt(23'400.0);
    EXPECT_NEAR(pearson(rx, ry).rho_hat, 0.5, 4 * se);
    // day variance per unit horizon
    EXPECT_NEAR(variance(rx) * 23'400, 0.04, 4 * 0.04 * std::sqrt(2.0 / 23'400));
}

TEST(Heston, LeverageCorrelationShowsInIncrements) {
    auto s = table1_spec(0.4);
    s.x.v0 = 0.16;
    s.y.v0 = 0.09;
    double rx = 0, ry = 0;
    const int days = 20;
    for (int d = 0; d < days; ++d) {
        const auto p = simulate_heston(s, 500 + d);
        rx += pearson(diffs(p.latent_x.values), diffs(p.spot_var_x)).rho_hat;
        ry += pearson(diffs(p.latent_y.values), diffs(p.spot_var_y)).rho_hat;
    }
    // truncation at zero and drift are negligible at this step size
    EXPECT_NEAR(rx / days, -0.60, 0.02);
    EXPECT_NEAR(ry / days, -0.75, 0.02);
}

TEST(Heston, SpotVarianceAveragesToTheLongRunLevel) {
    // the Gamma start is the stationary law, so the mean holds at every step
    auto s = table1_spec(0.5);
    s.N = 390;
    std::vector<double> day_means_x, day_means_y;
    for (int d = 0; d < 1000; ++d) {
        const auto p = simulate_heston(s, derive_seed(31, d));
        day_means_x.push_back(mean(p.spot_var_x));
        day_means_y.push_back(mean(p.spot_var_y));
    }
    EXPECT_NEAR(mean(day_means_x), 0.16, 4 * std::sqrt(variance(day_means_x) / 1000));
    EXPECT_NEAR(mean(day_means_y), 0.09, 4 * std::sqrt(variance(day_means_y) / 1000));
}

TEST(Semimartingale, ConstantCoefficientsRecovered) {
    const auto p = simulate_brownian_semimartingale([](double) { return 0.2; }, [](double) { return 0.4; },
                                                    [](double) { return -0.3; }, 23'400, 8);
    const auto rx = diffs(p.latent_x.values), ry = diffs(p.latent_y.values);
    EXPECT_NEAR(pearson(rx, ry).rho_hat, -0.3, 4 * 0.91 / std::sqrt(23'400.0));
    EXPECT_NEAR(std::sqrt(variance(ry) / variance(rx)), 2.0, 0.05);
    EXPECT_THROW(simulate_brownian_semimartingale([](double) { return 0.2; }, [](double) { return -1.0; },
                                                  [](double) { return 0.0; }, 10, 1),
                 InputError);
}

TEST(FactorDay, PerfectCorrelationScalesTheMarket) {
    std::vector<FactorAsset> assets{{"twice", [](double) { return 1.0; }, [](double) { return 2.0; }},
                                    {"indep", [](double) { return 0.0; }, [](double) { return 1.0; }}};
    const auto d = simulate_one_factor_day([](double) { return 0.2; }, assets, 2'000, 4);
    const auto m = diffs(d.market.values), a = diffs(d.assets[0].values);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(a[i], 2 * m[i], 1e-15);
    EXPECT_DOUBLE_EQ(d.assets[1].values[0], std::log(40.0));
    EXPECT_NEAR(pearson(m, diffs(d.assets[1].values)).rho_hat, 0.0, 4 / std::sqrt(2'000.0));
}

TEST(IndependentNoise, ZeroScaleIsIdentity) {
    const auto p = small_path(5);
    const auto q = apply_independent_noise(p, 0.0, 9);
    EXPECT_EQ(q.observed_x.values, p.latent_x.values);
    EXPECT_EQ(q.observed_y.values, p.latent_y.values);
    EXPECT_THROW(apply_independent_noise(p, -1.0, 9), InputError);
}

TEST(IndependentNoise, VarianceMatchesQuarticityScale) {
    const auto p = small_path(6, 23'400);
    const auto q = apply_independent_noise(p, 1e-3, 10);
    std::vector<double> e(p.latent_x.values.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = q.observed_x.values[i] - p.latent_x.values[i];
    double quart = 0;
    for (std::size_t i = 1; i < p.spot_var_x.size(); ++i) quart += p.spot_var_x[i] * p.spot_var_x[i];
    const double omega_sq = 1e-3 * std::sqrt(quart / (p.spot_var_x.size() - 1));
    EXPECT_NEAR(variance(e), omega_sq, 4 * omega_sq * std::sqrt(2.0 / e.size()));
    EXPECT_EQ(q.latent_x.values, p.latent_x.values);
}

TEST(Rounding, FloorToGridEdges) {
    EXPECT_DOUBLE_EQ(floor_to_grid(0.35, 0.1), 0.30000000000000004);
    EXPECT_EQ(floor_to_grid(-0.05, 0.1), -0.1);
    // exact multiples stay put even when v / alpha rounds below an integer
    for (int k = -50; k <= 50; ++k) {
        const double v = k * 1e-4;
        EXPECT_EQ(floor_to_grid(v, 1e-4), v);
    }
    for (double v : {4.605170185988092, 3.6888794541139363, -0.123456789}) {
        EXPECT_LE(floor_to_grid(v, 1e-4), v);
        EXPECT_GT(floor_to_grid(v, 1e-4) + 1e-4, v);
    }
}

TEST(Rounding, OnGridPathUnchangedAndFineGridNearlyIdentity) {
    auto p = small_path(7);
    for (auto& v : p.observed_x.values) v = 37 * 1e-4;
    const auto on = apply_grid_rounding(p, {1e-4, std::nullopt});
    for (double v : on.observed_x.values) EXPECT_EQ(v, 37 * 1e-4);

    const auto fine = apply_grid_rounding(small_path(7), {1e-12, std::nullopt});
    for (std::size_t i = 0; i < fine.observed_y.values.size(); ++i)
        EXPECT_NEAR(fine.observed_y.values[i], fine.latent_y.values[i], 1e-12);
    EXPECT_THROW(apply_grid_rounding(p, {0.0, std::nullopt}), InputError);
}

TEST(Rounding, ProportionalTickUsesPathVolatility) {
    const auto p = small_path(8);
    const auto q = apply_grid_rounding(p, {1.0, 0.01});
    const double ax = 0.01 * std::sqrt(mean(std::vector<double>(p.spot_var_x.begin() + 1, p.spot_var_x.end())));
    for (std::size_t i = 0; i < p.latent_x.values.size(); i += 97)
        EXPECT_NEAR(q.observed_x.values[i], floor_to_grid(p.latent_x.values[i], ax), 1e-15);
}

TEST(GridNoise, ZeroProbabilityIsIdentity) {
    const auto p = small_path(9);
    EXPECT_EQ(apply_grid_noise(p, 1e-4, 0.0, 1).observed_x.values, p.observed_x.values);
    EXPECT_THROW(apply_grid_noise(p, 1e-4, 1.5, 1), InputError);
}

TEST(GridNoise, DisplacementFrequencyAndSupport) {
    const auto p = small_path(10, 23'400);
    const double a = 1e-4, prob = 0.75;
    const auto q = apply_grid_noise(p, a, prob, 3);
    std::size_t moved = 0, up = 0;
    const auto& o = q.observed_x.values;
    for (std::size_t i = 0; i < o.size(); ++i) {
        const double d = o[i] - p.observed_x.values[i];
        ASSERT_TRUE(std::abs(d) < 1e-12 || std::abs(std::abs(d) - a) < 1e-12) << d;
        if (std::abs(d) > 1e-12) ++moved, up += d > 0;
    }
    const double n = static_cast<double>(o.size());
    EXPECT_NEAR(moved / n, prob, 4 * std::sqrt(prob * (1 - prob) / n));
    EXPECT_NEAR(static_cast<double>(up) / moved, 0.5, 4 * 0.5 / std::sqrt(double(moved)));
}

TEST(StalePrices, ExtremeProbabilities) {
    const auto p = small_path(11);
    const auto same = apply_stale_prices(p, 0.0, 0.0, 5);
    EXPECT_EQ(same.observed_x.values, p.observed_x.values);
    const auto frozen = apply_stale_prices(p, 1.0, 1.0, 5);
    for (double v : frozen.observed_y.values) EXPECT_EQ(v, p.observed_y.values[0]);
}

TEST(StalePrices, RunLengthsAreGeometric) {
    const auto p = small_path(12, 23'400);
    for (double q : {0.5, 0.8}) {
        const auto s = apply_stale_prices(p, q, q, 21);
        // a run is a stretch of equal consecutive values, counted in samples
        std::vector<double> runs;
        std::size_t len = 1;
        const auto& v = s.observed_x.values;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] == v[i - 1]) {
                ++len;
            } else {
                runs.push_back(static_cast<double>(len));
                len = 1;
            }
        }
        const double expected = 1.0 / (1.0 - q);
        EXPECT_NEAR(mean(runs), expected, 4 * std::sqrt(q / ((1 - q) * (1 - q)) / runs.size()));
    }
}

TEST(Jumps, ZeroIntensityIsIdentity) {
    const auto p = small_path(13);
    const auto q = apply_jumps(p, {0.0, 0.0, JumpMode::Independent}, 2);
    EXPECT_EQ(q.observed_x.values, p.observed_x.values);
    EXPECT_THROW(apply_jumps(p, {1.0, 2.0, JumpMode::CoJump}, 2), InputError);
    EXPECT_THROW(apply_jumps(p, {-1.0, 0.0, JumpMode::Independent}, 2), InputError);
}

TEST(Jumps, CountsAndSizes) {
    const auto p = small_path(14, 500);
    const double lambda = 1.0, lo = 1.0 / std::sqrt(2.0);
    double steps_hit = 0, inside = 0;
    const int days = 4000;
    for (int d = 0; d < days; ++d) {
        const auto q = apply_jumps(p, {lambda, lambda, JumpMode::Independent}, derive_seed(1, d));
        EXPECT_EQ(q.observed_x.values[0], p.observed_x.values[0]);
        const auto dx = diffs(q.observed_x.values), base = diffs(p.observed_x.values);
        for (std::size_t i = 0; i < dx.size(); ++i) {
            const double j = std::abs(dx[i] - base[i]);
            if (j > 1e-9) {
                ++steps_hit;
                inside += j >= lo - 1e-12 && j <= 2 * lo + 1e-12;
            }
        }
    }
    // two jumps on one of 500 steps is rare enough to ignore at this tolerance
    EXPECT_NEAR(steps_hit / days, lambda, 4 * std::sqrt(lambda / days));
    EXPECT_GT(inside / steps_hit, 0.995);
}

TEST(Jumps, CoJumpsAreIdentical) {
    const auto p = small_path(15);
    const auto q = apply_jumps(p, {3.0, 3.0, JumpMode::CoJump}, 44);
    for (std::size_t i = 0; i < p.observed_x.values.size(); ++i)
        EXPECT_NEAR(q.observed_x.values[i] - p.observed_x.values[i], q.observed_y.values[i] - p.observed_y.values[i],
                    1e-12);
}

TEST(NoiseStack, ComposesInOrderWithDerivedSeeds) {
    const auto p = small_path(16);
    const std::vector<NoiseLayer> layers{GridRounding{1e-4, std::nullopt}, GridNoise{1e-4, 0.75},
                                         StalePrices{0.5, 0.8}};
    const auto stacked = apply_noise_stack(p, layers, 99);
    auto manual = apply_grid_rounding(p, {1e-4, std::nullopt});
    manual = apply_grid_noise(manual, 1e-4, 0.75, derive_seed(99, 2));
    manual = apply_stale_prices(manual, 0.5, 0.8, derive_seed(99, 3));
    EXPECT_EQ(stacked.observed_x.values, manual.observed_x.values);
    EXPECT_EQ(stacked.observed_y.values, manual.observed_y.values);
    EXPECT_EQ(stacked.latent_x.values, p.latent_x.values);
    EXPECT_EQ(layer_name(layers[2]), "stale_prices");
}

TEST(Seeds, DerivedStreamsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t base = 0; base < 50; ++base)
        for (std::uint64_t k = 0; k < 50; ++k) seen.insert(derive_seed(base, k));
    EXPECT_EQ(seen.size(), 2500u);
    EXPECT_EQ(derive_seed(3, 4), derive_seed(3, 4));
}
