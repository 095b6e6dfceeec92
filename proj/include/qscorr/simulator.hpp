#pragma once

// Bivariate Heston paths on an equispaced grid over one model day, and the
// microstructure layers that turn latent prices into observed ones.
//
// Time runs over [0, horizon] in N steps (horizon = 1 by default, so drift
// and variance parameters are per day). Seeds fully determine every draw.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qscorr/sampling.hpp"

namespace qsc {

struct HestonAsset {
    double mu = 0.0;
    double sigma_bar_sq = 0.1;
    double kappa = 1.0;
    double s_volvol = 0.5;
    double varrho = 0.0;
    std::optional<double> v0;  // overrides the Gamma draw of the initial variance
};

struct HestonSpec {
    HestonAsset x;
    HestonAsset y;
    double rho = 0.0;
    std::size_t N = 23'400;
    double horizon = 1.0;
    double x0 = std::log(100.0);
    double y0 = std::log(40.0);

    void validate() const;
};

// The calibration used throughout the simulation study.
HestonSpec table1_spec(double rho);

struct SimPath {
    SampledPath latent_x, latent_y;
    SampledPath observed_x, observed_y;
    std::vector<double> spot_var_x, spot_var_y;  // N + 1 values, variance per unit time
    std::uint64_t seed = 0;
};

SimPath simulate_heston(const HestonSpec& spec, std::uint64_t seed);

// Gaussian increments sigma(u) sqrt(dt) Z with instantaneous correlation
// rho(u), u = (j - 1/2) / N on step j, started at log 100 and log 40.
SimPath simulate_brownian_semimartingale(const std::function<double(double)>& sigma_x,
                                         const std::function<double(double)>& sigma_y,
                                         const std::function<double(double)>& rho, std::size_t N,
                                         std::uint64_t seed);

// One-factor day for the intraday pipeline: the market has volatility
// sigma_m(u); asset i has correlation rho_i(u) with it and volatility
// lambda_i(u) sigma_m(u).
struct FactorAsset {
    std::string name;
    std::function<double(double)> rho;
    std::function<double(double)> lambda;
};

struct FactorDay {
    SampledPath market;
    std::vector<SampledPath> assets;
};

FactorDay simulate_one_factor_day(const std::function<double(double)>& sigma_market,
                                  std::span<const FactorAsset> assets, std::size_t N,
                                  std::uint64_t seed);

struct IndependentNoise {
    double xi_sq = 0.001;
};
struct GridRounding {
    double alpha = 1e-4;
    std::optional<double> proportional_c;  // alpha = c * sqrt(mean spot variance)
};
struct GridNoise {
    double alpha = 1e-4;
    double p = 0.75;
};
struct StalePrices {
    double q_x = 0.5;
    double q_y = 0.8;
};
enum class JumpMode { Independent, CoJump };
struct Jumps {
    double intensity_x = 1.0;
    double intensity_y = 1.0;
    JumpMode mode = JumpMode::Independent;
};

using NoiseLayer = std::variant<IndependentNoise, GridRounding, GridNoise, StalePrices, Jumps>;

std::string layer_name(const NoiseLayer& layer);

// Each transform reads the observed paths and returns a new SimPath.
SimPath apply_independent_noise(const SimPath& path, double xi_sq, std::uint64_t seed);
SimPath apply_grid_rounding(const SimPath& path, const GridRounding& rounding);
SimPath apply_grid_noise(const SimPath& path, double alpha, double p, std::uint64_t seed);
SimPath apply_stale_prices(const SimPath& path, double q_x, double q_y, std::uint64_t seed);
SimPath apply_jumps(const SimPath& path, const Jumps& jumps, std::uint64_t seed);

// Applies the layers in order; layer k draws from derive_seed(seed, k + 1).
SimPath apply_noise_stack(SimPath path, std::span<const NoiseLayer> layers, std::uint64_t seed);

// Independent stream seed from a base seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// alpha * floor(v / alpha), robust to v sitting exactly on the grid.
double floor_to_grid(double v, double alpha);

}  // namespace qsc
