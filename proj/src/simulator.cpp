#include "qscorr/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "qscorr/errors.hpp"

namespace qsc {

using Engine = boost::random::mt19937_64;

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void check_asset(const HestonAsset& a, const char* name) {
    const std::string who = std::string("heston asset ") + name;
    if (!(a.kappa > 0.0)) throw InputError(who + ": kappa must be positive");
    if (!(a.sigma_bar_sq > 0.0)) throw InputError(who + ": sigma_bar_sq must be positive");
    if (!(a.s_volvol >= 0.0)) throw InputError(who + ": s_volvol must be non-negative");
    if (!(std::abs(a.varrho) <= 1.0)) throw InputError(who + ": |varrho| must be <= 1");
    if (!std::isfinite(a.mu)) throw InputError(who + ": mu must be finite");
    if (a.v0 && !(*a.v0 >= 0.0)) throw InputError(who + ": v0 must be non-negative");
}

double initial_variance(const HestonAsset& a, Engine& eng) {
    if (a.v0) return *a.v0;
    if (a.s_volvol == 0.0) return a.sigma_bar_sq;
    const double s2 = a.s_volvol * a.s_volvol;
    boost::random::gamma_distribution<double> gamma(2.0 * a.kappa * a.sigma_bar_sq / s2,
                                                    s2 / (2.0 * a.kappa));
    return gamma(eng);
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double d : v) s += d;
    return s / static_cast<double>(v.size());
}

}  // namespace

void HestonSpec::validate() const {
    check_asset(x, "x");
    check_asset(y, "y");
    if (!(std::abs(rho) <= 1.0)) throw InputError("heston: |rho| must be <= 1");
    if (N < 1) throw InputError("heston: N must be >= 1");
    if (!(horizon > 0.0)) throw InputError("heston: horizon must be positive");
}

HestonSpec table1_spec(double rho) {
    HestonSpec s;
    s.x = {0.05, 0.16, 3.0, 0.8, -0.60, std::nullopt};
    s.y = {0.03, 0.09, 2.0, 0.5, -0.75, std::nullopt};
    s.rho = rho;
    return s;
}

SimPath simulate_heston(const HestonSpec& spec, std::uint64_t seed) {
    spec.validate();
    Engine eng(seed);
    boost::random::normal_distribution<double> normal;

    const std::size_t N = spec.N;
    const double dt = spec.horizon / static_cast<double>(N);
    const double cr = std::sqrt(1.0 - spec.rho * spec.rho);
    const double cx = std::sqrt(1.0 - spec.x.varrho * spec.x.varrho);
    const double cy = std::sqrt(1.0 - spec.y.varrho * spec.y.varrho);

    std::vector<double> xs(N + 1), ys(N + 1), vx(N + 1), vy(N + 1);
    double v_x = initial_variance(spec.x, eng);
    double v_y = initial_variance(spec.y, eng);
    xs[0] = spec.x0;
    ys[0] = spec.y0;
    vx[0] = v_x;
    vy[0] = v_y;

    for (std::size_t j = 1; j <= N; ++j) {
        const double e1 = normal(eng), e2 = normal(eng), e3 = normal(eng), e4 = normal(eng);
        const double wx = e1;
        const double wy = spec.rho * e1 + cr * e2;
        const double bx = spec.x.varrho * wx + cx * e3;
        const double by = spec.y.varrho * wy + cy * e4;

        // full truncation: the floored variance drives both diffusion and drift
        const double px = std::max(v_x, 0.0), py = std::max(v_y, 0.0);
        const double sx = std::sqrt(px * dt), sy = std::sqrt(py * dt);
        xs[j] = xs[j - 1] + spec.x.mu * dt + sx * wx;
        ys[j] = ys[j - 1] + spec.y.mu * dt + sy * wy;
        v_x += spec.x.kappa * (spec.x.sigma_bar_sq - px) * dt + spec.x.s_volvol * sx * bx;
        v_y += spec.y.kappa * (spec.y.sigma_bar_sq - py) * dt + spec.y.s_volvol * sy * by;
        vx[j] = std::max(v_x, 0.0);
        vy[j] = std::max(v_y, 0.0);
    }

    SimPath p;
    p.latent_x = SampledPath(xs);
    p.latent_y = SampledPath(ys);
    p.observed_x = p.latent_x;
    p.observed_y = p.latent_y;
    p.spot_var_x = std::move(vx);
    p.spot_var_y = std::move(vy);
    p.seed = seed;
    return p;
}

SimPath simulate_brownian_semimartingale(const std::function<double(double)>& sigma_x,
                                         const std::function<double(double)>& sigma_y,
                                         const std::function<double(double)>& rho, std::size_t N,
                                         std::uint64_t seed) {
    if (!sigma_x || !sigma_y || !rho) throw InputError("semimartingale: missing coefficient path");
    if (N < 1) throw InputError("semimartingale: N must be >= 1");
    Engine eng(seed);
    boost::random::normal_distribution<double> normal;
    const double dN = static_cast<double>(N);
    const double sdt = std::sqrt(1.0 / dN);

    std::vector<double> xs(N + 1), ys(N + 1), vx(N + 1), vy(N + 1);
    xs[0] = std::log(100.0);
    ys[0] = std::log(40.0);
    vx[0] = sigma_x(0.0) * sigma_x(0.0);
    vy[0] = sigma_y(0.0) * sigma_y(0.0);
    for (std::size_t j = 1; j <= N; ++j) {
        const double u = (static_cast<double>(j) - 0.5) / dN;
        const double sx = sigma_x(u), sy = sigma_y(u), r = rho(u);
        if (!(sx > 0.0) || !(sy > 0.0) || !(std::abs(r) <= 1.0))
            throw InputError("semimartingale: need positive volatilities and |rho| <= 1");
        const double e1 = normal(eng), e2 = normal(eng);
        xs[j] = xs[j - 1] + sx * sdt * e1;
        ys[j] = ys[j - 1] + sy * sdt * (r * e1 + std::sqrt(1.0 - r * r) * e2);
        vx[j] = sx * sx;
        vy[j] = sy * sy;
    }
    SimPath p;
    p.latent_x = SampledPath(xs);
    p.latent_y = SampledPath(ys);
    p.observed_x = p.latent_x;
    p.observed_y = p.latent_y;
    p.spot_var_x = std::move(vx);
    p.spot_var_y = std::move(vy);
    p.seed = seed;
    return p;
}

FactorDay simulate_one_factor_day(const std::function<double(double)>& sigma_market,
                                  std::span<const FactorAsset> assets, std::size_t N,
                                  std::uint64_t seed) {
    if (!sigma_market) throw InputError("factor day: missing market volatility");
    if (N < 1) throw InputError("factor day: N must be >= 1");
    for (const auto& a : assets)
        if (!a.rho || !a.lambda) throw InputError("factor day: asset '" + a.name + "' is incomplete");
    Engine eng(seed);
    boost::random::normal_distribution<double> normal;
    const double dN = static_cast<double>(N);
    const double sdt = std::sqrt(1.0 / dN);

    std::vector<double> m(N + 1);
    std::vector<std::vector<double>> a(assets.size(), std::vector<double>(N + 1));
    m[0] = std::log(100.0);
    for (auto& v : a) v[0] = std::log(40.0);
    for (std::size_t j = 1; j <= N; ++j) {
        const double u = (static_cast<double>(j) - 0.5) / dN;
        const double sm = sigma_market(u);
        if (!(sm > 0.0)) throw InputError("factor day: market volatility must be positive");
        const double zm = normal(eng);
        m[j] = m[j - 1] + sm * sdt * zm;
        for (std::size_t i = 0; i < assets.size(); ++i) {
            const double r = assets[i].rho(u), l = assets[i].lambda(u);
            if (!(std::abs(r) <= 1.0) || !(l > 0.0))
                throw InputError("factor day: need |rho| <= 1 and lambda > 0");
            const double z = r * zm + std::sqrt(1.0 - r * r) * normal(eng);
            a[i][j] = a[i][j - 1] + l * sm * sdt * z;
        }
    }
    FactorDay d;
    d.market = SampledPath(std::move(m));
    for (auto& v : a) d.assets.emplace_back(std::move(v));
    return d;
}

std::string layer_name(const NoiseLayer& layer) {
    struct {
        std::string operator()(const IndependentNoise&) const { return "independent_noise"; }
        std::string operator()(const GridRounding&) const { return "rounding"; }
        std::string operator()(const GridNoise&) const { return "grid_noise"; }
        std::string operator()(const StalePrices&) const { return "stale_prices"; }
        std::string operator()(const Jumps&) const { return "jumps"; }
    } v;
    return std::visit(v, layer);
}

SimPath apply_independent_noise(const SimPath& path, double xi_sq, std::uint64_t seed) {
    if (!(xi_sq >= 0.0)) throw InputError("independent noise: xi_sq must be non-negative");
    SimPath out = path;
    if (xi_sq == 0.0) return out;
    Engine eng(seed);
    boost::random::normal_distribution<double> normal;
    auto perturb = [&](std::vector<double>& v, const std::vector<double>& spot) {
        double quarticity = 0.0;
        for (std::size_t i = 1; i < spot.size(); ++i) quarticity += spot[i] * spot[i];
        quarticity /= static_cast<double>(spot.size() - 1);
        const double omega = std::sqrt(xi_sq * std::sqrt(quarticity));
        for (double& d : v) d += omega * normal(eng);
    };
    perturb(out.observed_x.values, path.spot_var_x);
    perturb(out.observed_y.values, path.spot_var_y);
    return out;
}

double floor_to_grid(double v, double alpha) {
    double k = std::floor(v / alpha);
    // v / alpha can round across an integer; settle on the true floor
    if ((k + 1.0) * alpha <= v) k += 1.0;
    if (k * alpha > v) k -= 1.0;
    return k * alpha;
}

SimPath apply_grid_rounding(const SimPath& path, const GridRounding& rounding) {
    auto resolve = [&](const std::vector<double>& spot) {
        if (!rounding.proportional_c) return rounding.alpha;
        const double mean_var = mean_of(std::span(spot).subspan(1));
        return *rounding.proportional_c * std::sqrt(mean_var);
    };
    const double ax = resolve(path.spot_var_x), ay = resolve(path.spot_var_y);
    if (!(ax > 0.0) || !(ay > 0.0)) throw InputError("grid rounding: alpha must be positive");
    SimPath out = path;
    for (double& d : out.observed_x.values) d = floor_to_grid(d, ax);
    for (double& d : out.observed_y.values) d = floor_to_grid(d, ay);
    return out;
}

SimPath apply_grid_noise(const SimPath& path, double alpha, double p, std::uint64_t seed) {
    if (!(alpha > 0.0)) throw InputError("grid noise: alpha must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("grid noise: p must lie in [0, 1]");
    SimPath out = path;
    if (p == 0.0) return out;
    Engine eng(seed);
    boost::random::uniform_01<double> unif;
    auto displace = [&](std::vector<double>& v) {
        for (double& d : v) {
            const double u = unif(eng);
            if (u < 0.5 * p)
                d -= alpha;
            else if (u < p)
                d += alpha;
        }
    };
    displace(out.observed_x.values);
    displace(out.observed_y.values);
    return out;
}

SimPath apply_stale_prices(const SimPath& path, double q_x, double q_y, std::uint64_t seed) {
    if (!(q_x >= 0.0 && q_x <= 1.0) || !(q_y >= 0.0 && q_y <= 1.0))
        throw InputError("stale prices: probabilities must lie in [0, 1]");
    SimPath out = path;
    Engine eng(seed);
    boost::random::uniform_01<double> unif;
    auto stale = [&](std::vector<double>& v, double q) {
        for (std::size_t j = 1; j < v.size(); ++j)
            if (unif(eng) < q) v[j] = v[j - 1];
    };
    stale(out.observed_x.values, q_x);
    stale(out.observed_y.values, q_y);
    return out;
}

SimPath apply_jumps(const SimPath& path, const Jumps& jumps, std::uint64_t seed) {
    if (!(jumps.intensity_x >= 0.0) || !(jumps.intensity_y >= 0.0))
        throw InputError("jumps: intensities must be non-negative");
    if (jumps.mode == JumpMode::CoJump && jumps.intensity_x != jumps.intensity_y)
        throw InputError("jumps: co-jumps need equal intensities");
    SimPath out = path;
    const std::size_t N = path.observed_x.N;
    Engine eng(seed);
    boost::random::uniform_01<double> unif;
    boost::random::uniform_int_distribution<std::size_t> when(1, N);

    struct Jump {
        std::size_t at;
        double size;
    };
    auto draw = [&](double lambda) {
        std::vector<Jump> js;
        if (lambda == 0.0) return js;
        boost::random::poisson_distribution<int, double> count(lambda);
        const int n = count(eng);
        const double lo = 1.0 / std::sqrt(2.0 * lambda);
        for (int i = 0; i < n; ++i) {
            const std::size_t at = when(eng);
            const double mag = lo * (1.0 + unif(eng));
            js.push_back({at, unif(eng) < 0.5 ? -mag : mag});
        }
        return js;
    };
    auto add = [](std::vector<double>& v, const std::vector<Jump>& js) {
        for (const Jump& j : js)
            for (std::size_t k = j.at; k < v.size(); ++k) v[k] += j.size;
    };

    if (jumps.mode == JumpMode::CoJump) {
        const auto js = draw(jumps.intensity_x);
        add(out.observed_x.values, js);
        add(out.observed_y.values, js);
    } else {
        add(out.observed_x.values, draw(jumps.intensity_x));
        add(out.observed_y.values, draw(jumps.intensity_y));
    }
    return out;
}

SimPath apply_noise_stack(SimPath path, std::span<const NoiseLayer> layers, std::uint64_t seed) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const std::uint64_t s = derive_seed(seed, k + 1);
        const NoiseLayer& layer = layers[k];
        if (const auto* n = std::get_if<IndependentNoise>(&layer))
            path = apply_independent_noise(path, n->xi_sq, s);
        else if (const auto* r = std::get_if<GridRounding>(&layer))
            path = apply_grid_rounding(path, *r);
        else if (const auto* g = std::get_if<GridNoise>(&layer))
            path = apply_grid_noise(path, g->alpha, g->p, s);
        else if (const auto* st = std::get_if<StalePrices>(&layer))
            path = apply_stale_prices(path, st->q_x, st->q_y, s);
        else if (const auto* j = std::get_if<Jumps>(&layer))
            path = apply_jumps(path, *j, s);
    }
    return path;
}

}  // namespace qsc
