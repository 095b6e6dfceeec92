#include "qscorr/intraday.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qscorr/errors.hpp"
#include "qscorr/estimators.hpp"
#include "qscorr/kernels.hpp"

namespace qsc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> overlapping(std::span<const double> v, std::size_t S) {
    std::vector<double> r(v.size() - S);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = v[k + S] - v[k];
    return r;
}

}  // namespace

void RollingConfig::validate() const {
    if (S < 1 || S > W || W > N) throw InputError("rolling config: need 1 <= S <= W <= N");
    if (step < 1) throw InputError("rolling config: step must be >= 1");
    if (W / S < 2) throw InputError("rolling config: window must hold at least two span-S returns");
}

double bipower_variation(std::span<const double> values, std::size_t S) {
    const std::vector<double> r = sparse_returns(values, S, 0);
    if (r.size() < 2) throw InputError("bipower_variation: need at least two returns");
    double s = 0.0;
    for (std::size_t j = 1; j < r.size(); ++j) s += std::abs(r[j]) * std::abs(r[j - 1]);
    return 0.5 * std::numbers::pi * s;
}

TruncationThresholds thresholds(const SampledPath& market, const SampledPath& asset, std::size_t S) {
    if (market.N != asset.N) throw InputError("thresholds: paths differ in N");
    TruncationThresholds t;
    t.bv_x = bipower_variation(market.values, S);
    t.bv_y = bipower_variation(asset.values, S);
    const double n = static_cast<double>(market.N / S);
    const double scale = 4.0 / std::pow(n, 0.49);
    t.nu_x = scale * std::sqrt(t.bv_x);
    t.nu_y = scale * std::sqrt(t.bv_y);
    return t;
}

double relative_volatility(std::span<const double> asset_returns,
                           std::span<const double> market_returns, double nu_asset,
                           double nu_market, LambdaAggregation agg) {
    if (asset_returns.size() != market_returns.size())
        throw InputError("relative_volatility: return series differ in length");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < asset_returns.size(); ++i) {
        const double a = truncate(asset_returns[i], nu_asset);
        const double m = truncate(market_returns[i], nu_market);
        num += agg == LambdaAggregation::Absolute ? std::abs(a) : a;
        den += agg == LambdaAggregation::Absolute ? std::abs(m) : m;
    }
    if (den == 0.0) throw DegenerateInputError("relative_volatility: zero market aggregate");
    return num / den;
}

double beta_regression(std::span<const double> asset_returns, std::span<const double> market_returns,
                       double nu_asset, double nu_market) {
    if (asset_returns.size() != market_returns.size())
        throw InputError("beta_regression: return series differ in length");
    double am = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < asset_returns.size(); ++i) {
        const double a = truncate(asset_returns[i], nu_asset);
        const double m = truncate(market_returns[i], nu_market);
        am += a * m;
        mm += m * m;
    }
    if (mm == 0.0) throw DegenerateInputError("beta_regression: zero market quadratic variation");
    return am / mm;
}

IntradayCurves rolling_curves(const SampledPath& asset, const SampledPath& market,
                              const RollingConfig& cfg, LambdaAggregation agg) {
    cfg.validate();
    asset.validate();
    market.validate();
    if (asset.N != market.N || asset.N != cfg.N)
        throw InputError("rolling_curves: paths must both have N = cfg.N");
    const std::size_t N = cfg.N, W = cfg.W, S = cfg.S;

    const TruncationThresholds nu = thresholds(market, asset, S);
    const std::vector<double> ra = overlapping(asset.values, S);
    const std::vector<double> rm = overlapping(market.values, S);
    const std::size_t R = ra.size();  // return k ends at base index k + S

    // prefix sums: sign counts for Q_S, aggregated truncated returns for lambda
    std::vector<std::int64_t> pos(R + 1, 0), neg(R + 1, 0);
    std::vector<double> agg_a(R + 1, 0.0), agg_m(R + 1, 0.0);
    for (std::size_t k = 0; k < R; ++k) {
        const int s = sign_product(ra[k], rm[k]);
        pos[k + 1] = pos[k] + (s > 0);
        neg[k + 1] = neg[k] + (s < 0);
        const double a = truncate(ra[k], nu.nu_y), m = truncate(rm[k], nu.nu_x);
        agg_a[k + 1] = agg_a[k] + (agg == LambdaAggregation::Absolute ? std::abs(a) : a);
        agg_m[k + 1] = agg_m[k] + (agg == LambdaAggregation::Absolute ? std::abs(m) : m);
    }

    const std::size_t n_sparse = W / S;
    std::vector<double> sa(n_sparse), sm(n_sparse);

    IntradayCurves c;
    const std::size_t points = (N - W) / cfg.step + 1;
    for (auto* v : {&c.eval_times, &c.rho_P, &c.rho_K, &c.rho_QS, &c.lambda, &c.beta_P, &c.beta_K,
                    &c.beta_QS, &c.beta_reg})
        v->reserve(points);

    for (std::size_t e = W; e <= N; e += cfg.step) {
        const std::size_t k_lo = e - W, k_hi = e - S + 1;  // returns k in [k_lo, k_hi)
        SignCounts counts;
        counts.positive = pos[k_hi] - pos[k_lo];
        counts.negative = neg[k_hi] - neg[k_lo];
        counts.zero = static_cast<std::int64_t>(k_hi - k_lo) - counts.positive - counts.negative;

        double rho_qs = kNaN, lam = kNaN, rho_p = kNaN, rho_k = kNaN, breg = kNaN;
        if (counts.nonzero() > 0) rho_qs = zero_aware_from_counts(counts, S).rho_hat;
        const double den = agg_m[k_hi] - agg_m[k_lo];
        if (den != 0.0) lam = (agg_a[k_hi] - agg_a[k_lo]) / den;

        for (std::size_t i = 0; i < n_sparse; ++i) {
            const std::size_t k = e - S - i * S;
            sa[i] = ra[k];
            sm[i] = rm[k];
        }
        try {
            rho_p = pearson(sa, sm).rho_hat;
        } catch (const DegenerateInputError&) {
        }
        rho_k = kendall_tau(sa, sm).rho_hat;
        try {
            breg = beta_regression(sa, sm, nu.nu_y, nu.nu_x);
        } catch (const DegenerateInputError&) {
        }

        c.eval_times.push_back(static_cast<double>(e) / static_cast<double>(N));
        c.rho_P.push_back(rho_p);
        c.rho_K.push_back(rho_k);
        c.rho_QS.push_back(rho_qs);
        c.lambda.push_back(lam);
        c.beta_P.push_back(rho_p * lam);
        c.beta_K.push_back(rho_k * lam);
        c.beta_QS.push_back(rho_qs * lam);
        c.beta_reg.push_back(breg);
    }
    return c;
}

namespace {

constexpr std::vector<double> IntradayCurves::*kCurveFields[] = {
    &IntradayCurves::rho_P,  &IntradayCurves::rho_K,  &IntradayCurves::rho_QS,
    &IntradayCurves::lambda, &IntradayCurves::beta_P, &IntradayCurves::beta_K,
    &IntradayCurves::beta_QS, &IntradayCurves::beta_reg};

}  // namespace

void CurveAccumulator::add(const IntradayCurves& day) {
    const std::size_t n = day.size();
    if (days_ == 0) {
        eval_times_ = day.eval_times;
        sums_.assign(std::size(kCurveFields), std::vector<double>(n, 0.0));
        counts_.assign(std::size(kCurveFields), std::vector<std::size_t>(n, 0));
    } else if (n != eval_times_.size()) {
        throw InputError("curve accumulator: days differ in curve length");
    }
    for (std::size_t f = 0; f < std::size(kCurveFields); ++f) {
        const auto& v = day.*kCurveFields[f];
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isnan(v[i])) continue;
            sums_[f][i] += v[i];
            ++counts_[f][i];
        }
    }
    ++days_;
}

IntradayCurves CurveAccumulator::mean() const {
    if (days_ == 0) throw InputError("curve accumulator: no days");
    IntradayCurves c;
    c.eval_times = eval_times_;
    for (std::size_t f = 0; f < std::size(kCurveFields); ++f) {
        auto& out = c.*kCurveFields[f];
        out.resize(eval_times_.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = counts_[f][i] ? sums_[f][i] / static_cast<double>(counts_[f][i]) : kNaN;
    }
    return c;
}

IntradayCurves average_curves(std::span<const IntradayCurves> days) {
    if (days.empty()) throw InputError("average_curves: no days");
    CurveAccumulator acc;
    for (const auto& d : days) acc.add(d);
    return acc.mean();
}

BetaDecomposition decompose_beta(double rho_first, double lambda_first, double rho_last,
                                 double lambda_last) {
    if (!(rho_first > 0.0) || !(rho_last > 0.0))
        throw DegenerateInputError("decompose_beta: correlation must be positive in both windows");
    if (!(lambda_first > 0.0) || !(lambda_last > 0.0))
        throw DegenerateInputError("decompose_beta: relative volatility must be positive");
    BetaDecomposition d;
    d.delta_log_rho = std::log(rho_last) - std::log(rho_first);
    d.delta_log_lambda = std::log(lambda_last) - std::log(lambda_first);
    d.delta_log_beta = std::log(rho_last * lambda_last) - std::log(rho_first * lambda_first);
    return d;
}

BetaDecomposition decompose_beta(const IntradayCurves& curves) {
    if (curves.size() == 0) throw InputError("decompose_beta: empty curves");
    const std::size_t last = curves.size() - 1;
    return decompose_beta(curves.rho_QS[0], curves.lambda[0], curves.rho_QS[last],
                          curves.lambda[last]);
}

double low_frequency_beta(std::span<const double> asset, std::span<const double> market) {
    if (asset.size() != market.size()) throw InputError("low_frequency_beta: lengths differ");
    if (asset.size() < 2) throw InputError("low_frequency_beta: need at least two days");
    const double n = static_cast<double>(asset.size());
    double ma = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < asset.size(); ++i) {
        ma += asset[i];
        mm += market[i];
    }
    ma /= n;
    mm /= n;
    double sam = 0.0, smm = 0.0;
    for (std::size_t i = 0; i < asset.size(); ++i) {
        sam += (asset[i] - ma) * (market[i] - mm);
        smm += (market[i] - mm) * (market[i] - mm);
    }
    if (smm == 0.0) throw DegenerateInputError("low_frequency_beta: zero market variance");
    return sam / smm;
}

}  // namespace qsc
