#include "qscorr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qscorr/errors.hpp"
#include "qscorr/normal.hpp"

namespace qsc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPiSq = 0.25 * kPi * kPi;  // asin(1)^2

void check_open(double rho, const char* who) {
    if (!(std::abs(rho) < 1.0)) throw InputError(std::string(who) + ": need |rho| < 1");
}

void check_closed(double v, const char* who) {
    if (!(std::abs(v) <= 1.0)) throw InputError(std::string(who) + ": argument outside [-1, 1]");
}

double asin_sq(double w) {
    if (w == 1.0 || w == -1.0) return kHalfPiSq;
    const double a = std::asin(w);
    return a * a;
}

// ((1 - r^2)^{1/2} / r) asin r, continuous at r = 0.
double damped_asin_ratio(double r) {
    if (std::abs(r) < 1e-4) {
        const double r2 = r * r;
        return 1.0 - r2 / 3.0 - 2.0 * r2 * r2 / 15.0;
    }
    return std::sqrt(1.0 - r * r) / r * std::asin(r);
}

template <class F>
double integrate_unit(F f, double tol, const char* what) {
    double err = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-12, &err);
    if (!(err <= tol) || !std::isfinite(v))
        throw NumericalError(std::string(what) + ": quadrature error estimate " + std::to_string(err) +
                             " above tolerance " + std::to_string(tol));
    return v;
}

}  // namespace

double avar_pearson(double rho) {
    check_open(rho, "avar_pearson");
    const double c = 1.0 - rho * rho;
    return c * c;
}

double avar_kendall(double rho) {
    check_open(rho, "avar_kendall");
    const double a = std::asin(0.5 * rho);
    return (1.0 - rho * rho) * (kPi * kPi / 9.0 - 4.0 * a * a);
}

double avar_quadrant(double rho) {
    check_open(rho, "avar_quadrant");
    return (1.0 - rho * rho) * (kHalfPiSq - asin_sq(rho));
}

double avar_subsampled(double rho, std::size_t S) {
    check_open(rho, "avar_subsampled");
    if (S < 1) throw InputError("avar_subsampled: S must be >= 1");
    // s = 0 term, then the symmetric pairs; |s| = S has weight zero
    double sum = kHalfPiSq - asin_sq(rho);
    const double dS = static_cast<double>(S);
    for (std::size_t s = 1; s < S; ++s) {
        const double w = static_cast<double>(S - s) / dS;
        sum += 2.0 * (asin_sq(w) - asin_sq(w * rho));
    }
    return (1.0 - rho * rho) * sum / dS;
}

double avar_subsampled_limit(double rho) {
    check_open(rho, "avar_subsampled_limit");
    return (1.0 - rho * rho) * 2.0 * (kHalfPiSq - 2.0 * damped_asin_ratio(rho) - asin_sq(rho));
}

AsymVarCurve avar_curve(EstimatorKind kind, std::vector<double> rho_grid, std::size_t S) {
    AsymVarCurve c;
    c.kind = kind;
    c.S = kind == EstimatorKind::SubsampledQuadrant ? S : 1;
    c.variance.reserve(rho_grid.size());
    for (double r : rho_grid) {
        switch (kind) {
            case EstimatorKind::Pearson: c.variance.push_back(avar_pearson(r)); break;
            case EstimatorKind::Kendall: c.variance.push_back(avar_kendall(r)); break;
            case EstimatorKind::Quadrant: c.variance.push_back(avar_quadrant(r)); break;
            case EstimatorKind::SubsampledQuadrant:
                c.variance.push_back(S == 0 ? avar_subsampled_limit(r) : avar_subsampled(r, S));
                break;
        }
    }
    c.rho_grid = std::move(rho_grid);
    return c;
}

double quadrant_prob(double rho) {
    check_closed(rho, "quadrant_prob");
    return 0.25 + std::asin(rho) / (2.0 * kPi);
}

double orthant_G(double rho, double omega) {
    check_closed(rho, "orthant_G");
    check_closed(omega, "orthant_G");
    const double ar = std::asin(rho), aw = std::asin(omega), awr = std::asin(omega * rho);
    return 1.0 / 16.0 + (ar + aw + awr) / (4.0 * kPi) +
           (ar * ar + aw * aw - awr * awr) / (4.0 * kPi * kPi);
}

double sign_product_cov(double rho, double omega) {
    check_closed(rho, "sign_product_cov");
    check_closed(omega, "sign_product_cov");
    return (asin_sq(omega) - asin_sq(omega * rho)) / (kPi * kPi);
}

VolPathSpec VolPathSpec::from_functions(std::function<double(double)> sx,
                                        std::function<double(double)> sy) {
    VolPathSpec s;
    s.sigma_x = std::move(sx);
    s.sigma_y = std::move(sy);
    s.validate();
    return s;
}

VolPathSpec VolPathSpec::from_table(std::vector<double> tx, std::vector<double> ty) {
    VolPathSpec s;
    s.table_x = std::move(tx);
    s.table_y = std::move(ty);
    s.validate();
    return s;
}

void VolPathSpec::validate() const {
    if (tabulated()) {
        if (table_x.size() != table_y.size()) throw InputError("vol table: sizes differ");
        for (std::size_t i = 0; i < table_x.size(); ++i)
            if (!(table_x[i] > 0.0) || !(table_y[i] > 0.0) || !std::isfinite(table_x[i]) ||
                !std::isfinite(table_y[i]))
                throw InputError("vol table: volatilities must be positive and finite");
        return;
    }
    if (!sigma_x || !sigma_y) throw InputError("vol spec: both volatility paths are required");
    // spot check positivity on a coarse grid; quadrature will find the rest
    for (int i = 0; i <= 64; ++i) {
        const double u = i / 64.0;
        if (!(sigma_x(u) > 0.0) || !(sigma_y(u) > 0.0))
            throw InputError("vol spec: volatilities must be positive on [0, 1]");
    }
}

namespace {

double g_design(double u) { return 0.2 + 0.8 * u; }
double h_design(double u) { return 0.5 * (1.2 + std::cos(2.0 * kPi * u)); }

double h_kernel(double sxu, double syu, double sxv, double syv) {
    return (sxu * syu + sxv * syv) / (std::sqrt(sxu * sxu + sxv * sxv) * std::sqrt(syu * syu + syv * syv));
}

}  // namespace

VolPathSpec low_collinearity_design() { return VolPathSpec::from_functions(g_design, h_design); }

VolPathSpec high_collinearity_design() {
    return VolPathSpec::from_functions([](double u) { return 0.3 * g_design(u) + 0.6 * h_design(u); },
                                       h_design);
}

PlimResult plim_under_tv_vol(const VolPathSpec& spec, double rho) {
    spec.validate();
    check_closed(rho, "plim_under_tv_vol");
    PlimResult r;
    r.qs_plim = rho;

    if (spec.tabulated()) {
        const auto& tx = spec.table_x;
        const auto& ty = spec.table_y;
        const std::size_t M = tx.size();
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            sxy += tx[i] * ty[i];
            sxx += tx[i] * tx[i];
            syy += ty[i] * ty[i];
        }
        r.lambda_factor = sxy / std::sqrt(sxx * syy);
        double k = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j)
                k += std::asin(std::clamp(h_kernel(tx[i], ty[i], tx[j], ty[j]), -1.0, 1.0) * rho);
        r.kendall_plim = std::sin(k / (static_cast<double>(M) * static_cast<double>(M)));
    } else {
        const auto& sx = spec.sigma_x;
        const auto& sy = spec.sigma_y;
        const double ixy = integrate_unit([&](double u) { return sx(u) * sy(u); }, 1e-8, "lambda");
        const double ixx = integrate_unit([&](double u) { return sx(u) * sx(u); }, 1e-8, "lambda");
        const double iyy = integrate_unit([&](double u) { return sy(u) * sy(u); }, 1e-8, "lambda");
        r.lambda_factor = ixy / std::sqrt(ixx * iyy);

        auto inner = [&](double u) {
            const double sxu = sx(u), syu = sy(u);
            return integrate_unit(
                [&](double v) {
                    return std::asin(std::clamp(h_kernel(sxu, syu, sx(v), sy(v)), -1.0, 1.0) * rho);
                },
                1e-8, "kendall plim (inner)");
        };
        r.kendall_plim = std::sin(integrate_unit(inner, 1e-6, "kendall plim"));
    }
    r.pearson_plim = r.lambda_factor * rho;
    return r;
}

double plim_qs_tv_corr(const std::function<double(double)>& rho_path) {
    if (!rho_path) throw InputError("plim_qs_tv_corr: empty correlation path");
    const double a = integrate_unit(
        [&](double u) {
            const double r = rho_path(u);
            if (!(std::abs(r) <= 1.0)) throw InputError("plim_qs_tv_corr: |rho(u)| > 1");
            return std::asin(r);
        },
        1e-8, "time-varying correlation plim");
    return std::sin(a);
}

namespace {

// Pr[(X - a)(Y - b) > 0] - Pr[XY > 0] under Phi_rho.
double concordance_shift(double a, double b, double rho) {
    const double p = 2.0 * bvn_cdf(a, b, rho) + 1.0 - norm_cdf(a) - norm_cdf(b);
    return p - 2.0 * quadrant_prob(rho);
}

double sgn(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

}  // namespace

InfluenceValue influence(EstimatorKind kind, double x0, double y0, double rho, std::size_t S,
                         const InfluenceOptions& options) {
    check_open(rho, "influence");
    if (S < 1) throw InputError("influence: S must be >= 1");
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw InputError("influence: point must be finite");

    InfluenceValue iv{kind, x0, y0, rho, S, 0.0};
    const double root = std::sqrt(1.0 - rho * rho);
    const double tau = 2.0 / kPi * std::asin(rho);
    const double dS = static_cast<double>(S);

    switch (kind) {
        case EstimatorKind::Pearson:
            iv.value = x0 * y0 - 0.5 * rho * (x0 * x0 + y0 * y0);
            break;
        case EstimatorKind::Quadrant:
        case EstimatorKind::SubsampledQuadrant: {
            const double scale = options.quadrant_scale == SparseQuadrantScale::SqrtSMinus1
                                     ? std::sqrt(dS - 1.0)
                                     : std::sqrt(2.0 * dS - 1.0);
            if (scale == 0.0)
                iv.value = 0.5 * kPi * root * (sgn(x0) * sgn(y0) - tau);
            else
                iv.value = kPi * root * dS * concordance_shift(x0 / scale, y0 / scale, rho);
            break;
        }
        case EstimatorKind::Kendall: {
            const double scale = std::sqrt(2.0 * dS - 1.0);
            iv.value = 2.0 * kPi * root * dS * concordance_shift(x0 / scale, y0 / scale, rho);
            break;
        }
    }
    return iv;
}

}  // namespace qsc
