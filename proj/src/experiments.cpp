#include "qscorr/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "qscorr/errors.hpp"
#include "qscorr/estimators.hpp"
#include "qscorr/kernels.hpp"
#include "qscorr/manifest.hpp"
#include "qscorr/theory.hpp"

#ifndef QSCORR_VERSION
#define QSCORR_VERSION "unknown"
#endif

namespace qsc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- config helpers -------------------------------------------------------

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            throw InputError(where + ": unknown key '" + k + "'");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config key '") + key + "': " + e.what());
    }
}

void parse_rho_grid(const json& j, double& lo, double& hi, double& step) {
    lo = get_or(j, "rho_min", lo);
    hi = get_or(j, "rho_max", hi);
    step = get_or(j, "rho_step", step);
    if (!(step > 0.0) || !(lo <= hi) || !(lo > -1.0) || !(hi < 1.0))
        throw InputError("rho grid: need -1 < rho_min <= rho_max < 1 and rho_step > 0");
}

std::vector<double> rho_grid(double lo, double hi, double step) {
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
    return g;
}

HestonAsset parse_asset(const json& j, HestonAsset a, const std::string& where) {
    allow_keys(j, {"mu", "sigma_bar_sq", "kappa", "s_volvol", "varrho", "v0"}, where);
    a.mu = get_or(j, "mu", a.mu);
    a.sigma_bar_sq = get_or(j, "sigma_bar_sq", a.sigma_bar_sq);
    a.kappa = get_or(j, "kappa", a.kappa);
    a.s_volvol = get_or(j, "s_volvol", a.s_volvol);
    a.varrho = get_or(j, "varrho", a.varrho);
    if (j.contains("v0")) a.v0 = j.at("v0").get<double>();
    return a;
}

HestonSpec parse_scenario(const json& j) {
    allow_keys(j, {"preset", "rho", "N", "horizon", "x0", "y0", "x", "y"}, "scenario");
    const std::string preset = get_or<std::string>(j, "preset", "table1");
    if (preset != "table1") throw InputError("scenario: unknown preset '" + preset + "'");
    HestonSpec s = table1_spec(get_or(j, "rho", 0.25));
    s.N = get_or<std::size_t>(j, "N", s.N);
    s.horizon = get_or(j, "horizon", s.horizon);
    s.x0 = get_or(j, "x0", s.x0);
    s.y0 = get_or(j, "y0", s.y0);
    if (j.contains("x")) s.x = parse_asset(j.at("x"), s.x, "scenario.x");
    if (j.contains("y")) s.y = parse_asset(j.at("y"), s.y, "scenario.y");
    s.validate();
    return s;
}

JumpMode parse_mode(const std::string& m) {
    if (m == "independent") return JumpMode::Independent;
    if (m == "co_jump") return JumpMode::CoJump;
    throw InputError("jump mode must be 'independent' or 'co_jump', got '" + m + "'");
}

std::string mode_name(JumpMode m) { return m == JumpMode::CoJump ? "co_jump" : "independent"; }

NoiseLayer parse_layer(const json& j) {
    const std::string type = get_or<std::string>(j, "type", "");
    if (type == "independent_noise") {
        allow_keys(j, {"type", "xi_sq"}, "noise layer");
        return IndependentNoise{get_or(j, "xi_sq", 0.001)};
    }
    if (type == "rounding") {
        allow_keys(j, {"type", "alpha", "proportional_c"}, "noise layer");
        GridRounding r;
        r.alpha = get_or(j, "alpha", r.alpha);
        if (j.contains("proportional_c")) r.proportional_c = j.at("proportional_c").get<double>();
        return r;
    }
    if (type == "grid_noise") {
        allow_keys(j, {"type", "alpha", "p"}, "noise layer");
        return GridNoise{get_or(j, "alpha", 1e-4), get_or(j, "p", 0.75)};
    }
    if (type == "stale_prices") {
        allow_keys(j, {"type", "q_x", "q_y"}, "noise layer");
        return StalePrices{get_or(j, "q_x", 0.5), get_or(j, "q_y", 0.8)};
    }
    if (type == "jumps") {
        allow_keys(j, {"type", "intensity_x", "intensity_y", "mode"}, "noise layer");
        return Jumps{get_or(j, "intensity_x", 1.0), get_or(j, "intensity_y", 1.0),
                     parse_mode(get_or<std::string>(j, "mode", "independent"))};
    }
    throw InputError("noise layer: unknown type '" + type + "'");
}

std::vector<double> parse_deltas(const json& j, const char* key) {
    auto d = get_or(j, key, kDefaultDeltaGrid);
    if (d.empty()) throw InputError(std::string(key) + ": empty sampling-interval grid");
    for (double v : d) intervals_for_delta(kDefaultDayLength, v);
    return d;
}

void parse_signature_fields(const json& j, SignatureConfig& c) {
    if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario"));
    if (j.contains("noise")) {
        c.noise.clear();
        for (const auto& l : j.at("noise")) c.noise.push_back(parse_layer(l));
    }
    c.delta_grid = parse_deltas(j, "delta_grid");
    c.replications = get_or<std::size_t>(j, "replications", c.replications);
    c.base_seed = get_or<std::uint64_t>(j, "base_seed", c.base_seed);
    if (c.replications < 1) throw InputError("replications must be >= 1");
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

// ---- output helpers -------------------------------------------------------

class CsvWriter {
public:
    explicit CsvWriter(std::string header) { text_ << header << '\n'; }

    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((text_ << (first ? "" : ",") << cell(cells), first = false), ...);
        text_ << '\n';
    }

    void save(const fs::path& file, ExperimentOutput& out) const {
        write_text_file(file, text_.str());
        out.files.push_back(file);
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(std::size_t v) { return std::to_string(v); }

    std::ostringstream text_;
};

struct MeanRmse {
    double mean = kNaN;
    double rmse = kNaN;
    double sd = kNaN;
    std::size_t n = 0;
};

MeanRmse summarize(const std::vector<double>& v, double truth) {
    MeanRmse m;
    double s = 0.0, se = 0.0;
    for (double x : v) {
        if (std::isnan(x)) continue;
        s += x;
        se += (x - truth) * (x - truth);
        ++m.n;
    }
    if (m.n == 0) return m;
    const double n = static_cast<double>(m.n);
    m.mean = s / n;
    m.rmse = std::sqrt(se / n);
    double ss = 0.0;
    for (double x : v)
        if (!std::isnan(x)) ss += (x - m.mean) * (x - m.mean);
    m.sd = m.n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return m;
}

// Replications in parallel, gathered by index.
struct RepResults {
    std::vector<std::vector<EstimateRow>> rows;
    std::vector<std::string> errors;
};

RepResults run_replications(const SignatureConfig& cfg) {
    const auto R = static_cast<std::int64_t>(cfg.replications);
    RepResults r;
    r.rows.resize(cfg.replications);
    r.errors.resize(cfg.replications);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < R; ++i) {
        try {
            r.rows[i] = signature_replication(cfg, cfg.base_seed + static_cast<std::uint64_t>(i));
        } catch (const std::exception& e) {
            r.errors[i] = e.what();
        }
    }
    return r;
}

// An empty mode means the plain signature layout without a mode column.
void emit_signature(const SignatureConfig& cfg, const RepResults& r, const std::string& mode,
                    CsvWriter& reps, CsvWriter& summary, ExperimentOutput& out) {
    const std::string label = mode.empty() ? "" : mode + " ";
    std::map<std::pair<double, std::string>, std::vector<double>> by_cell;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (!r.errors[i].empty()) {
            out.failures.push_back(label + "rep " + std::to_string(i) + ": " + r.errors[i]);
            continue;
        }
        for (const auto& row : r.rows[i]) {
            if (mode.empty())
                reps.row(i, row.delta_seconds, row.estimator, row.value);
            else
                reps.row(mode, i, row.delta_seconds, row.estimator, row.value);
            if (std::isnan(row.value))
                out.failures.push_back(label + "rep " + std::to_string(i) + ": " + row.estimator +
                                       " undefined at delta " + format_double(row.delta_seconds));
            by_cell[{row.delta_seconds, row.estimator}].push_back(row.value);
        }
    }
    for (double d : cfg.delta_grid) {
        for (const char* est : {"P", "K", "QS"}) {
            const auto it = by_cell.find({d, est});
            const MeanRmse m = it == by_cell.end() ? MeanRmse{} : summarize(it->second, cfg.scenario.rho);
            if (mode.empty())
                summary.row(d, est, m.mean, m.rmse, m.sd, m.n);
            else
                summary.row(mode, d, est, m.mean, m.rmse, m.sd, m.n);
        }
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // shortest representation that round-trips
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---- parsing --------------------------------------------------------------

json parse_config_text(const std::string& text) {
    try {
        return json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
}

AvarConfig parse_avar(const json& j) {
    allow_keys(j, {"experiment", "rho_min", "rho_max", "rho_step", "S_values"}, "avar config");
    AvarConfig c;
    parse_rho_grid(j, c.rho_min, c.rho_max, c.rho_step);
    c.S_values = get_or(j, "S_values", c.S_values);
    for (auto s : c.S_values)
        if (s < 1) throw InputError("S_values must be >= 1");
    return c;
}

TvBiasConfig parse_tvbias(const json& j) {
    allow_keys(j, {"experiment", "rho_min", "rho_max", "rho_step"}, "tvbias config");
    TvBiasConfig c;
    parse_rho_grid(j, c.rho_min, c.rho_max, c.rho_step);
    return c;
}

SignatureConfig parse_signature(const json& j) {
    allow_keys(j, {"experiment", "scenario", "noise", "delta_grid", "replications", "base_seed"},
               "signature config");
    SignatureConfig c;
    parse_signature_fields(j, c);
    return c;
}

JumpStudyConfig parse_jumps(const json& j) {
    allow_keys(j, {"experiment", "scenario", "noise", "delta_grid", "replications", "base_seed",
                   "intensity", "modes"},
               "jumps config");
    JumpStudyConfig c;
    c.base.scenario = table1_spec(2.0 / 3.0);
    c.base.delta_grid = {60};
    parse_signature_fields(j, c.base);
    c.intensity = get_or(j, "intensity", c.intensity);
    if (j.contains("modes")) {
        c.modes.clear();
        for (const auto& m : j.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
    }
    return c;
}

IntradayConfig parse_intraday(const json& j, const fs::path& base_dir) {
    allow_keys(j, {"experiment", "W", "S", "N", "step", "days", "base_seed", "market_sigma", "assets",
                   "market_control", "lambda_aggregation", "ticks", "session_open_ns"},
               "intraday config");
    IntradayConfig c;
    c.rolling.W = get_or(j, "W", c.rolling.W);
    c.rolling.S = get_or(j, "S", c.rolling.S);
    c.rolling.N = get_or(j, "N", c.rolling.N);
    c.rolling.step = get_or(j, "step", c.rolling.step);
    c.rolling.validate();
    c.days = get_or(j, "days", c.days);
    c.base_seed = get_or<std::uint64_t>(j, "base_seed", c.base_seed);
    c.market_sigma = get_or(j, "market_sigma", c.market_sigma);
    c.market_control = get_or(j, "market_control", c.market_control);
    c.session_open_ns = get_or<std::int64_t>(j, "session_open_ns", c.session_open_ns);
    const auto agg = get_or<std::string>(j, "lambda_aggregation", "absolute");
    if (agg == "absolute")
        c.lambda_aggregation = LambdaAggregation::Absolute;
    else if (agg == "signed")
        c.lambda_aggregation = LambdaAggregation::Signed;
    else
        throw InputError("lambda_aggregation must be 'absolute' or 'signed'");
    if (j.contains("assets")) {
        c.assets.clear();
        for (const auto& a : j.at("assets")) {
            allow_keys(a, {"name", "rho_start", "rho_end", "lambda_start", "lambda_end"}, "intraday asset");
            RampAsset r;
            r.name = get_or<std::string>(a, "name", "");
            if (r.name.empty() || r.name == "market")
                throw InputError("intraday asset: a non-empty name other than 'market' is required");
            r.rho_start = get_or(a, "rho_start", r.rho_start);
            r.rho_end = get_or(a, "rho_end", r.rho_end);
            r.lambda_start = get_or(a, "lambda_start", r.lambda_start);
            r.lambda_end = get_or(a, "lambda_end", r.lambda_end);
            c.assets.push_back(r);
        }
    }
    if (j.contains("ticks")) {
        const auto& t = j.at("ticks");
        allow_keys(t, {"market", "assets"}, "intraday ticks");
        c.market_ticks = resolve(base_dir, t.at("market").get<std::string>());
        for (const auto& [name, dir] : t.at("assets").items())
            c.asset_ticks[name] = resolve(base_dir, dir.get<std::string>());
        if (c.asset_ticks.empty()) throw InputError("intraday ticks: no assets listed");
    }
    if (!(c.market_sigma > 0.0)) throw InputError("market_sigma must be positive");
    if (c.days < 1) throw InputError("days must be >= 1");
    return c;
}

StatsConfig parse_stats(const json& j, const fs::path& base_dir) {
    allow_keys(j, {"experiment", "assets", "delta_grid", "session_open_ns", "day_length"}, "stats config");
    StatsConfig c;
    if (j.contains("assets"))
        for (const auto& [name, dir] : j.at("assets").items())
            c.assets[name] = resolve(base_dir, dir.get<std::string>());
    c.delta_grid = parse_deltas(j, "delta_grid");
    c.session_open_ns = get_or<std::int64_t>(j, "session_open_ns", c.session_open_ns);
    c.day_length = get_or(j, "day_length", c.day_length);
    return c;
}

// ---- experiments ------------------------------------------------------------

std::vector<EstimateRow> signature_replication(const SignatureConfig& cfg, std::uint64_t seed) {
    SimPath path = simulate_heston(cfg.scenario, derive_seed(seed, 0));
    path = apply_noise_stack(std::move(path), cfg.noise, seed);
    const auto& x = path.observed_x.values;
    const auto& y = path.observed_y.values;
    const std::size_t N = cfg.scenario.N;

    std::vector<EstimateRow> rows;
    for (double delta : cfg.delta_grid) {
        const std::size_t n = intervals_for_delta(kDefaultDayLength, delta);
        if (N % n != 0) throw InputError("sampling interval is not a multiple of the simulation step");
        const std::size_t S = N / n;
        const auto rx = sparse_returns(x, S, 0);
        const auto ry = sparse_returns(y, S, 0);

        auto guarded = [](auto&& f) {
            try {
                return f();
            } catch (const DegenerateInputError&) {
                return kNaN;
            } catch (const InputError&) {
                return kNaN;
            }
        };
        rows.push_back({delta, "P", guarded([&] { return pearson(rx, ry).rho_hat; })});
        rows.push_back({delta, "K", guarded([&] { return kendall_tau(rx, ry).rho_hat; })});
        rows.push_back(
            {delta, "QS", guarded([&] { return subsampled_quadrant_zero_aware(x, y, S).rho_hat; })});
    }
    return rows;
}

ExperimentOutput run_avar_curves(const AvarConfig& cfg, const fs::path& out) {
    ExperimentOutput o;
    CsvWriter csv("rho,estimator,S,value");
    for (double r : rho_grid(cfg.rho_min, cfg.rho_max, cfg.rho_step)) {
        csv.row(r, "P", "1", avar_pearson(r));
        csv.row(r, "K", "1", avar_kendall(r));
        csv.row(r, "Q", "1", avar_quadrant(r));
        for (std::size_t S : cfg.S_values) csv.row(r, "QS", std::to_string(S), avar_subsampled(r, S));
        csv.row(r, "QS", "inf", avar_subsampled_limit(r));
    }
    csv.save(out / "avar_curves.csv", o);
    return o;
}

ExperimentOutput run_tv_bias_curves(const TvBiasConfig& cfg, const fs::path& out) {
    ExperimentOutput o;
    const auto grid = rho_grid(cfg.rho_min, cfg.rho_max, cfg.rho_step);
    const std::pair<const char*, VolPathSpec> designs[] = {
        {"tv_bias_low_collinearity.csv", low_collinearity_design()},
        {"tv_bias_high_collinearity.csv", high_collinearity_design()}};
    for (const auto& [file, spec] : designs) {
        std::vector<PlimResult> res(grid.size());
        const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) res[i] = plim_under_tv_vol(spec, grid[i]);
        CsvWriter csv("rho,lambda,plim_P,plim_K,plim_QS,bias_P,bias_K,bias_QS");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& p = res[i];
            csv.row(grid[i], p.lambda_factor, p.pearson_plim, p.kendall_plim, p.qs_plim,
                    p.pearson_plim - grid[i], p.kendall_plim - grid[i], p.qs_plim - grid[i]);
        }
        csv.save(out / file, o);
    }
    return o;
}

ExperimentOutput run_mc_signature(const SignatureConfig& cfg, const fs::path& out) {
    ExperimentOutput o;
    o.replications = cfg.replications;
    o.base_seed = cfg.base_seed;
    const RepResults r = run_replications(cfg);
    CsvWriter reps("rep,delta_seconds,estimator,value");
    CsvWriter summary("delta_seconds,estimator,mean,rmse,sd,n");
    emit_signature(cfg, r, "", reps, summary, o);
    reps.save(out / "signature_reps.csv", o);
    summary.save(out / "signature_summary.csv", o);
    return o;
}

ExperimentOutput run_jump_study(const JumpStudyConfig& cfg, const fs::path& out) {
    ExperimentOutput o;
    o.replications = cfg.base.replications;
    o.base_seed = cfg.base.base_seed;
    CsvWriter reps("mode,rep,delta_seconds,estimator,value");
    CsvWriter summary("mode,delta_seconds,estimator,mean,rmse,sd,n");
    for (JumpMode mode : cfg.modes) {
        SignatureConfig c = cfg.base;
        c.noise.push_back(Jumps{cfg.intensity, cfg.intensity, mode});
        const RepResults r = run_replications(c);
        emit_signature(c, r, mode_name(mode), reps, summary, o);
    }
    reps.save(out / "jumps_reps.csv", o);
    summary.save(out / "jumps_summary.csv", o);
    return o;
}

namespace {

struct DayEnds {
    bool ok = false;
    double rho_first = kNaN, lambda_first = kNaN, rho_last = kNaN, lambda_last = kNaN;
    double daily_return = kNaN;
};

DayEnds ends_of(const IntradayCurves& c, const SampledPath& p) {
    DayEnds d;
    if (c.size() == 0) return d;
    d.ok = true;
    d.rho_first = c.rho_QS.front();
    d.lambda_first = c.lambda.front();
    d.rho_last = c.rho_QS.back();
    d.lambda_last = c.lambda.back();
    d.daily_return = p.values.back() - p.values.front();
    return d;
}

std::vector<fs::path> csv_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

double linear(double a, double b, double u) { return a + (b - a) * u; }

}  // namespace

ExperimentOutput run_intraday_average(const IntradayConfig& cfg, const fs::path& out) {
    ExperimentOutput o;
    o.base_seed = cfg.base_seed;
    const auto& rc = cfg.rolling;

    // Day loaders: either simulated one-factor days or user tick files.
    std::vector<std::string> names;
    std::vector<FactorAsset> factor_assets;
    std::vector<fs::path> market_files;
    const bool from_ticks = cfg.market_ticks.has_value();
    if (from_ticks) {
        for (const auto& [name, dir] : cfg.asset_ticks) names.push_back(name);
        market_files = csv_files(*cfg.market_ticks);
        if (market_files.empty()) throw InputError("intraday: no market tick files");
    } else {
        for (const auto& a : cfg.assets) {
            names.push_back(a.name);
            factor_assets.push_back({a.name, [a](double u) { return linear(a.rho_start, a.rho_end, u); },
                                     [a](double u) { return linear(a.lambda_start, a.lambda_end, u); }});
        }
    }
    if (cfg.market_control) names.push_back("market");
    const std::size_t n_assets = names.size();
    const std::size_t n_days = from_ticks ? market_files.size() : cfg.days;
    o.replications = n_days;

    std::vector<CurveAccumulator> acc(n_assets);
    std::vector<std::vector<DayEnds>> ends(n_assets, std::vector<DayEnds>(n_days));
    std::vector<std::string> day_errors(n_days);
    const TickCsvOptions tick_opts{cfg.session_open_ns, kDefaultDayLength};

    // Days in fixed-size chunks: parallel inside a chunk, reduction in day order.
    constexpr std::size_t kChunk = 16;
    for (std::size_t begin = 0; begin < n_days; begin += kChunk) {
        const std::size_t end = std::min(n_days, begin + kChunk);
        std::vector<std::vector<IntradayCurves>> chunk(end - begin, std::vector<IntradayCurves>(n_assets));
        const auto chunk_n = static_cast<std::int64_t>(end - begin);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < chunk_n; ++c) {
            const std::size_t d = begin + static_cast<std::size_t>(c);
            try {
                SampledPath market;
                std::vector<SampledPath> assets;
                if (from_ticks) {
                    market = previous_tick_sample(read_tick_csv(market_files[d], "market", tick_opts), rc.N);
                    for (const auto& [name, dir] : cfg.asset_ticks)
                        assets.push_back(previous_tick_sample(
                            read_tick_csv(dir / market_files[d].filename(), name, tick_opts), rc.N));
                } else {
                    FactorDay day = simulate_one_factor_day([&](double) { return cfg.market_sigma; },
                                                            factor_assets, rc.N, cfg.base_seed + d);
                    market = std::move(day.market);
                    assets = std::move(day.assets);
                }
                if (cfg.market_control) assets.push_back(market);
                for (std::size_t a = 0; a < n_assets; ++a) {
                    chunk[c][a] = rolling_curves(assets[a], market, rc, cfg.lambda_aggregation);
                    ends[a][d] = ends_of(chunk[c][a], assets[a]);
                }
            } catch (const std::exception& e) {
                day_errors[d] = e.what();
                for (auto& curves : chunk[c]) curves = IntradayCurves{};
            }
        }
        for (std::size_t c = 0; c < end - begin; ++c) {
            if (!day_errors[begin + c].empty()) continue;
            for (std::size_t a = 0; a < n_assets; ++a) acc[a].add(chunk[c][a]);
        }
    }
    for (std::size_t d = 0; d < n_days; ++d)
        if (!day_errors[d].empty()) o.failures.push_back("day " + std::to_string(d) + ": " + day_errors[d]);
    if (acc.empty() || acc.front().days() == 0) throw InputError("intraday: no usable days");

    CsvWriter decomp("asset,delta_log_rho,delta_log_lambda,delta_log_beta");
    CsvWriter scatter("asset,day,delta_log_beta,delta_log_rho,delta_log_lambda");
    CsvWriter gamma("asset,window,mean_rho,mean_lambda,cov_rho_lambda,gamma_adj");
    CsvWriter lowfreq("asset,beta_daily,days");

    // market daily returns for the low-frequency beta
    std::vector<double> market_daily;
    const bool have_market_row = cfg.market_control;

    for (std::size_t a = 0; a < n_assets; ++a) {
        const IntradayCurves mean = acc[a].mean();
        CsvWriter curves("eval_time,rho_P,rho_K,rho_QS,lambda,beta_P,beta_K,beta_QS,beta_reg");
        for (std::size_t i = 0; i < mean.size(); ++i)
            curves.row(mean.eval_times[i], mean.rho_P[i], mean.rho_K[i], mean.rho_QS[i], mean.lambda[i],
                       mean.beta_P[i], mean.beta_K[i], mean.beta_QS[i], mean.beta_reg[i]);
        curves.save(out / ("intraday_" + names[a] + ".csv"), o);

        try {
            const BetaDecomposition b = decompose_beta(mean);
            decomp.row(names[a], b.delta_log_rho, b.delta_log_lambda, b.delta_log_beta);
        } catch (const DegenerateInputError& e) {
            decomp.row(names[a], kNaN, kNaN, kNaN);
            o.failures.push_back("decomposition " + names[a] + ": " + e.what());
        }

        for (std::size_t d = 0; d < n_days; ++d) {
            const DayEnds& e = ends[a][d];
            if (!e.ok) continue;
            try {
                const BetaDecomposition b = decompose_beta(e.rho_first, e.lambda_first, e.rho_last, e.lambda_last);
                scatter.row(names[a], d, b.delta_log_beta, b.delta_log_rho, b.delta_log_lambda);
            } catch (const DegenerateInputError&) {
                // undefined on this day; the day-averaged row above is what is reported
            }
        }

        for (int w = 0; w < 2; ++w) {
            double sr = 0.0, sl = 0.0, srl = 0.0;
            std::size_t m = 0;
            for (std::size_t d = 0; d < n_days; ++d) {
                const DayEnds& e = ends[a][d];
                const double r = w == 0 ? e.rho_first : e.rho_last;
                const double l = w == 0 ? e.lambda_first : e.lambda_last;
                if (!e.ok || std::isnan(r) || std::isnan(l)) continue;
                sr += r;
                sl += l;
                srl += r * l;
                ++m;
            }
            if (m < 2) {
                gamma.row(names[a], w == 0 ? "first" : "last", kNaN, kNaN, kNaN, kNaN);
                continue;
            }
            const double dm = static_cast<double>(m);
            const double mr = sr / dm, ml = sl / dm;
            const double cov = (srl - dm * mr * ml) / (dm - 1.0);
            gamma.row(names[a], w == 0 ? "first" : "last", mr, ml, cov, cov / (mr * ml));
        }
    }

    if (have_market_row && n_days >= 2) {
        const std::size_t m = n_assets - 1;
        for (std::size_t d = 0; d < n_days; ++d)
            if (ends[m][d].ok) market_daily.push_back(ends[m][d].daily_return);
        for (std::size_t a = 0; a < n_assets; ++a) {
            std::vector<double> asset_daily, market_used;
            for (std::size_t d = 0; d < n_days; ++d) {
                if (!ends[a][d].ok || !ends[m][d].ok) continue;
                asset_daily.push_back(ends[a][d].daily_return);
                market_used.push_back(ends[m][d].daily_return);
            }
            double b = kNaN;
            try {
                b = low_frequency_beta(asset_daily, market_used);
            } catch (const std::exception& e) {
                o.failures.push_back("low-frequency beta " + names[a] + ": " + e.what());
            }
            lowfreq.row(names[a], b, asset_daily.size());
        }
    }

    decomp.save(out / "decomposition.csv", o);
    scatter.save(out / "scatter.csv", o);
    gamma.save(out / "gamma_adjustment.csv", o);
    if (have_market_row && n_days >= 2) lowfreq.save(out / "low_frequency_beta.csv", o);
    return o;
}

ExperimentOutput run_summary_stats(const StatsConfig& cfg, const fs::path& out) {
    if (cfg.assets.empty()) throw InputError("stats: empty universe (no assets configured)");
    ExperimentOutput o;
    std::string header = "asset,average_price,mean_duration_s,tick_count,days";
    for (double d : cfg.delta_grid) header += ",zero_pct_" + format_double(d) + "s";
    CsvWriter csv(header);
    const TickCsvOptions opts{cfg.session_open_ns, cfg.day_length};
    std::size_t written = 0;
    for (const auto& [name, dir] : cfg.assets) {
        try {
            SummaryAccumulator acc(cfg.delta_grid);
            for (const auto& f : csv_files(dir)) acc.add_day(read_tick_csv(f, name, opts));
            if (acc.days() == 0) throw InputError("no tick files in " + dir.string());
            const SummaryStats s = acc.result();
            std::ostringstream line;
            line << name << ',' << format_double(s.average_price) << ',' << format_double(s.mean_duration)
                 << ',' << s.tick_count << ',' << acc.days();
            for (double d : cfg.delta_grid) line << ',' << format_double(s.zero_return_pct.at(d));
            csv.row(line.str());
            ++written;
        } catch (const std::exception& e) {
            o.failures.push_back("asset " + name + ": " + e.what());
        }
    }
    if (written == 0) throw InputError("stats: no asset could be summarized");
    csv.save(out / "summary_stats.csv", o);
    return o;
}

ExperimentOutput run_command(const RunRequest& req) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string text = read_text_file(req.config);
    const json j = parse_config_text(text);
    const fs::path base_dir = req.config.parent_path();
    fs::create_directories(req.out_dir);
    set_thread_count(req.threads);

    if (j.contains("experiment") && j.at("experiment").get<std::string>() != req.command)
        throw InputError("config is for experiment '" + j.at("experiment").get<std::string>() +
                         "', not '" + req.command + "'");

    ExperimentOutput o;
    if (req.command == "avar") {
        o = run_avar_curves(parse_avar(j), req.out_dir);
    } else if (req.command == "tvbias") {
        o = run_tv_bias_curves(parse_tvbias(j), req.out_dir);
    } else if (req.command == "signature") {
        auto c = parse_signature(j);
        if (req.seed) c.base_seed = *req.seed;
        o = run_mc_signature(c, req.out_dir);
    } else if (req.command == "jumps") {
        auto c = parse_jumps(j);
        if (req.seed) c.base.base_seed = *req.seed;
        o = run_jump_study(c, req.out_dir);
    } else if (req.command == "intraday") {
        auto c = parse_intraday(j, base_dir);
        if (req.seed) c.base_seed = *req.seed;
        o = run_intraday_average(c, req.out_dir);
    } else if (req.command == "stats") {
        o = run_summary_stats(parse_stats(j, base_dir), req.out_dir);
    } else {
        throw InputError("unknown experiment '" + req.command + "'");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::ordered_json m;
    m["software"] = "qscorr";
    m["version"] = QSCORR_VERSION;
    m["experiment"] = req.command;
    m["config_file"] = req.config.filename().string();
    m["config_sha256"] = sha256_hex(text);
    m["seed_schedule"] = {{"base_seed", o.base_seed},
                          {"rule", "seed_i = base_seed + i"},
                          {"units", o.replications}};
    m["threads"] = thread_count();
    m["wall_time_seconds"] = wall;
    m["outputs"] = nlohmann::ordered_json::array();
    for (const auto& f : o.files)
        m["outputs"].push_back({{"file", f.filename().string()}, {"sha256", sha256_file(f)},
                                {"bytes", fs::file_size(f)}});
    m["failures"] = o.failures;
    write_text_file(req.out_dir / "manifest.json", m.dump(2) + "\n");
    return o;
}

}  // namespace qsc
