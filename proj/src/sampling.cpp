#include "qscorr/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>

#include "qscorr/errors.hpp"

namespace qsc {

void TickSeries::validate() const {
    if (ticks.empty()) throw InputError("tick series '" + asset_id + "' is empty");
    if (!(day_length > 0.0)) throw InputError("day_length must be positive");
    for (std::size_t i = 0; i < ticks.size(); ++i) {
        const double t = ticks[i].time;
        if (!(t >= 0.0 && t <= day_length))
            throw InputError("tick time outside the trading day in '" + asset_id + "'");
        if (!std::isfinite(ticks[i].log_price))
            throw InputError("non-finite log price in '" + asset_id + "'");
        if (i > 0 && !(t > ticks[i - 1].time))
            throw InputError("tick times not strictly increasing in '" + asset_id + "'");
    }
}

SampledPath::SampledPath(std::vector<double> v, double day_length)
    : N(v.empty() ? 0 : v.size() - 1), values(std::move(v)), day_length_seconds(day_length) {
    validate();
}

void SampledPath::validate() const {
    if (N < 1) throw InputError("sampled path needs N >= 1");
    if (values.size() != N + 1) throw InputError("sampled path must hold N + 1 values");
}

SampledPath previous_tick_sample(const TickSeries& ticks, std::size_t N) {
    ticks.validate();
    if (N < 1) throw InputError("previous_tick_sample: N must be >= 1");

    std::vector<double> values(N + 1);
    const auto& tk = ticks.ticks;
    const double T = ticks.day_length;
    std::size_t next = 0;  // first tick strictly after the current grid time
    for (std::size_t j = 0; j <= N; ++j) {
        // j * T / N is exact whenever the grid lands on integers
        const double t = static_cast<double>(j) * T / static_cast<double>(N);
        while (next < tk.size() && tk[next].time <= t) ++next;
        values[j] = next == 0 ? tk.front().log_price : tk[next - 1].log_price;
    }
    return SampledPath(std::move(values), T);
}

ReturnGrid make_return_grid(const SampledPath& path_x, const SampledPath& path_y,
                            std::size_t S) {
    path_x.validate();
    path_y.validate();
    if (path_x.N != path_y.N) throw InputError("make_return_grid: paths differ in N");
    const std::size_t N = path_x.N;
    if (S < 1 || S > N) throw InputError("make_return_grid: need 1 <= S <= N");

    ReturnGrid g;
    g.S = S;
    g.base_N = N;
    const std::size_t count = N - S + 1;
    g.returns_x.resize(count);
    g.returns_y.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        g.returns_x[k] = path_x.values[k + S] - path_x.values[k];
        g.returns_y[k] = path_y.values[k + S] - path_y.values[k];
    }
    return g;
}

std::vector<double> sparse_returns(std::span<const double> values, std::size_t S,
                                   std::size_t shift) {
    if (values.size() < 2) throw InputError("sparse_returns: need at least two values");
    const std::size_t N = values.size() - 1;
    if (S < 1 || S > N) throw InputError("sparse_returns: need 1 <= S <= N");
    if (shift >= S) throw InputError("sparse_returns: shift must be < S");

    std::vector<double> out;
    out.reserve((N - shift) / S);
    for (std::size_t end = shift + S; end <= N; end += S) out.push_back(values[end] - values[end - S]);
    return out;
}

std::vector<double> make_sparse_nonoverlapping(const SampledPath& path, std::size_t S,
                                               std::size_t shift) {
    path.validate();
    return sparse_returns(path.values, S, shift);
}

std::size_t intervals_for_delta(double day_length, double delta_seconds) {
    if (!(delta_seconds > 0.0)) throw InputError("sampling interval must be positive");
    const double ratio = day_length / delta_seconds;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
        throw InputError("sampling interval does not divide the trading day");
    return static_cast<std::size_t>(rounded);
}

namespace {

struct ZeroCount {
    std::size_t zeros = 0;
    std::size_t total = 0;
};

ZeroCount count_zero_returns(const TickSeries& ticks, double delta) {
    const std::size_t n = intervals_for_delta(ticks.day_length, delta);
    const SampledPath path = previous_tick_sample(ticks, n);
    ZeroCount c;
    c.total = n;
    for (std::size_t j = 1; j <= n; ++j)
        if (path.values[j] == path.values[j - 1]) ++c.zeros;
    return c;
}

}  // namespace

SummaryAccumulator::SummaryAccumulator(std::vector<double> deltas_seconds)
    : deltas_(std::move(deltas_seconds)),
      zero_counts_(deltas_.size(), 0),
      return_counts_(deltas_.size(), 0) {}

void SummaryAccumulator::add_day(const TickSeries& ticks) {
    ticks.validate();
    for (std::size_t i = 0; i < deltas_.size(); ++i) {
        const ZeroCount c = count_zero_returns(ticks, deltas_[i]);
        zero_counts_[i] += c.zeros;
        return_counts_[i] += c.total;
    }
    for (const Tick& t : ticks.ticks) price_sum_ += std::exp(t.log_price);
    tick_count_ += ticks.ticks.size();
    if (ticks.ticks.size() >= 2) {
        span_sum_ += ticks.ticks.back().time - ticks.ticks.front().time;
        gap_count_ += ticks.ticks.size() - 1;
    } else {
        // a lone tick: one trade over the whole session
        span_sum_ += ticks.day_length;
        gap_count_ += 1;
    }
    ++days_;
}

SummaryStats SummaryAccumulator::result() const {
    if (days_ == 0) throw InputError("summary statistics need at least one day of ticks");
    SummaryStats s;
    s.tick_count = tick_count_;
    s.average_price = price_sum_ / static_cast<double>(tick_count_);
    s.mean_duration = span_sum_ / static_cast<double>(gap_count_);
    for (std::size_t i = 0; i < deltas_.size(); ++i)
        s.zero_return_pct[deltas_[i]] =
            100.0 * static_cast<double>(zero_counts_[i]) / static_cast<double>(return_counts_[i]);
    return s;
}

SummaryStats compute_summary_stats(const TickSeries& ticks,
                                   std::span<const double> deltas_seconds) {
    SummaryAccumulator acc({deltas_seconds.begin(), deltas_seconds.end()});
    acc.add_day(ticks);
    return acc.result();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

TickSeries read_tick_csv(const std::filesystem::path& file, std::string asset_id,
                         const TickCsvOptions& options) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open tick file " + file.string());

    std::string line;
    if (!std::getline(in, line) || trim(line) != "timestamp_ns,price")
        throw InputError(file.string() + ": expected header 'timestamp_ns,price'");

    struct Row {
        std::int64_t ts;
        double price;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto comma = sv.find(',');
        if (comma == std::string_view::npos)
            throw InputError(file.string() + ":" + std::to_string(line_no) + ": missing comma");
        const std::string_view ts_txt = trim(sv.substr(0, comma));
        const std::string_view px_txt = trim(sv.substr(comma + 1));
        Row r{};
        auto [p1, e1] = std::from_chars(ts_txt.data(), ts_txt.data() + ts_txt.size(), r.ts);
        auto [p2, e2] = std::from_chars(px_txt.data(), px_txt.data() + px_txt.size(), r.price);
        if (e1 != std::errc{} || p1 != ts_txt.data() + ts_txt.size() || e2 != std::errc{} ||
            p2 != px_txt.data() + px_txt.size())
            throw InputError(file.string() + ":" + std::to_string(line_no) + ": malformed row");
        if (!(r.price > 0.0))
            throw InputError(file.string() + ":" + std::to_string(line_no) + ": price must be positive");
        rows.push_back(r);
    }

    // stable so that the last of several equal timestamps survives
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.ts < b.ts; });

    TickSeries series;
    series.asset_id = std::move(asset_id);
    series.day_length = options.day_length;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i + 1 < rows.size() && rows[i + 1].ts == rows[i].ts) continue;
        const double t = static_cast<double>(rows[i].ts - options.session_open_ns) * 1e-9;
        if (t < 0.0 || t > options.day_length) continue;
        series.ticks.push_back({t, std::log(rows[i].price)});
    }
    series.validate();
    return series;
}

void write_path_csv(const std::filesystem::path& file, const SampledPath& path) {
    path.validate();
    std::ofstream out(file);
    if (!out) throw InputError("cannot write " + file.string());
    out << "index,log_price\n" << std::setprecision(17);
    for (std::size_t j = 0; j < path.values.size(); ++j) out << j << ',' << path.values[j] << '\n';
    if (!out) throw InputError("write failed for " + file.string());
}

}  // namespace qsc
