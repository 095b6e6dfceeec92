#pragma once

// Tick ingestion and calendar-time sampling.
//
// A trading day is the interval [0, day_length] seconds. A SampledPath holds
// N+1 log-prices at the grid times j * day_length / N, j = 0..N, obtained by
// previous-tick interpolation. Span-S returns are differences of grid values
// S base intervals apart.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qsc {

inline constexpr double kDefaultDayLength = 23'400.0;  // 6.5 hours

struct Tick {
    double time;       // seconds since the session open
    double log_price;
};

struct TickSeries {
    std::string asset_id;
    std::vector<Tick> ticks;
    double day_length = kDefaultDayLength;

    // Throws InputError unless ticks are non-empty, strictly increasing and
    // inside [0, day_length].
    void validate() const;
};

struct SampledPath {
    std::size_t N = 0;
    std::vector<double> values;  // N + 1 log-prices
    double day_length_seconds = kDefaultDayLength;

    SampledPath() = default;
    SampledPath(std::vector<double> v, double day_length = kDefaultDayLength);

    void validate() const;
};

// Overlapping span-S returns: returns_x[k] = x[k + S] - x[k], k = 0..N-S.
struct ReturnGrid {
    std::size_t S = 1;
    std::size_t base_N = 0;
    std::vector<double> returns_x;
    std::vector<double> returns_y;

    std::size_t size() const { return returns_x.size(); }
};

struct SummaryStats {
    double average_price = 0.0;
    double mean_duration = 0.0;  // seconds between consecutive ticks
    std::map<double, double> zero_return_pct;  // sampling interval (s) -> %
    std::size_t tick_count = 0;
};

SampledPath previous_tick_sample(const TickSeries& ticks, std::size_t N);

ReturnGrid make_return_grid(const SampledPath& path_x, const SampledPath& path_y,
                            std::size_t S);

// Non-overlapping span-S returns ending at shift + S, shift + 2S, ... <= N.
std::vector<double> make_sparse_nonoverlapping(const SampledPath& path, std::size_t S,
                                               std::size_t shift);

// Same, on a raw value array (size N + 1).
std::vector<double> sparse_returns(std::span<const double> values, std::size_t S,
                                   std::size_t shift);

// Number of base intervals for a sampling interval; throws unless delta
// divides the day into a whole number of intervals.
std::size_t intervals_for_delta(double day_length, double delta_seconds);

SummaryStats compute_summary_stats(const TickSeries& ticks,
                                   std::span<const double> deltas_seconds);

// Pools per-day statistics for one asset: tick-weighted average price,
// pooled durations and pooled zero-return counts.
class SummaryAccumulator {
public:
    explicit SummaryAccumulator(std::vector<double> deltas_seconds);

    void add_day(const TickSeries& ticks);
    std::size_t days() const { return days_; }
    SummaryStats result() const;

private:
    std::vector<double> deltas_;
    std::vector<std::size_t> zero_counts_;
    std::vector<std::size_t> return_counts_;
    double price_sum_ = 0.0;
    std::size_t tick_count_ = 0;
    double span_sum_ = 0.0;
    std::size_t gap_count_ = 0;
    std::size_t days_ = 0;
};

struct TickCsvOptions {
    std::int64_t session_open_ns = 0;  // subtracted from every timestamp
    double day_length = kDefaultDayLength;
};

// Reads `timestamp_ns,price`. Rows are sorted by timestamp, duplicate
// timestamps keep the last row, rows outside the session are dropped.
TickSeries read_tick_csv(const std::filesystem::path& file, std::string asset_id,
                         const TickCsvOptions& options = {});

void write_path_csv(const std::filesystem::path& file, const SampledPath& path);

}  // namespace qsc
