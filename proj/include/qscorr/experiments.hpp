#pragma once

// Batch experiments behind the CLI. Each runner reads a parsed config,
// writes CSVs into the output directory and returns what it wrote; the
// driver adds manifest.json.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qscorr/intraday.hpp"
#include "qscorr/simulator.hpp"

namespace qsc {

inline const std::vector<double> kDefaultDeltaGrid = {1, 5, 15, 30, 60, 180, 300, 600, 900};

struct AvarConfig {
    double rho_min = -0.99;
    double rho_max = 0.99;
    double rho_step = 0.01;
    std::vector<std::size_t> S_values = {1, 2, 5, 10, 60};
};

struct TvBiasConfig {
    double rho_min = -0.99;
    double rho_max = 0.99;
    double rho_step = 0.01;
};

struct SignatureConfig {
    HestonSpec scenario = table1_spec(0.25);
    std::vector<NoiseLayer> noise;
    std::vector<double> delta_grid = kDefaultDeltaGrid;
    std::size_t replications = 500;
    std::uint64_t base_seed = 20240101;
};

struct JumpStudyConfig {
    SignatureConfig base;  // noise here is applied before the jump layer
    double intensity = 1.0;
    std::vector<JumpMode> modes = {JumpMode::Independent, JumpMode::CoJump};
};

struct RampAsset {
    std::string name;
    double rho_start = 0.05, rho_end = 0.25;
    double lambda_start = 1.5, lambda_end = 1.0;
};

struct IntradayConfig {
    RollingConfig rolling;
    std::size_t days = 200;
    std::uint64_t base_seed = 7;
    double market_sigma = 0.2;  // per day
    std::vector<RampAsset> assets = {RampAsset{"ramp"}};
    bool market_control = true;
    LambdaAggregation lambda_aggregation = LambdaAggregation::Absolute;
    // user data instead of simulation: one CSV per day, matched by file name
    std::optional<std::filesystem::path> market_ticks;
    std::map<std::string, std::filesystem::path> asset_ticks;
    std::int64_t session_open_ns = 0;
};

struct StatsConfig {
    std::map<std::string, std::filesystem::path> assets;  // name -> directory of daily CSVs
    std::vector<double> delta_grid = kDefaultDeltaGrid;
    std::int64_t session_open_ns = 0;
    double day_length = kDefaultDayLength;
};

// Parsing; unknown keys are rejected so that typos surface.
nlohmann::json parse_config_text(const std::string& text);
AvarConfig parse_avar(const nlohmann::json& j);
TvBiasConfig parse_tvbias(const nlohmann::json& j);
SignatureConfig parse_signature(const nlohmann::json& j);
JumpStudyConfig parse_jumps(const nlohmann::json& j);
IntradayConfig parse_intraday(const nlohmann::json& j, const std::filesystem::path& base_dir);
StatsConfig parse_stats(const nlohmann::json& j, const std::filesystem::path& base_dir);

struct EstimateRow {
    double delta_seconds = 0.0;
    std::string estimator;  // P, K or QS
    double value = 0.0;
};

// One replication of a signature design: simulate with seed, apply the
// noise stack, estimate at every delta. Throws on failure.
std::vector<EstimateRow> signature_replication(const SignatureConfig& cfg, std::uint64_t seed);

struct ExperimentOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> failures;  // "rep <i>: <message>"
    std::size_t replications = 0;
    std::uint64_t base_seed = 0;
};

ExperimentOutput run_avar_curves(const AvarConfig& cfg, const std::filesystem::path& out);
ExperimentOutput run_tv_bias_curves(const TvBiasConfig& cfg, const std::filesystem::path& out);
ExperimentOutput run_mc_signature(const SignatureConfig& cfg, const std::filesystem::path& out);
ExperimentOutput run_jump_study(const JumpStudyConfig& cfg, const std::filesystem::path& out);
ExperimentOutput run_intraday_average(const IntradayConfig& cfg, const std::filesystem::path& out);
ExperimentOutput run_summary_stats(const StatsConfig& cfg, const std::filesystem::path& out);

struct RunRequest {
    std::string command;  // avar, tvbias, signature, jumps, intraday, stats
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

// Parses the config, runs the experiment and writes manifest.json.
ExperimentOutput run_command(const RunRequest& req);

std::string format_double(double v);

}  // namespace qsc
