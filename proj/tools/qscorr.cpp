// qscorr: batch experiments for the subsampled quadrant correlation estimator.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qscorr/errors.hpp"
#include "qscorr/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Robust realized correlation: variance curves, bias curves, signature plots,\n"
                 "jump studies, intraday beta decomposition and tick summaries."};
    app.require_subcommand(1);

    struct Options {
        std::string config;
        std::string out = "out";
        std::optional<std::uint64_t> seed;
        int threads = 0;
    };
    Options opt;

    const std::pair<const char*, const char*> commands[] = {
        {"avar", "asymptotic variance curves of P, K, Q and Q_S"},
        {"tvbias", "probability-limit bias under time-varying volatility"},
        {"signature", "Monte Carlo correlation signature plot (mean and RMSE)"},
        {"jumps", "signature study with independent jumps and co-jumps"},
        {"intraday", "rolling-window correlation, relative volatility and beta"},
        {"stats", "summary statistics of tick files"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON config (comments allowed)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--seed", opt.seed, "base seed, overrides the config");
        sub->add_option("--threads", opt.threads, "OpenMP threads (0 = runtime default)")
            ->check(CLI::NonNegativeNumber);
    }

    CLI11_PARSE(app, argc, argv);

    qsc::RunRequest req;
    req.command = app.get_subcommands().front()->get_name();
    req.config = opt.config;
    req.out_dir = opt.out;
    req.seed = opt.seed;
    req.threads = opt.threads;

    try {
        const auto result = qsc::run_command(req);
        for (const auto& f : result.files) std::cout << f.string() << '\n';
        for (const auto& msg : result.failures) std::cerr << "warning: " << msg << '\n';
        std::cout << (req.out_dir / "manifest.json").string() << '\n';
        return 0;
    } catch (const qsc::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const qsc::DegenerateInputError& e) {
        std::cerr << "degenerate input: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
