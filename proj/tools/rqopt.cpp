// Command-line front end: rqopt <command> --config PATH [--out DIR] [--grid N] [--seed S] [--tol T]

#include "rqopt/cli/run.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>

int main(int argc, char** argv)
{
    spdlog::set_level(spdlog::level::info);
    if (const char* lvl = std::getenv("RQOPT_LOG_LEVEL"))
        spdlog::set_level(spdlog::level::from_str(lvl));

    CLI::App app{"Robust utility maximization with an intractable claim"};
    app.require_subcommand(1);
    rqopt::cli::RunOptions opts;
    std::size_t grid = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;

    const char* commands[][2] = {
        {"solve", "calibrated general-utility solve (PAVA)"},
        {"solve-exp", "exponential-utility envelope route"},
        {"price", "utility-indifference price of the claim"},
        {"simulate", "Monte Carlo replication of the optimal strategy"},
        {"check", "well-posedness and tail-condition report"},
        {"envelope", "weighting function and concave envelope"},
    };
    for (auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", opts.config_path, "problem configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--grid", grid, "override the grid size");
        sub->add_option("--seed", seed, "override the random seed");
        sub->add_option("--tol", tol, "override the budget and price tolerances");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    auto* sub = app.get_subcommands().front();
    if (sub->count("--grid"))
        opts.grid = grid;
    if (sub->count("--seed"))
        opts.seed = seed;
    if (sub->count("--tol"))
        opts.tol = tol;
    return rqopt::cli::run(sub->get_name(), opts);
}
