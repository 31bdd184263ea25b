#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rqopt::cli {

enum ExitCode : int { ok = 0, usage = 1, schema = 2, ill_posed = 3, numerical = 4 };

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::size_t> grid;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

// command: solve, solve-exp, price, simulate, check, envelope
int run(const std::string& command, const RunOptions& opts);

} // namespace rqopt::cli
