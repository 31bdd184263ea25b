#pragma once

#include "rqopt/claim.hpp"
#include "rqopt/market.hpp"
#include "rqopt/utility.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace rqopt::cli {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SimulationConfig {
    std::size_t paths = 2000;
    std::size_t steps = 256;
    std::size_t record_paths = 20;
};

struct ProblemConfig {
    std::optional<MarketSpec> market;
    KernelLaw law{0.0, 1.0};
    UtilityModel utility = UtilityModel::exponential(1.0);
    ClaimSpec claim = ClaimSpec::constant(0.0);
    double wealth = 1.0;
    std::size_t grid = 4096;
    std::uint64_t seed = 42;
    double budget_tol = 1e-10;
    double price_tol = 1e-8;
    double lambda_probe = 1.0;
    SimulationConfig simulation;
};

ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::string& path);

} // namespace rqopt::cli
