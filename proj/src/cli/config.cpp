#include "rqopt/cli/config.hpp"

#include <fstream>
#include <set>

namespace rqopt::cli {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double number(const json& j, const std::string& where, const char* key)
{
    if (!j.contains(key))
        throw ConfigError(where + ": missing '" + key + "'");
    if (!j.at(key).is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& where, const char* key, double fallback)
{
    return j.contains(key) ? number(j, where, key) : fallback;
}

std::size_t count_or(const json& j, const std::string& where, const char* key, std::size_t fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number_unsigned())
        throw ConfigError(where + "." + key + ": expected a nonnegative integer");
    return j.at(key).get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number())
            throw ConfigError(where + ": expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

Eigen::VectorXd vec(const json& j, const std::string& where)
{
    auto v = numbers(j, where);
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": expected a nonempty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : j)
        rows.push_back(numbers(r, where));
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size())
            throw ConfigError(where + ": ragged matrix");
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return m;
}

MarketSpec parse_market(const json& j)
{
    only_keys(j, "market", {"T", "pieces"});
    double T = number(j, "market", "T");
    if (!j.contains("pieces") || !j.at("pieces").is_array() || j.at("pieces").empty())
        throw ConfigError("market.pieces: expected a nonempty array");
    std::vector<MarketPiece> pieces;
    for (const auto& p : j.at("pieces")) {
        only_keys(p, "market.pieces[]", {"end", "r", "theta", "beta", "sigma"});
        double end = number(p, "market.pieces[]", "end");
        double r = number(p, "market.pieces[]", "r");
        if (!p.contains("sigma"))
            throw ConfigError("market.pieces[]: missing 'sigma'");
        Eigen::MatrixXd sigma = mat(p.at("sigma"), "market.pieces[].sigma");
        if (p.contains("theta") == p.contains("beta"))
            throw ConfigError("market.pieces[]: give exactly one of 'theta' and 'beta'");
        if (p.contains("theta")) {
            pieces.push_back({end, r, vec(p.at("theta"), "market.pieces[].theta"), sigma});
        } else {
            auto beta = vec(p.at("beta"), "market.pieces[].beta");
            if (beta.size() != sigma.rows())
                throw ConfigError("market.pieces[].beta: dimension differs from sigma");
            pieces.push_back(MarketSpec::piece_from_drift(end, r, beta, sigma));
        }
    }
    return MarketSpec(T, std::move(pieces));
}

UtilityModel parse_utility(const json& j)
{
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("utility: expected an object with a string 'kind'");
    auto kind = j.at("kind").get<std::string>();
    if (kind == "exponential") {
        only_keys(j, "utility", {"kind", "alpha"});
        return UtilityModel::exponential(number(j, "utility", "alpha"));
    }
    if (kind == "power") {
        only_keys(j, "utility", {"kind", "gamma", "shift"});
        return UtilityModel::power(number(j, "utility", "gamma"), number_or(j, "utility", "shift", 0.0));
    }
    if (kind == "log") {
        only_keys(j, "utility", {"kind", "shift"});
        return UtilityModel::log(number(j, "utility", "shift"));
    }
    throw ConfigError("utility.kind: expected exponential, power or log");
}

ClaimSpec parse_claim(const json& j)
{
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("claim: expected an object with a string 'kind'");
    auto kind = j.at("kind").get<std::string>();
    if (kind == "atoms") {
        only_keys(j, "claim", {"kind", "values", "probs"});
        if (!j.contains("values") || !j.contains("probs"))
            throw ConfigError("claim: atoms need 'values' and 'probs'");
        return ClaimSpec::atoms(numbers(j.at("values"), "claim.values"), numbers(j.at("probs"), "claim.probs"));
    }
    if (kind == "constant") {
        only_keys(j, "claim", {"kind", "value"});
        return ClaimSpec::constant(number(j, "claim", "value"));
    }
    if (kind == "uniform") {
        only_keys(j, "claim", {"kind", "a", "b"});
        return ClaimSpec::uniform(number(j, "claim", "a"), number(j, "claim", "b"));
    }
    if (kind == "lognormal") {
        only_keys(j, "claim", {"kind", "mu", "sigma", "shift"});
        return ClaimSpec::shifted_lognormal(number(j, "claim", "mu"), number(j, "claim", "sigma"),
                                            number_or(j, "claim", "shift", 0.0));
    }
    throw ConfigError("claim.kind: expected atoms, constant, uniform or lognormal");
}

} // namespace

ProblemConfig parse_config(const json& j)
{
    only_keys(j, "config",
              {"market", "kernel", "utility", "claim", "wealth", "grid", "seed", "lambda", "simulation", "tolerances"});
    try {
        ProblemConfig c;
        if (j.contains("market") == j.contains("kernel"))
            throw ConfigError("config: give exactly one of 'market' and 'kernel'");
        if (j.contains("market")) {
            c.market = parse_market(j.at("market"));
            c.law = kernel_law(*c.market);
        } else {
            only_keys(j.at("kernel"), "kernel", {"m", "s"});
            c.law = KernelLaw(number(j.at("kernel"), "kernel", "m"), number(j.at("kernel"), "kernel", "s"));
        }
        if (!j.contains("utility"))
            throw ConfigError("config: missing 'utility'");
        c.utility = parse_utility(j.at("utility"));
        c.claim = j.contains("claim") ? parse_claim(j.at("claim")) : ClaimSpec::constant(0.0);
        c.wealth = number(j, "config", "wealth");
        if (!(c.wealth > 0.0))
            throw ConfigError("config.wealth: must be positive");
        c.grid = count_or(j, "config", "grid", c.grid);
        if (c.grid < 2)
            throw ConfigError("config.grid: need at least 2 cells");
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned())
                throw ConfigError("config.seed: expected a nonnegative integer");
            c.seed = j.at("seed").get<std::uint64_t>();
        }
        c.lambda_probe = number_or(j, "config", "lambda", c.lambda_probe);
        if (!(c.lambda_probe > 0.0))
            throw ConfigError("config.lambda: must be positive");
        if (j.contains("simulation")) {
            const auto& s = j.at("simulation");
            only_keys(s, "simulation", {"paths", "steps", "record_paths"});
            c.simulation.paths = count_or(s, "simulation", "paths", c.simulation.paths);
            c.simulation.steps = count_or(s, "simulation", "steps", c.simulation.steps);
            c.simulation.record_paths = count_or(s, "simulation", "record_paths", c.simulation.record_paths);
        }
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            only_keys(t, "tolerances", {"budget", "price"});
            c.budget_tol = number_or(t, "tolerances", "budget", c.budget_tol);
            c.price_tol = number_or(t, "tolerances", "price", c.price_tol);
            if (!(c.budget_tol > 0.0) || !(c.price_tol > 0.0))
                throw ConfigError("tolerances: must be positive");
        }
        c.claim.check_compatible(c.utility);
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(e.what());
    }
}

ProblemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

} // namespace rqopt::cli
