#include "rqopt/cli/run.hpp"
#include "rqopt/cli/config.hpp"
#include "rqopt/errors.hpp"
#include "rqopt/exp_solver.hpp"
#include "rqopt/portfolio.hpp"
#include "rqopt/preferences.hpp"
#include "rqopt/pricer.hpp"
#include "rqopt/vi_solver.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>

namespace rqopt::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v)
{
    return fmt::format("{:.17g}", v);
}

void write_text(const fs::path& p, const std::string& body)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    out << body;
}

void write_json(const fs::path& p, const json& j)
{
    write_text(p, j.dump(2) + "\n");
}

void write_solution(const fs::path& p, const QuantileFunction& q, const SlackFunctions& s)
{
    std::string body = "t,Qbar,Lambda,H\n";
    for (std::size_t i = 0; i < q.size(); ++i)
        body += num(q.grid().node(i)) + "," + num(q[i]) + "," + num(s.lambda_node[i]) + "," + num(s.h_node[i]) + "\n";
    write_text(p, body);
}

json wellposed_json(const WellposednessReport& w)
{
    return {{"statement5", w.statement5},
            {"finitecon1", w.finitecon1},
            {"lower_threshold_estimate", w.lower_threshold_estimate},
            {"utility_moment", w.utility_moment},
            {"budget_moment", w.budget_moment},
            {"dual_moment", w.dual_moment}};
}

struct Problem {
    ProblemConfig cfg;
    Grid grid;
    QuantileFunction claim_q;
    QuantileFunction kernel_q;
    CalibrationOptions calib;
};

Problem setup(const RunOptions& o)
{
    auto cfg = load_config(o.config_path);
    if (o.grid) {
        if (*o.grid < 2)
            throw ConfigError("--grid: need at least 2 cells");
        cfg.grid = *o.grid;
    }
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.tol) {
        if (!(*o.tol > 0.0))
            throw ConfigError("--tol: must be positive");
        cfg.budget_tol = *o.tol;
        cfg.price_tol = *o.tol;
    }
    Grid g(cfg.grid);
    CalibrationOptions c;
    c.budget_tol = cfg.budget_tol;
    auto claim_q = cfg.claim.quantile(g);
    auto kernel_q = kernel_quantile(cfg.law, g);
    return Problem{std::move(cfg), g, std::move(claim_q), std::move(kernel_q), c};
}

RobustSolution solve_checked(const Problem& p)
{
    auto report = wellposedness_check(p.cfg.utility, p.cfg.law, p.cfg.lambda_probe);
    if (!report.statement5)
        throw IllPosedError("the Lagrangian problem is ill-posed for every probed multiplier");
    auto sol = calibrate(p.cfg.wealth, p.claim_q, p.cfg.utility, p.kernel_q, p.calib);
    sol.wellposed = report;
    return sol;
}

int cmd_solve(const Problem& p, const fs::path& out)
{
    auto sol = solve_checked(p);
    const double tol = 2.0 / static_cast<double>(p.grid.size());
    auto comp = verify_complementarity(sol.lagrangian, p.claim_q, p.cfg.utility, p.kernel_q, tol);
    write_solution(out / "solution.csv", sol.qbar(), sol.lagrangian.slack);
    json j = {{"command", "solve"},
              {"lambda", sol.lambda_star},
              {"V0", sol.v0},
              {"V_lambda", sol.lagrangian.v_lambda},
              {"dual_value", sol.dual_value},
              {"budget_residual", sol.budget_residual},
              {"wealth", sol.wealth},
              {"grid", p.grid.size()},
              {"evaluations", sol.evaluations},
              {"merges", sol.lagrangian.merges},
              {"blocks", sol.lagrangian.blocks},
              {"wellposed", wellposed_json(*sol.wellposed)},
              {"complementarity",
               {{"ok", comp.ok}, {"min_h", comp.min_h}, {"max_complementarity", comp.max_complementarity}, {"tol", tol}}}};
    write_json(out / "summary.json", j);
    spdlog::info("solve: lambda* = {}, V0 = {}, budget residual = {}", num(sol.lambda_star), num(sol.v0),
                 num(sol.budget_residual));
    if (!comp.ok)
        spdlog::warn("complementarity check flagged {} issue(s): {}", comp.violations.size(), comp.violations.front());
    return ExitCode::ok;
}

void require_exponential(const Problem& p, const std::string& cmd)
{
    if (p.cfg.utility.kind() != UtilityModel::Kind::exponential)
        throw ConfigError(cmd + " needs an exponential utility");
}

int cmd_solve_exp(const Problem& p, const fs::path& out)
{
    require_exponential(p, "solve-exp");
    auto sol = solve_exponential(p.cfg.wealth, p.claim_q, p.cfg.utility.alpha(), p.kernel_q);
    auto lag = make_lagrangian_solution(sol.lambda, sol.qbar, p.claim_q, p.cfg.utility, p.kernel_q);
    write_solution(out / "solution.csv", sol.qbar, lag.slack);
    json j = {{"command", "solve-exp"},
              {"lambda", sol.lambda},
              {"V0", sol.v0},
              {"V_lambda", lag.v_lambda},
              {"budget_residual", sol.budget_residual},
              {"floor_active", sol.floor_active},
              {"log_slope_integral", sol.log_slope_integral},
              {"kernel_mean", sol.kernel_mean},
              {"hull_knots", sol.envelope.knots.size()},
              {"wealth", sol.wealth},
              {"grid", p.grid.size()}};
    write_json(out / "summary.json", j);
    spdlog::info("solve-exp: lambda = {}, V0 = {}, floor active = {}", num(sol.lambda), num(sol.v0), sol.floor_active);
    return ExitCode::ok;
}

int cmd_price(const Problem& p, const fs::path& out)
{
    PricingOptions po;
    po.price_tol = p.cfg.price_tol;
    po.calibration = p.calib;
    auto r = indifference_price(p.cfg.wealth, p.claim_q, p.cfg.utility, p.kernel_q, po);
    json pj = {{"p", r.price},
               {"V_EU", r.v_eu},
               {"V0", r.v0_at_x_minus_p},
               {"residual", r.residual},
               {"exists", r.exists}};
    write_json(out / "price.json", pj);
    json sj = {{"command", "price"},
               {"p", r.price},
               {"V_EU", r.v_eu},
               {"V0", r.v0_at_x_minus_p},
               {"claim_utility", r.claim_utility},
               {"residual", r.residual},
               {"exists", r.exists},
               {"boundary", r.boundary},
               {"reason", r.reason},
               {"wealth", p.cfg.wealth},
               {"grid", p.grid.size()}};
    write_json(out / "summary.json", sj);
    if (!r.exists) {
        spdlog::error("no indifference price: {}", r.reason);
        return ExitCode::ill_posed;
    }
    spdlog::info("price: p = {}, residual = {}", num(r.price), num(r.residual));
    return ExitCode::ok;
}

int cmd_simulate(const Problem& p, const fs::path& out)
{
    if (!p.cfg.market)
        throw ConfigError("simulate needs a 'market' section");
    auto sol = solve_checked(p);
    TerminalMap map(sol.qbar(), p.cfg.law, p.cfg.wealth);
    const auto& s = p.cfg.simulation;
    auto rep = replicate_and_verify(*p.cfg.market, map, s.paths, s.steps, p.cfg.seed, s.record_paths);
    std::string body = "path_id,t,varrho,wealth\n";
    for (const auto& r : rep.records)
        body += fmt::format("{},{},{},{}\n", r.path, num(r.t), num(r.varrho), num(r.wealth));
    write_text(out / "paths.csv", body);
    json j = {{"command", "simulate"},
              {"lambda", sol.lambda_star},
              {"V0", sol.v0},
              {"paths", rep.n_paths},
              {"steps", rep.n_steps},
              {"seed", p.cfg.seed},
              {"terminal_rmse", rep.terminal_rmse},
              {"pathwise_max_err", rep.pathwise_max_err},
              {"mean_target", rep.mean_target},
              {"budget_gap", rep.budget_gap},
              {"model_budget_gap", rep.model_budget_gap},
              {"anti_monotone", rep.anti_monotone},
              {"monitor_times", rep.monitor_times},
              {"deflated_mean", rep.deflated_mean},
              {"deflated_se", rep.deflated_se}};
    write_json(out / "summary.json", j);
    spdlog::info("simulate: terminal RMSE = {} (mean target {})", num(rep.terminal_rmse), num(rep.mean_target));
    return ExitCode::ok;
}

int cmd_check(const Problem& p, const fs::path& out)
{
    auto w = wellposedness_check(p.cfg.utility, p.cfg.law, p.cfg.lambda_probe);
    auto tail = check_quantile_tail_condition(p.cfg.claim, p.cfg.utility, p.cfg.law);
    auto eu = p.cfg.claim.expectation([&](double v) { return p.cfg.utility.value(v); });
    json j = wellposed_json(w);
    j["lambda"] = p.cfg.lambda_probe;
    j["tail_condition"] = tail.holds;
    j["tail_marginal_bounded"] = tail.marginal_bounded;
    j["tail_ratios_decay"] = tail.ratios_decay;
    j["marginal_integrable"] = tail.marginal_integrable;
    j["tail_ratios"] = tail.ratios;
    j["claim_utility_finite"] = eu.finite;
    j["claim_utility"] = eu.value;
    write_json(out / "check.json", j);
    spdlog::info("check: statement5 = {}, finitecon1 = {}, tail condition = {}", w.statement5, w.finitecon1, tail.holds);
    return ExitCode::ok;
}

int cmd_envelope(const Problem& p, const fs::path& out)
{
    require_exponential(p, "envelope");
    const double alpha = p.cfg.utility.alpha();
    auto pts = envelope_input(p.claim_q, alpha, p.kernel_q);
    auto env = concave_envelope(pts.s, pts.f);
    std::vector<bool> knot(pts.s.size(), false);
    for (auto k : env.knots)
        knot[k] = true;
    std::string body = "s,f,delta,slope,knot\n";
    for (std::size_t j = 0; j < pts.s.size(); ++j)
        body += fmt::format("{},{},{},{},{}\n", num(pts.s[j]), num(pts.f[j]), num(env.delta[j]), num(env.slope[j]),
                            knot[j] ? 1 : 0);
    write_text(out / "envelope.csv", body);
    json j = {{"command", "envelope"}, {"points", pts.s.size()}, {"hull_knots", env.knots.size()}, {"grid", p.grid.size()}};
    if (!p.cfg.claim.degenerate()) {
        auto w = weighting(p.claim_q, alpha);
        std::string wb = "t,w\n";
        for (std::size_t k = 0; k < w.edge.size(); ++k)
            wb += num(p.grid.edge(k)) + "," + num(w.edge[k]) + "\n";
        write_text(out / "weighting.csv", wb);
        j["normalizer"] = w.normalizer;
    }
    write_json(out / "summary.json", j);
    return ExitCode::ok;
}

} // namespace

int run(const std::string& command, const RunOptions& opts)
{
    try {
        fs::path out(opts.out_dir);
        fs::create_directories(out);
        auto p = setup(opts);
        if (command == "solve")
            return cmd_solve(p, out);
        if (command == "solve-exp")
            return cmd_solve_exp(p, out);
        if (command == "price")
            return cmd_price(p, out);
        if (command == "simulate")
            return cmd_simulate(p, out);
        if (command == "check")
            return cmd_check(p, out);
        if (command == "envelope")
            return cmd_envelope(p, out);
        spdlog::error("unknown command '{}'", command);
        return ExitCode::usage;
    } catch (const ConfigError& e) {
        spdlog::error("config: {}", e.what());
        return ExitCode::schema;
    } catch (const IllPosedError& e) {
        spdlog::error("ill-posed: {}", e.what());
        return ExitCode::ill_posed;
    } catch (const NumericalError& e) {
        spdlog::error("numerical failure: {}", e.what());
        return ExitCode::numerical;
    } catch (const std::exception& e) {
        spdlog::error("failure: {}", e.what());
        return ExitCode::numerical;
    }
}

} // namespace rqopt::cli
