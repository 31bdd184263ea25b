#include "rqopt/errors.hpp"
#include "rqopt/vi_solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace rqopt {

RobustSolution calibrate(double x, const QuantileFunction& claim_q, const UtilityModel& u,
                         const QuantileFunction& kernel_q, const CalibrationOptions& opts)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("initial wealth must be positive");
    if (!(opts.initial_lambda > 0.0))
        throw std::invalid_argument("initial multiplier must be positive");

    int evaluations = 0;
    std::optional<LagrangianSolution> best;
    double best_gap = std::numeric_limits<double>::infinity();
    const double target = opts.budget_tol * x;

    // budget(lambda) - x, non-increasing in lambda
    auto gap = [&](double log_lambda) {
        auto sol = solve_lagrangian(std::exp(log_lambda), claim_q, u, kernel_q, opts.pava);
        ++evaluations;
        double g = pair_reversed(sol.qbar, kernel_q) - x;
        if (std::abs(g) < best_gap) {
            best_gap = std::abs(g);
            best = std::move(sol);
        }
        return g;
    };

    double lo = std::log(opts.initial_lambda), hi = lo;
    double g_lo = gap(lo), g_hi = g_lo;
    const double step = std::log(2.0);
    int k = 0;
    while (g_hi > 0.0 && k < opts.max_doublings) {
        lo = hi;
        g_lo = g_hi;
        hi += step;
        g_hi = gap(hi);
        ++k;
    }
    k = 0;
    while (g_lo < 0.0 && k < opts.max_doublings) {
        hi = lo;
        g_hi = g_lo;
        lo -= step;
        g_lo = gap(lo);
        ++k;
    }
    if (g_hi > 0.0 || g_lo < 0.0)
        throw IllPosedError("no Lagrange multiplier found within the bracket [2^-60, 2^60] around the start value");

    if (best_gap > target) {
        auto done = [&](double a, double b) {
            return best_gap <= target || std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
        };
        std::uintmax_t iters = 200;
        boost::math::tools::toms748_solve(gap, lo, hi, g_lo, g_hi, done, iters);
    }
    if (best_gap > target) {
        std::ostringstream os;
        os << "budget residual " << best_gap << " above tolerance " << target << " after " << evaluations
           << " solves";
        throw NumericalError(os.str());
    }

    RobustSolution r{x, best->lambda, std::move(*best), 0.0, 0.0, 0.0, evaluations, std::nullopt};
    r.budget_residual = pair_reversed(r.lagrangian.qbar, kernel_q) - x;
    r.v0 = robust_objective(r.lagrangian.qbar, claim_q, u);
    r.dual_value = r.lagrangian.v_lambda + r.lambda_star * x;
    return r;
}

RobustSolution calibrate(double x, const ClaimSpec& claim, const UtilityModel& u, const KernelLaw& law,
                         const Grid& grid, const CalibrationOptions& opts)
{
    claim.check_compatible(u);
    auto report = wellposedness_check(u, law, opts.initial_lambda);
    if (!report.statement5)
        throw IllPosedError("the Lagrangian problem is ill-posed for every probed multiplier");
    auto r = calibrate(x, claim.quantile(grid), u, kernel_quantile(law, grid), opts);
    r.wellposed = report;
    return r;
}

} // namespace rqopt
