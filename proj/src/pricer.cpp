#include "rqopt/pricer.hpp"
#include "rqopt/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace rqopt {

double classical_value(double x, const UtilityModel& u, const QuantileFunction& kernel_q, const CalibrationOptions& opts)
{
    auto zero = QuantileFunction::constant(kernel_q.grid(), 0.0);
    return calibrate(x, zero, u, kernel_q, opts).v0;
}

namespace {

// V_0 at wealth y >= 0, warm-starting each calibration from the last multiplier.
class RobustValue {
public:
    RobustValue(const QuantileFunction& claim_q, const UtilityModel& u, const QuantileFunction& kernel_q,
                CalibrationOptions opts)
        : claim_(claim_q), u_(u), kernel_(kernel_q), opts_(opts)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < claim_q.size(); ++i)
            s += u.value(claim_q[i]);
        at_zero_ = s / static_cast<double>(claim_q.size());
    }

    double at_zero() const { return at_zero_; }
    double last_lambda() const { return opts_.initial_lambda; }

    double operator()(double y)
    {
        if (y == 0.0)
            return at_zero_;
        auto sol = calibrate(y, claim_, u_, kernel_, opts_);
        opts_.initial_lambda = sol.lambda_star;
        return sol.v0;
    }

private:
    const QuantileFunction& claim_;
    const UtilityModel& u_;
    const QuantileFunction& kernel_;
    CalibrationOptions opts_;
    double at_zero_;
};

} // namespace

PriceResult indifference_price(double x, const QuantileFunction& claim_q, const UtilityModel& u,
                               const QuantileFunction& kernel_q, const PricingOptions& opts)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("initial wealth must be positive");
    PriceResult r;
    r.v_eu = classical_value(x, u, kernel_q, opts.calibration);
    RobustValue value(claim_q, u, kernel_q, opts.calibration);
    r.claim_utility = value.at_zero();

    if (r.v_eu < r.claim_utility) {
        std::ostringstream os;
        os << "V_EU(x) = " << r.v_eu << " is below E[u(claim)] = " << r.claim_utility;
        r.reason = os.str();
        return r;
    }
    if (r.v_eu == r.claim_utility) {
        r.exists = true;
        r.boundary = true;
        r.price = x;
        r.v0_at_x_minus_p = r.claim_utility;
        r.reason = "indifferent only when paying all wealth";
        return r;
    }

    const double target = opts.price_tol * std::abs(r.v_eu);
    double best_gap = std::numeric_limits<double>::infinity();
    double best_p = 0.0, best_v = 0.0, best_lambda = 0.0;
    // V_0(x - p) - V_EU(x), strictly decreasing in p
    auto g = [&](double p) {
        double v = value(x - p);
        double d = v - r.v_eu;
        if (std::abs(d) < best_gap) {
            best_gap = std::abs(d);
            best_p = p;
            best_v = v;
            best_lambda = value.last_lambda();
        }
        return d;
    };

    double lo = 0.0, g_lo = g(0.0);
    double hi = x, g_hi = r.claim_utility - r.v_eu;
    if (g_lo < 0.0) {
        // the claim is worth less than nothing: search below p = 0
        hi = 0.0;
        g_hi = g_lo;
        int k = 0;
        double step = x;
        while (g_lo < 0.0 && k < opts.max_expansions) {
            lo = -step;
            g_lo = g(lo);
            step *= 2.0;
            ++k;
        }
        if (g_lo < 0.0) {
            r.reason = "no price bracket found below zero";
            return r;
        }
    }

    if (best_gap > target) {
        auto done = [&](double a, double b) {
            return best_gap <= target || std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
        };
        std::uintmax_t iters = 200;
        boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, done, iters);
    }

    r.price = best_p;
    r.v0_at_x_minus_p = best_v;
    r.residual = best_v - r.v_eu;
    r.lambda_star = best_lambda;
    if (best_gap > target) {
        std::ostringstream os;
        os << "price residual " << best_gap << " above tolerance " << target;
        throw NumericalError(os.str());
    }
    r.exists = true;
    return r;
}

PriceResult indifference_price(double x, const ClaimSpec& claim, const UtilityModel& u, const KernelLaw& law,
                               const Grid& grid, const PricingOptions& opts)
{
    claim.check_compatible(u);
    return indifference_price(x, claim.quantile(grid), u, kernel_quantile(law, grid), opts);
}

} // namespace rqopt
