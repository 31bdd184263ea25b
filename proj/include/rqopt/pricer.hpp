#pragma once

#include "rqopt/claim.hpp"
#include "rqopt/quantile.hpp"
#include "rqopt/utility.hpp"
#include "rqopt/vi_solver.hpp"

#include <string>

namespace rqopt {

// V_EU(x): the robust value with a zero claim, through the same calibration.
double classical_value(double x, const UtilityModel& u, const QuantileFunction& kernel_q,
                       const CalibrationOptions& opts = {});

struct PricingOptions {
    double price_tol = 1e-8; // relative to |V_EU(x)|
    int max_expansions = 60;
    CalibrationOptions calibration;
};

struct PriceResult {
    double price = 0.0;
    double v_eu = 0.0;            // V_EU(x)
    double v0_at_x_minus_p = 0.0; // V_0(x - p)
    double claim_utility = 0.0;   // E[u(claim)] = V_0(0) on the grid
    double residual = 0.0;        // V_0(x - p) - V_EU(x)
    double lambda_star = 0.0;     // multiplier of the robust problem at x - p
    bool exists = false;
    bool boundary = false;        // p = x: the buyer ends with no wealth of their own
    std::string reason;
};

// Solves V_EU(x) = V_0(x - p) for the buyer's indifference price p <= x.
PriceResult indifference_price(double x, const QuantileFunction& claim_q, const UtilityModel& u,
                               const QuantileFunction& kernel_q, const PricingOptions& opts = {});
PriceResult indifference_price(double x, const ClaimSpec& claim, const UtilityModel& u, const KernelLaw& law,
                               const Grid& grid, const PricingOptions& opts = {});

} // namespace rqopt
