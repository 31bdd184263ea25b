#pragma once

#include "rqopt/claim.hpp"
#include "rqopt/market.hpp"
#include "rqopt/quantile.hpp"
#include "rqopt/utility.hpp"

#include <span>
#include <vector>

namespace rqopt {

// (1/n) sum u(Q_X(t_i) + Q_claim(t_i)): the worst coupling is the comonotonic one.
double robust_objective(const QuantileFunction& qx, const QuantileFunction& claim_q, const UtilityModel& u);
double robust_objective(const QuantileFunction& qx, const ClaimSpec& claim, const UtilityModel& u);

// J_0(Q) - lambda * pair_reversed(Q, Q_rho)
double lagrangian_objective(const QuantileFunction& q, double lambda, const QuantileFunction& claim_q,
                            const UtilityModel& u, const QuantileFunction& kernel_q);

struct CouplingResult {
    double value;
    std::vector<std::size_t> permutation; // x[i] is paired with y[permutation[i]]
};

// Brute force over all pairings of equally likely atoms (at most 8 of each).
CouplingResult min_coupling_oracle(std::span<const double> x, std::span<const double> y, const UtilityModel& u);

struct WellposednessReport {
    bool statement5 = false;  // E[u(I)] and E[rho I] finite for some probed lambda
    bool finitecon1 = false;  // E[u(I) - lambda rho I] finite at the given lambda
    double lower_threshold_estimate = 0.0; // smallest probed lambda = 2^j with finite moments
    double utility_moment = 0.0;  // E[u(I(lambda rho))]
    double budget_moment = 0.0;   // E[rho I(lambda rho)]
    double dual_moment = 0.0;     // E[u(I) - lambda rho I]
};

WellposednessReport wellposedness_check(const UtilityModel& u, const KernelLaw& law, double lambda);

struct TailConditionReport {
    bool holds = false;
    bool marginal_bounded = false;  // u'(ess inf claim) < inf
    bool ratios_decay = false;
    bool marginal_integrable = false;
    std::vector<double> ratios;     // u'(Q_claim(t)) / Q_rho(1-t) at t = 2^-k, k = 4..20
};

// Tail compatibility of claim and kernel quantiles near t = 0, plus E[u'(claim)] < inf.
TailConditionReport check_quantile_tail_condition(const ClaimSpec& claim, const UtilityModel& u, const KernelLaw& law);

struct SandwichConstants {
    double c1; // |u(1+|q0|)| + u'(1)|q0| + |u(q0)|, q0 the claim's ess inf
    double c2; // E[u(max(claim, 0))] - u(0)
};

// Constants for E[u(X)] - c1 <= J_0(X) <= E[u(X)] + c2, with the claim law read off the grid.
SandwichConstants sandwich_constants(const QuantileFunction& claim_q, const UtilityModel& u);

} // namespace rqopt
