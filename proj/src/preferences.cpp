#include "rqopt/preferences.hpp"
#include "rqopt/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rqopt {

double robust_objective(const QuantileFunction& qx, const QuantileFunction& claim_q, const UtilityModel& u)
{
    if (!(qx.grid() == claim_q.grid()))
        throw std::invalid_argument("objective of quantiles on different grids");
    if (!qx.nonnegative())
        throw std::invalid_argument("terminal wealth quantile must be nonnegative");
    double s = 0.0;
    for (std::size_t i = 0; i < qx.size(); ++i)
        s += u.value(qx[i] + claim_q[i]);
    return s / static_cast<double>(qx.size());
}

double robust_objective(const QuantileFunction& qx, const ClaimSpec& claim, const UtilityModel& u)
{
    return robust_objective(qx, claim.quantile(qx.grid()), u);
}

double lagrangian_objective(const QuantileFunction& q, double lambda, const QuantileFunction& claim_q,
                            const UtilityModel& u, const QuantileFunction& kernel_q)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("multiplier must be positive");
    return robust_objective(q, claim_q, u) - lambda * pair_reversed(q, kernel_q);
}

CouplingResult min_coupling_oracle(std::span<const double> x, std::span<const double> y, const UtilityModel& u)
{
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("coupling needs two atom lists of equal positive length");
    if (x.size() > 8)
        throw std::invalid_argument("too many atoms for exhaustive coupling");
    const std::size_t k = x.size();
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    CouplingResult best{std::numeric_limits<double>::infinity(), perm};
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            s += u.value(x[i] + y[perm[i]]);
        s /= static_cast<double>(k);
        if (s < best.value) {
            best.value = s;
            best.permutation = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

namespace {

struct Moments {
    TailIntegral utility, budget, dual;
};

Moments kernel_moments(const UtilityModel& u, const KernelLaw& law, double lambda)
{
    auto inv = [&](double z) { return u.inverse_marginal(lambda * std::exp(law.m + law.s * z)); };
    Moments m;
    m.utility = gaussian_expectation([&](double z) { return u.value(inv(z)); });
    m.budget = gaussian_expectation([&](double z) { return std::exp(law.m + law.s * z) * inv(z); });
    m.dual = gaussian_expectation([&](double z) {
        double i = inv(z);
        return u.value(i) - lambda * std::exp(law.m + law.s * z) * i;
    });
    return m;
}

} // namespace

WellposednessReport wellposedness_check(const UtilityModel& u, const KernelLaw& law, double lambda)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("multiplier must be positive");
    WellposednessReport r;
    auto at = kernel_moments(u, law, lambda);
    r.utility_moment = at.utility.value;
    r.budget_moment = at.budget.value;
    r.dual_moment = at.dual.value;
    r.finitecon1 = at.dual.finite;
    bool here = at.utility.finite && at.budget.finite;

    r.lower_threshold_estimate = std::numeric_limits<double>::infinity();
    for (int j = -60; j <= 60; ++j) {
        double l = std::ldexp(1.0, j);
        auto mm = kernel_moments(u, law, l);
        if (mm.utility.finite && mm.budget.finite) {
            r.lower_threshold_estimate = l;
            break;
        }
    }
    r.statement5 = here || std::isfinite(r.lower_threshold_estimate);
    return r;
}

TailConditionReport check_quantile_tail_condition(const ClaimSpec& claim, const UtilityModel& u, const KernelLaw& law)
{
    TailConditionReport r;
    auto safe_marginal = [&](double v) {
        try {
            return u.marginal(v);
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    r.marginal_bounded = std::isfinite(safe_marginal(claim.ess_inf()));
    for (int k = 4; k <= 20; ++k) {
        double t = std::ldexp(1.0, -k);
        r.ratios.push_back(safe_marginal(claim.quantile_at(t)) / law.quantile(1.0 - t));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < r.ratios.size(); ++i)
        monotone = monotone && r.ratios[i] <= r.ratios[i - 1] * (1.0 + 1e-12);
    r.ratios_decay = monotone && std::isfinite(r.ratios.front()) && r.ratios.back() < 0.5 * r.ratios.front();
    r.marginal_integrable = claim.expectation(safe_marginal).finite;
    // rho is unbounded (s > 0), so a bounded u' at the claim's floor suffices
    r.holds = r.marginal_integrable && (r.marginal_bounded || r.ratios_decay);
    return r;
}

SandwichConstants sandwich_constants(const QuantileFunction& claim_q, const UtilityModel& u)
{
    double q0 = claim_q.value_at_0();
    SandwichConstants c;
    c.c1 = std::abs(u.value(1.0 + std::abs(q0))) + u.marginal(1.0) * std::abs(q0) + std::abs(u.value(q0));
    double s = 0.0;
    for (std::size_t i = 0; i < claim_q.size(); ++i)
        s += u.value(std::max(claim_q[i], 0.0));
    c.c2 = s / static_cast<double>(claim_q.size()) - u.value(0.0);
    return c;
}

} // namespace rqopt
