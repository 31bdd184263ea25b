#include "rqopt/exp_solver.hpp"
#include "rqopt/errors.hpp"
#include "rqopt/preferences.hpp"
#include "rqopt/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rqopt {

namespace {

WeightingFunction build_weighting(const QuantileFunction& claim_q, double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("exponential utility needs alpha > 0");
    const std::size_t n = claim_q.size();
    std::vector<double> mag(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mag[i] = std::exp(-alpha * claim_q[i]);
        total += mag[i];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericalError("E|u(claim)| is zero or infinite on the grid");
    WeightingFunction w;
    w.normalizer = total / static_cast<double>(n);
    w.edge.resize(n + 1);
    w.edge[0] = 0.0;
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        acc += mag[n - 1 - l]; // the claim at 1 - t_l
        w.edge[l + 1] = acc / total;
    }
    w.edge[n] = 1.0;
    return w;
}

} // namespace

double WeightingFunction::operator()(double t) const
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    const std::size_t n = edge.size() - 1;
    double pos = t * static_cast<double>(n);
    auto j = std::min(static_cast<std::size_t>(pos), n - 1);
    double frac = pos - static_cast<double>(j);
    return edge[j] + frac * (edge[j + 1] - edge[j]);
}

WeightingFunction weighting(const QuantileFunction& claim_q, double alpha)
{
    if (claim_q[0] == claim_q[claim_q.size() - 1])
        throw std::invalid_argument("weighting needs a non-degenerate claim; use the classical route");
    return build_weighting(claim_q, alpha);
}

EnvelopePoints envelope_input(const QuantileFunction& claim_q, double alpha, const QuantileFunction& kernel_q)
{
    if (!(claim_q.grid() == kernel_q.grid()))
        throw std::invalid_argument("claim and kernel quantiles on different grids");
    auto w = build_weighting(claim_q, alpha);
    const std::size_t n = claim_q.size();
    const double scale = 1.0 / (static_cast<double>(n) * w.normalizer);
    // cum[k] = int_0^{k/n} Q_rho
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        cum[k + 1] = cum[k] + kernel_q[k];
    EnvelopePoints p;
    p.s.resize(n + 1);
    p.f.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        p.s[j] = 1.0 - w.edge[n - j];
        p.f[j] = -cum[n - j] * scale;
    }
    p.s[0] = 0.0;
    p.s[n] = 1.0;
    p.f[n] = 0.0;
    return p;
}

double EnvelopeResult::slope_at(double s) const
{
    if (s < x.front() || s > x.back())
        throw std::domain_error("envelope slope outside its abscissae");
    // last knot with abscissa <= s, then the segment to its right
    auto it = std::upper_bound(knots.begin(), knots.end(), s, [&](double v, std::size_t k) { return v < x[k]; });
    auto seg = static_cast<std::size_t>(it - knots.begin());
    seg = std::clamp<std::size_t>(seg, 1, knots.size() - 1) - 1;
    std::size_t a = knots[seg], b = knots[seg + 1];
    return (f[b] - f[a]) / (x[b] - x[a]);
}

EnvelopeResult concave_envelope(std::span<const double> x, std::span<const double> f)
{
    const std::size_t n = x.size();
    if (n < 2 || f.size() != n)
        throw std::invalid_argument("envelope needs at least two points with values");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(f[i]))
            throw std::invalid_argument("envelope input not finite");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw std::invalid_argument("envelope abscissae must increase strictly");
    }
    EnvelopeResult r;
    r.x.assign(x.begin(), x.end());
    r.f.assign(f.begin(), f.end());

    std::vector<std::size_t>& h = r.knots;
    for (std::size_t i = 0; i < n; ++i) {
        while (h.size() >= 2) {
            std::size_t a = h[h.size() - 2], b = h.back();
            double cross = (x[b] - x[a]) * (f[i] - f[a]) - (f[b] - f[a]) * (x[i] - x[a]);
            if (cross < 0.0)
                break;
            h.pop_back();
        }
        h.push_back(i);
    }

    r.delta.resize(n);
    r.slope.resize(n);
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
        std::size_t a = h[k], b = h[k + 1];
        double sl = (f[b] - f[a]) / (x[b] - x[a]);
        for (std::size_t i = a; i < b; ++i) {
            r.delta[i] = i == a ? f[a] : f[a] + sl * (x[i] - x[a]);
            r.slope[i] = sl;
        }
    }
    r.delta[n - 1] = f[n - 1];
    r.slope[n - 1] = r.slope[n - 2];
    return r;
}

ExpSolution solve_exponential(double x, const QuantileFunction& claim_q, double alpha, const QuantileFunction& kernel_q)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("initial wealth must be positive");
    auto pts = envelope_input(claim_q, alpha, kernel_q);
    auto env = concave_envelope(pts.s, pts.f);
    auto w = build_weighting(claim_q, alpha);
    const std::size_t n = claim_q.size();
    const double h = 1.0 / static_cast<double>(n);

    std::vector<double> dp(n), c(n), rho_hat(n);
    double kernel_mean = 0.0, log_int = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dp[i] = env.slope_at(1.0 - w.at_node(n - 1 - i));
        if (!(dp[i] > 0.0) || !std::isfinite(dp[i]))
            throw NumericalError("envelope slope is zero or infinite inside (0,1)");
        rho_hat[i] = kernel_q[n - 1 - i];
        c[i] = std::log(alpha) - std::log(dp[i]); // Qbar_i = (c_i - ln lambda)/alpha before the floor
        kernel_mean += rho_hat[i] * h;
        log_int += std::log(dp[i]) * rho_hat[i] * h;
    }

    // explicit solution without the multiplier
    double lead = (x + log_int / alpha) / kernel_mean;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = lead - std::log(dp[i]) / alpha;
    double log_lambda = std::log(alpha) - alpha * lead;
    bool floored = *std::min_element(q.begin(), q.end()) < 0.0;

    if (floored) {
        // active set {i >= k}: the budget is linear in ln(lambda) there
        double num = 0.0, den = 0.0;
        std::size_t k = n;
        while (k > 0) {
            num += c[k - 1] * rho_hat[k - 1];
            den += rho_hat[k - 1];
            double l = (num - alpha * x / h) / den;
            if (k == 1 || c[k - 2] <= l) {
                log_lambda = l;
                break;
            }
            --k;
        }
        for (std::size_t i = 0; i < n; ++i)
            q[i] = std::max(0.0, (c[i] - log_lambda) / alpha);
    }
    for (std::size_t i = 1; i < n; ++i)
        q[i] = std::max(q[i], q[i - 1]); // rounding guard; delta' is non-increasing

    const double at0 = q.front();
    QuantileFunction qbar(claim_q.grid(), std::move(q), at0, std::numeric_limits<double>::infinity());
    auto u = UtilityModel::exponential(alpha);
    ExpSolution s{x, std::exp(log_lambda), qbar, std::move(dp), std::move(w), std::move(env), log_int, kernel_mean,
                  robust_objective(qbar, claim_q, u), pair_reversed(qbar, kernel_q) - x, floored};
    return s;
}

} // namespace rqopt
