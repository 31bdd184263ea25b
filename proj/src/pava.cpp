#include "rqopt/errors.hpp"
#include "rqopt/vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rqopt {

namespace {

// Equal consecutive claim values are stored once with a multiplicity, so blocks
// over a discrete claim cost O(#atoms) per first-order-condition evaluation.
struct Runs {
    std::vector<double> value;
    std::vector<std::size_t> start; // first node of each run, plus n at the end
    std::vector<std::size_t> run_of;

    explicit Runs(const QuantileFunction& claim)
    {
        const std::size_t n = claim.size();
        run_of.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 || claim[i] != claim[i - 1]) {
                value.push_back(claim[i]);
                start.push_back(i);
            }
            run_of[i] = value.size() - 1;
        }
        start.push_back(n);
    }
};

struct Block {
    std::size_t first;
    std::size_t count;
    double rho_sum;
    double log_c; // log sum exp(-alpha claim_i), exponential utility only
    double value;
};

class BlockSolver {
public:
    BlockSolver(double lambda, const QuantileFunction& claim, const UtilityModel& u, const PavaOptions& o)
        : lambda_(lambda), claim_(claim), u_(u), runs_(claim), opts_(o),
          closed_(o.closed_form_blocks && u.kind() == UtilityModel::Kind::exponential)
    {
    }

    double single(std::size_t i, double rho_hat) const
    {
        return std::max(0.0, u_.inverse_marginal(lambda_ * rho_hat) - claim_[i]);
    }

    double log_c(std::size_t i) const { return closed_ ? -u_.alpha() * claim_[i] : 0.0; }

    // left block a, right block b; a.value >= b.value
    Block merge(const Block& a, const Block& b) const
    {
        Block m{a.first, a.count + b.count, a.rho_sum + b.rho_sum, 0.0, 0.0};
        if (closed_) {
            double hi = std::max(a.log_c, b.log_c);
            m.log_c = hi + std::log(std::exp(a.log_c - hi) + std::exp(b.log_c - hi));
            const double al = u_.alpha();
            m.value = std::max(0.0, (std::log(al) + m.log_c - std::log(lambda_ * m.rho_sum)) / al);
            return m;
        }
        m.value = root(m, std::min(a.value, b.value), std::max(a.value, b.value));
        return m;
    }

private:
    // sum_{i in B} u'(q + claim_i) - lambda R, and its derivative
    void foc(const Block& b, double q, double& f, double& df) const
    {
        const std::size_t end = b.first + b.count;
        f = 0.0;
        df = 0.0;
        for (std::size_t r = runs_.run_of[b.first]; r < runs_.value.size() && runs_.start[r] < end; ++r) {
            std::size_t lo = std::max(runs_.start[r], b.first);
            std::size_t hi = std::min(runs_.start[r + 1], end);
            double c = static_cast<double>(hi - lo);
            f += c * u_.marginal(q + runs_.value[r]);
            df += c * u_.curvature(q + runs_.value[r]);
        }
        f -= lambda_ * b.rho_sum;
    }

    double root(const Block& b, double lo, double hi) const
    {
        double f, df;
        foc(b, lo, f, df);
        if (f <= 0.0)
            return lo;
        foc(b, hi, f, df);
        if (f >= 0.0)
            return hi;
        const double scale = std::max(1.0, lambda_ * b.rho_sum);
        double q = 0.5 * (lo + hi);
        for (int it = 0; it < opts_.max_iter; ++it) {
            foc(b, q, f, df);
            if (std::abs(f) <= opts_.block_tol * scale)
                return q;
            if (f > 0.0)
                lo = q;
            else
                hi = q;
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(q)))
                return 0.5 * (lo + hi);
            double next = q - f / df;
            if (!std::isfinite(next) || next <= lo || next >= hi)
                next = 0.5 * (lo + hi);
            q = next;
        }
        std::ostringstream os;
        os << "block solve did not converge: nodes " << b.first << ".." << b.first + b.count - 1 << ", residual " << f;
        throw NumericalError(os.str());
    }

    double lambda_;
    const QuantileFunction& claim_;
    const UtilityModel& u_;
    Runs runs_;
    PavaOptions opts_;
    bool closed_;
};

void check_inputs(double lambda, const QuantileFunction& claim_q, const QuantileFunction& kernel_q)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("multiplier must be positive and finite");
    if (!(claim_q.grid() == kernel_q.grid()))
        throw std::invalid_argument("claim and kernel quantiles on different grids");
    if (!(kernel_q[0] > 0.0))
        throw std::invalid_argument("kernel quantile must be positive");
}

} // namespace

SlackFunctions slack_functions(const QuantileFunction& qbar, double lambda, const QuantileFunction& claim_q,
                               const UtilityModel& u, const QuantileFunction& kernel_q)
{
    const std::size_t n = qbar.size();
    const double w = qbar.grid().weight();
    SlackFunctions s;
    s.lambda_edge.assign(n + 1, 0.0);
    s.h_edge.assign(n + 1, 0.0);
    s.lambda_node.resize(n);
    s.h_node.resize(n);
    for (std::size_t k = n; k-- > 0;) {
        double g = u.marginal(qbar[k] + claim_q[k]);
        double d = lambda * kernel_q[n - 1 - k] - g;
        s.lambda_edge[k] = s.lambda_edge[k + 1] + w * g;
        s.h_edge[k] = s.h_edge[k + 1] + w * d;
        s.lambda_node[k] = s.lambda_edge[k + 1] + 0.5 * w * g;
        s.h_node[k] = s.h_edge[k + 1] + 0.5 * w * d;
    }
    return s;
}

LagrangianSolution make_lagrangian_solution(double lambda, QuantileFunction qbar, const QuantileFunction& claim_q,
                                            const UtilityModel& u, const QuantileFunction& kernel_q)
{
    auto slack = slack_functions(qbar, lambda, claim_q, u, kernel_q);
    double v = lagrangian_objective(qbar, lambda, claim_q, u, kernel_q);
    return LagrangianSolution{lambda, std::move(qbar), std::move(slack), v, 0, 0};
}

LagrangianSolution solve_lagrangian(double lambda, const QuantileFunction& claim_q, const UtilityModel& u,
                                    const QuantileFunction& kernel_q, const PavaOptions& opts)
{
    check_inputs(lambda, claim_q, kernel_q);
    const std::size_t n = claim_q.size();
    BlockSolver solver(lambda, claim_q, u, opts);
    std::vector<Block> stack;
    stack.reserve(n);
    std::size_t merges = 0;

    auto fresh = [&](std::size_t i) {
        double rho_hat = kernel_q[n - 1 - i];
        return Block{i, 1, rho_hat, solver.log_c(i), solver.single(i, rho_hat)};
    };

    if (opts.order == MergeOrder::left_to_right) {
        for (std::size_t i = 0; i < n; ++i) {
            stack.push_back(fresh(i));
            while (stack.size() >= 2 && stack[stack.size() - 2].value >= stack.back().value) {
                Block right = stack.back();
                stack.pop_back();
                stack.back() = solver.merge(stack.back(), right);
                ++merges;
            }
        }
    } else {
        // the stack top is the leftmost block
        for (std::size_t i = n; i-- > 0;) {
            stack.push_back(fresh(i));
            while (stack.size() >= 2 && stack.back().value >= stack[stack.size() - 2].value) {
                Block left = stack.back();
                stack.pop_back();
                stack.back() = solver.merge(left, stack.back());
                ++merges;
            }
        }
        std::reverse(stack.begin(), stack.end());
    }

    std::vector<double> q(n);
    for (const auto& b : stack)
        std::fill(q.begin() + static_cast<std::ptrdiff_t>(b.first),
                  q.begin() + static_cast<std::ptrdiff_t>(b.first + b.count), b.value);
    const double at0 = q.front();
    QuantileFunction qbar(claim_q.grid(), std::move(q), at0, std::numeric_limits<double>::infinity());
    auto sol = make_lagrangian_solution(lambda, std::move(qbar), claim_q, u, kernel_q);
    sol.merges = merges;
    sol.blocks = stack.size();
    return sol;
}

ComplementarityReport verify_complementarity(const LagrangianSolution& sol, const QuantileFunction& claim_q,
                                             const UtilityModel& u, const QuantileFunction& kernel_q, double tol)
{
    ComplementarityReport r;
    const auto& q = sol.qbar;
    const std::size_t n = q.size();
    auto s = slack_functions(q, sol.lambda, claim_q, u, kernel_q);
    auto flag = [&](const std::string& what, std::size_t node, double mag) {
        r.ok = false;
        std::ostringstream os;
        os << what << " at node " << node << " (magnitude " << mag << ")";
        r.violations.push_back(os.str());
    };

    if (q[0] < 0.0)
        flag("negative terminal wealth quantile", 0, q[0]);

    r.min_h = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= n; ++j) {
        r.min_h = std::min(r.min_h, s.h_edge[j]);
        if (s.h_edge[j] < -tol)
            flag("H below -tol", j, s.h_edge[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        r.min_h = std::min(r.min_h, s.h_node[i]);
        if (s.h_node[i] < -tol)
            flag("H below -tol", i, s.h_node[i]);
    }

    r.terminal_h = s.h_edge[n];
    r.terminal_lambda = s.lambda_edge[n];
    if (std::abs(r.terminal_h) > tol)
        flag("H(1) nonzero", n, r.terminal_h);
    if (std::abs(r.terminal_lambda) > tol)
        flag("Lambda(1-) nonzero", n, r.terminal_lambda);

    for (std::size_t i = 0; i + 1 < n; ++i) {
        double c = std::min(q[i + 1] - q[i], s.h_edge[i + 1]);
        r.max_complementarity = std::max(r.max_complementarity, std::abs(c));
        if (std::abs(c) > tol)
            flag("complementarity min(dQbar, H) violated", i, c);
    }

    // H(0) > 0 forces the floor; a free start needs H(0) = 0 and the Lambda boundary slope
    if (s.h_edge[0] > tol && q[0] > tol) {
        r.floor_ok = false;
        flag("floor not active although H(0) > 0", 0, q[0]);
    }
    if (q[0] > tol) {
        if (std::abs(s.h_edge[0]) > tol)
            flag("H(0) nonzero on a free start", 0, s.h_edge[0]);
        // the grid resolves t = 0+ only through the first cell
        double target = u.marginal(q[0] + claim_q[0]);
        if (std::isfinite(target)) {
            double slope = (s.lambda_edge[0] - s.lambda_edge[1]) * static_cast<double>(n);
            r.boundary_mismatch = std::abs(slope / target - 1.0);
            if (r.boundary_mismatch > tol)
                flag("Lambda boundary slope mismatch", 0, r.boundary_mismatch);
        }
    }
    return r;
}

double directional_derivative(const QuantileFunction& qbar, const QuantileFunction& q, double lambda,
                              const QuantileFunction& claim_q, const UtilityModel& u, const QuantileFunction& kernel_q)
{
    const std::size_t n = qbar.size();
    if (!(q.grid() == qbar.grid()))
        throw std::invalid_argument("directional derivative on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += (u.marginal(qbar[i] + claim_q[i]) - lambda * kernel_q[n - 1 - i]) * (q[i] - qbar[i]);
    return s / static_cast<double>(n);
}

} // namespace rqopt
