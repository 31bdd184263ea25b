#pragma once

#include "rqopt/claim.hpp"
#include "rqopt/market.hpp"
#include "rqopt/preferences.hpp"
#include "rqopt/quantile.hpp"
#include "rqopt/utility.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rqopt {

enum class MergeOrder { left_to_right, right_to_left };

struct PavaOptions {
    MergeOrder order = MergeOrder::left_to_right;
    // exponential utility blocks have an explicit root; turn off to force Newton
    bool closed_form_blocks = true;
    double block_tol = 1e-12;
    int max_iter = 200;
};

// Lambda(t) = int_t^1 u'(Qbar + Q_claim), H(t) = int_t^1 [lambda Q_rho(1-s) - u'(Qbar + Q_claim)] ds.
// The *_edge vectors hold n+1 values at t = j/n; the node vectors are the midpoint values.
struct SlackFunctions {
    std::vector<double> lambda_edge;
    std::vector<double> h_edge;
    std::vector<double> lambda_node;
    std::vector<double> h_node;
};

SlackFunctions slack_functions(const QuantileFunction& qbar, double lambda, const QuantileFunction& claim_q,
                               const UtilityModel& u, const QuantileFunction& kernel_q);

struct LagrangianSolution {
    double lambda;
    QuantileFunction qbar;
    SlackFunctions slack;
    double v_lambda;
    std::size_t merges = 0;
    std::size_t blocks = 0;
};

// Maximizes sum_i [u(q_i + claim_i) - lambda q_i rho_hat_i] over 0 <= q_1 <= ... <= q_n
// by pool-adjacent-violators with exact block solves.
LagrangianSolution solve_lagrangian(double lambda, const QuantileFunction& claim_q, const UtilityModel& u,
                                    const QuantileFunction& kernel_q, const PavaOptions& opts = {});

// Wraps an externally produced Qbar (e.g. the envelope route) with its slack functions.
LagrangianSolution make_lagrangian_solution(double lambda, QuantileFunction qbar, const QuantileFunction& claim_q,
                                            const UtilityModel& u, const QuantileFunction& kernel_q);

struct ComplementarityReport {
    bool ok = true;
    double min_h = 0.0;
    double max_complementarity = 0.0; // max |min(dQbar, H)|
    double terminal_h = 0.0;          // H(1)
    double terminal_lambda = 0.0;     // Lambda(1-)
    bool floor_ok = true;
    double boundary_mismatch = 0.0;   // relative error of -Lambda'(0+) vs u'(Qbar(0) + Q_claim(0)) on a free start
    std::vector<std::string> violations;
};

ComplementarityReport verify_complementarity(const LagrangianSolution& sol, const QuantileFunction& claim_q,
                                             const UtilityModel& u, const QuantileFunction& kernel_q, double tol);

// (1/n) sum [u'(Qbar + claim) - lambda rho_hat] (Q - Qbar); nonpositive at the optimum.
double directional_derivative(const QuantileFunction& qbar, const QuantileFunction& q, double lambda,
                              const QuantileFunction& claim_q, const UtilityModel& u, const QuantileFunction& kernel_q);

struct CalibrationOptions {
    double budget_tol = 1e-10; // relative to x
    double initial_lambda = 1.0;
    int max_doublings = 60;
    PavaOptions pava;
};

struct RobustSolution {
    double wealth;
    double lambda_star;
    LagrangianSolution lagrangian;
    double v0;          // J_0(Qbar)
    double dual_value;  // V_lambda + lambda x
    double budget_residual;
    int evaluations = 0;
    std::optional<WellposednessReport> wellposed;

    const QuantileFunction& qbar() const { return lagrangian.qbar; }
};

// Finds lambda* with pair_reversed(Qbar_lambda, Q_rho) = x.
RobustSolution calibrate(double x, const QuantileFunction& claim_q, const UtilityModel& u,
                         const QuantileFunction& kernel_q, const CalibrationOptions& opts = {});

// Same, after the claim/utility compatibility and well-posedness checks on a log-normal kernel.
RobustSolution calibrate(double x, const ClaimSpec& claim, const UtilityModel& u, const KernelLaw& law,
                         const Grid& grid, const CalibrationOptions& opts = {});

} // namespace rqopt
