#pragma once

#include "rqopt/quantile.hpp"

#include <span>
#include <vector>

namespace rqopt {

// w(t) = int_0^t |u(Q_claim(1-s))| ds / E|u(claim)| for u(x) = -exp(-alpha x), on the grid edges.
struct WeightingFunction {
    std::vector<double> edge; // w(j/n), j = 0..n; edge[0] = 0, edge[n] = 1
    double normalizer;        // E|u(claim)|

    double operator()(double t) const;
    double at_node(std::size_t i) const { return 0.5 * (edge[i] + edge[i + 1]); }
};

// Throws for an a.s. constant claim; those use the classical route.
WeightingFunction weighting(const QuantileFunction& claim_q, double alpha);

// Points (s_j, f_j), j = 0..n, of f(s) = -int_0^{w^{-1}(1-s)} Q_rho / E|u(claim)| taken at
// s_j = 1 - w(1 - j/n), where w^{-1} lands exactly on grid edges.
struct EnvelopePoints {
    std::vector<double> s;
    std::vector<double> f;
};

EnvelopePoints envelope_input(const QuantileFunction& claim_q, double alpha, const QuantileFunction& kernel_q);

struct EnvelopeResult {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> delta;       // upper concave envelope at x
    std::vector<double> slope;       // right derivative at x (left derivative at the last point)
    std::vector<std::size_t> knots;  // hull vertices, always including both ends

    // right-continuous derivative of the envelope at s in [x_0, x_last]
    double slope_at(double s) const;
};

// Upper concave envelope by the monotone chain; x strictly increasing.
EnvelopeResult concave_envelope(std::span<const double> x, std::span<const double> f);

struct ExpSolution {
    double wealth;
    double lambda;
    QuantileFunction qbar;
    std::vector<double> delta_prime; // envelope slope at s(t_i) = 1 - w(1 - t_i)
    WeightingFunction w;
    EnvelopeResult envelope;
    double log_slope_integral;       // (1/n) sum ln(delta'_i) Q_rho(1 - t_i)
    double kernel_mean;              // (1/n) sum Q_rho(t_i)
    double v0;
    double budget_residual;
    bool floor_active;               // the nonnegativity floor binds, lambda re-solved on the floored budget
};

ExpSolution solve_exponential(double x, const QuantileFunction& claim_q, double alpha, const QuantileFunction& kernel_q);

} // namespace rqopt
