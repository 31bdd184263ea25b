#pragma once

#include "rqopt/market.hpp"
#include "rqopt/quantile.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace rqopt {

// Probabilists' Gauss-Hermite rule: E[g(Z)] ~ sum w_k g(z_k).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussHermite& gauss_hermite(int n);

// X*(rho) = Qbar(1 - F_rho(rho)), interpolated linearly in z = (ln rho - m)/s between grid
// nodes and extrapolated linearly past the ends, floored at 0.
class TerminalMap {
public:
    TerminalMap(const QuantileFunction& qbar, KernelLaw law, double wealth);

    double operator()(double rho) const { return at_log(std::log(rho)); }
    double at_log(double log_rho) const;

    // E[R X*(y R)] for ln R ~ N(m_r, s_r^2). Gauss-Hermite when the payoff is smooth over the
    // effective range; split Gauss-Legendre at the payoff's kinks otherwise.
    double conditional(double log_y, double m_r, double s_r, const GaussHermite& gh) const;
    // normal scores where the payoff slope breaks (the 0 floor, ends of flat stretches)
    const std::vector<double>& kinks() const { return kinks_; }

    const KernelLaw& law() const { return law_; }
    double initial_wealth() const { return x_; }

private:
    KernelLaw law_;
    double x_;
    std::vector<double> z_;     // ascending normal scores
    std::vector<double> value_; // non-increasing payoff at z_
    std::vector<double> kinks_;
};

// Y(t, varrho) = E[R X*(varrho R)], ln R ~ N(-int_t^T (r + |theta|^2/2), int_t^T |theta|^2).
double wealth(double t, double varrho, const TerminalMap& map, const MarketSpec& market, int gh_nodes = 64);

struct FeedbackPosition {
    double wealth;      // Y(t, varrho)
    double phi_y;       // d/dy [y Y(t, y)] at y = varrho
    Eigen::VectorXd pi; // (sigma^T)^{-1} theta (wealth - phi_y)
    bool widened_step = false;
};

// d/dy [y Y(t, y)] by central differences with relative step 1e-5.
double phi_y(double t, double varrho, const TerminalMap& map, const MarketSpec& market, bool* widened = nullptr);

FeedbackPosition feedback_portfolio(double t, double varrho, const MarketSpec& market, const TerminalMap& map);
// Same, evaluated at an externally simulated wealth level.
FeedbackPosition feedback_portfolio(double t, double varrho, double current_wealth, const MarketSpec& market,
                                    const TerminalMap& map);

struct PathRecord {
    std::size_t path;
    double t;
    double varrho;
    double wealth;
};

struct ReplicationReport {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double terminal_rmse = 0.0;
    double pathwise_max_err = 0.0;
    double mean_target = 0.0;       // sample mean of X*(varrho(T))
    double budget_gap = 0.0;        // |X(0) - x|
    double model_budget_gap = 0.0;  // |Y(0,1) - x|: grid budget vs quadrature of the terminal map
    std::vector<double> monitor_times;
    std::vector<double> deflated_mean; // sample mean of varrho(t) X(t)
    std::vector<double> deflated_se;
    bool anti_monotone = true;      // X* non-increasing in the terminal kernel across paths
    std::vector<PathRecord> records;
};

// Rolls the wealth SDE forward under the feedback strategy on simulated kernel paths.
ReplicationReport replicate_and_verify(const MarketSpec& market, const TerminalMap& map, std::size_t n_paths,
                                       std::size_t n_steps, std::uint64_t seed, std::size_t record_paths = 0);
ReplicationReport replicate_and_verify_serial(const MarketSpec& market, const TerminalMap& map, std::size_t n_paths,
                                              std::size_t n_steps, std::uint64_t seed, std::size_t record_paths = 0);

} // namespace rqopt
