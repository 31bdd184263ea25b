#pragma once

#include "rqopt/quantile.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rqopt {

// Coefficients held constant on [previous end, end).
struct MarketPiece {
    double end;
    double r;
    Eigen::VectorXd theta;
    Eigen::MatrixXd sigma;
};

class MarketSpec {
public:
    MarketSpec(double horizon, std::vector<MarketPiece> pieces);

    // theta = sigma^{-1}(beta - r 1)
    static MarketPiece piece_from_drift(double end, double r, const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma);

    double horizon() const { return T_; }
    std::size_t dimension() const { return static_cast<std::size_t>(pieces_.front().theta.size()); }
    const std::vector<MarketPiece>& pieces() const { return pieces_; }
    const MarketPiece& piece_at(double t) const;
    double start_of(std::size_t k) const { return k == 0 ? 0.0 : pieces_[k - 1].end; }

    double integrated_rate(double a, double b) const;     // int_a^b r
    double integrated_theta_sq(double a, double b) const; // int_a^b |theta|^2

private:
    double T_;
    std::vector<MarketPiece> pieces_;
};

// ln rho ~ N(m, s^2)
struct KernelLaw {
    double m;
    double s;

    KernelLaw(double m_, double s_);
    double mean() const;
    double quantile(double t) const;
    double cdf(double rho) const;
};

KernelLaw kernel_law(const MarketSpec& market);
QuantileFunction kernel_quantile(const KernelLaw& law, const Grid& grid);

} // namespace rqopt
