#include "rqopt/market.hpp"
#include "rqopt/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rqopt {

MarketSpec::MarketSpec(double horizon, std::vector<MarketPiece> pieces) : T_(horizon), pieces_(std::move(pieces))
{
    if (!(T_ > 0.0) || !std::isfinite(T_))
        throw std::invalid_argument("horizon must be positive");
    if (pieces_.empty())
        throw std::invalid_argument("market needs at least one coefficient piece");
    const auto d = pieces_.front().theta.size();
    if (d == 0)
        throw std::invalid_argument("market needs at least one stock");
    double prev = 0.0;
    bool any_theta = false;
    for (const auto& p : pieces_) {
        if (!(p.end > prev))
            throw std::invalid_argument("market pieces must have increasing end times");
        if (!std::isfinite(p.r))
            throw std::invalid_argument("interest rate not finite");
        if (p.theta.size() != d || p.sigma.rows() != d || p.sigma.cols() != d)
            throw std::invalid_argument("market piece dimensions disagree");
        if (!p.theta.allFinite() || !p.sigma.allFinite())
            throw std::invalid_argument("market coefficients not finite");
        Eigen::FullPivLU<Eigen::MatrixXd> lu(p.sigma);
        if (!lu.isInvertible())
            throw std::invalid_argument("volatility matrix is singular");
        any_theta = any_theta || p.theta.squaredNorm() > 0.0;
        prev = p.end;
    }
    if (std::abs(prev - T_) > 1e-12 * T_)
        throw std::invalid_argument("last market piece must end at the horizon");
    pieces_.back().end = T_;
    if (!any_theta)
        throw std::invalid_argument("market price of risk is identically zero");
}

MarketPiece MarketSpec::piece_from_drift(double end, double r, const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma)
{
    Eigen::VectorXd excess = beta - Eigen::VectorXd::Constant(beta.size(), r);
    Eigen::VectorXd theta = sigma.fullPivLu().solve(excess);
    return {end, r, theta, sigma};
}

const MarketPiece& MarketSpec::piece_at(double t) const
{
    if (t < 0.0 || t > T_)
        throw std::domain_error("time outside [0,T]");
    for (const auto& p : pieces_)
        if (t < p.end)
            return p;
    return pieces_.back();
}

namespace {

template <class F>
double integrate_pieces(const MarketSpec& m, double a, double b, F value)
{
    if (a < 0.0 || b > m.horizon() * (1 + 1e-15) || a > b)
        throw std::domain_error("integration window outside [0,T]");
    double s = 0.0;
    for (std::size_t k = 0; k < m.pieces().size(); ++k) {
        double lo = std::max(a, m.start_of(k));
        double hi = std::min(b, m.pieces()[k].end);
        if (hi > lo)
            s += (hi - lo) * value(m.pieces()[k]);
    }
    return s;
}

} // namespace

double MarketSpec::integrated_rate(double a, double b) const
{
    return integrate_pieces(*this, a, b, [](const MarketPiece& p) { return p.r; });
}

double MarketSpec::integrated_theta_sq(double a, double b) const
{
    return integrate_pieces(*this, a, b, [](const MarketPiece& p) { return p.theta.squaredNorm(); });
}

KernelLaw::KernelLaw(double m_, double s_) : m(m_), s(s_)
{
    if (!std::isfinite(m) || !(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("kernel law needs finite m and s > 0");
}

double KernelLaw::mean() const
{
    return std::exp(m + 0.5 * s * s);
}

double KernelLaw::quantile(double t) const
{
    return std::exp(m + s * normal_quantile(t));
}

double KernelLaw::cdf(double rho) const
{
    if (rho <= 0.0)
        return 0.0;
    return normal_cdf((std::log(rho) - m) / s);
}

KernelLaw kernel_law(const MarketSpec& market)
{
    double T = market.horizon();
    double th2 = market.integrated_theta_sq(0.0, T);
    return KernelLaw(-(market.integrated_rate(0.0, T) + 0.5 * th2), std::sqrt(th2));
}

QuantileFunction kernel_quantile(const KernelLaw& law, const Grid& grid)
{
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = law.quantile(grid.node(i));
    return QuantileFunction(grid, std::move(v), 0.0, std::numeric_limits<double>::infinity());
}

} // namespace rqopt
