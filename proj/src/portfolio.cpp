#include "rqopt/portfolio.hpp"
#include "rqopt/normal.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rqopt {

namespace {

// relative slope change that counts as a kink; smooth stretches change by far less per cell
constexpr double kink_ratio = 0.05;
// half-width of the split rule in standard deviations, and its longest Gauss-Legendre piece
constexpr double window = 8.0;
constexpr double max_piece = 2.0;

} // namespace

TerminalMap::TerminalMap(const QuantileFunction& qbar, KernelLaw law, double wealth) : law_(law), x_(wealth)
{
    if (!qbar.nonnegative())
        throw std::invalid_argument("terminal quantile must be nonnegative");
    const std::size_t n = qbar.size();
    z_.resize(n);
    value_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        // rho at score z has F_rho = Phi(z), so the payoff is Qbar(1 - Phi(z)) = Qbar(Phi(-z))
        z_[j] = normal_quantile(qbar.grid().node(j));
        value_[j] = qbar[n - 1 - j];
    }

    auto slope = [&](std::size_t j) { return (value_[j + 1] - value_[j]) / (z_[j + 1] - z_[j]); };
    for (std::size_t j = 1; j + 1 < n; ++j) {
        double a = slope(j - 1), b = slope(j);
        double scale = std::max(std::abs(a), std::abs(b));
        if (scale > 0.0 && std::abs(b - a) > kink_ratio * scale)
            kinks_.push_back(z_[j]);
    }
    double last = n > 1 ? slope(n - 2) : 0.0;
    if (value_.back() > 0.0 && last < 0.0)
        kinks_.push_back(z_.back() + value_.back() / -last);
}

double TerminalMap::conditional(double log_y, double m_r, double s_r, const GaussHermite& gh) const
{
    if (s_r == 0.0)
        return std::exp(m_r) * at_log(log_y + m_r);
    // E[e^{ln R} X*] = e^{m_r + s_r^2/2} E[X*(y e^{m_r + s_r^2 + s_r V})], V standard normal
    const double lead = std::exp(m_r + 0.5 * s_r * s_r);
    const double base = log_y + m_r + s_r * s_r;
    auto payoff = [&](double v) { return at_log(base + s_r * v); };

    // kinks in v
    std::vector<double> cuts{-window};
    for (double zk : kinks_) {
        double v = (law_.m + law_.s * zk - base) / s_r;
        if (v > -window && v < window)
            cuts.push_back(v);
    }
    if (cuts.size() == 1) {
        double y = 0.0;
        for (std::size_t k = 0; k < gh.nodes.size(); ++k)
            y += gh.weights[k] * payoff(gh.nodes[k]);
        return lead * y;
    }
    cuts.push_back(window);
    std::sort(cuts.begin(), cuts.end());
    double y = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        auto pieces = static_cast<int>(std::ceil((b - a) / max_piece));
        for (int p = 0; p < pieces; ++p) {
            double lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces;
            y += boost::math::quadrature::gauss<double, 15>::integrate(
                [&](double v) { return payoff(v) * normal_pdf(v); }, lo, hi);
        }
    }
    return lead * y;
}

double TerminalMap::at_log(double log_rho) const
{
    double z = (log_rho - law_.m) / law_.s;
    const std::size_t n = z_.size();
    std::size_t a;
    if (z <= z_.front())
        a = 0;
    else if (z >= z_.back())
        a = n - 2;
    else
        a = static_cast<std::size_t>(std::upper_bound(z_.begin(), z_.end(), z) - z_.begin()) - 1;
    double v = value_[a] + (value_[a + 1] - value_[a]) * (z - z_[a]) / (z_[a + 1] - z_[a]);
    return std::max(0.0, v);
}

const GaussHermite& gauss_hermite(int n)
{
    static std::mutex mu;
    static std::map<int, GaussHermite> cache;
    if (n < 1)
        throw std::invalid_argument("Gauss-Hermite rule needs at least one node");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k)
        J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermite g;
    for (int k = 0; k < n; ++k) {
        g.nodes.push_back(es.eigenvalues()(k));
        double v = es.eigenvectors()(0, k);
        g.weights.push_back(v * v);
    }
    return cache.emplace(n, std::move(g)).first->second;
}

namespace {

struct Residual {
    double m;
    double s;
};

Residual residual_law(double t, const MarketSpec& market)
{
    double T = market.horizon();
    if (t < 0.0 || t > T)
        throw std::domain_error("time outside [0,T]");
    double v = market.integrated_theta_sq(t, T);
    return {-(market.integrated_rate(t, T) + 0.5 * v), std::sqrt(v)};
}

double conditional_wealth(double log_varrho, const Residual& rl, const TerminalMap& map, const GaussHermite& gh)
{
    return map.conditional(log_varrho, rl.m, rl.s, gh);
}

constexpr double fd_step = 1e-5;

double phi_y_at(double log_varrho, const Residual& rl, const TerminalMap& map, const GaussHermite& gh, bool* widened)
{
    double h = fd_step;
    // at the horizon there is no conditional smoothing left, so step over several map cells
    if (rl.s < 1e-8) {
        h = 1e-3;
        if (widened)
            *widened = true;
    }
    double up = std::log1p(h), dn = std::log1p(-h);
    double fu = (1.0 + h) * conditional_wealth(log_varrho + up, rl, map, gh);
    double fd = (1.0 - h) * conditional_wealth(log_varrho + dn, rl, map, gh);
    // phi(y) = y Y(y) at y(1 +- h); the factor y cancels
    return (fu - fd) / (2.0 * h);
}

} // namespace

double wealth(double t, double varrho, const TerminalMap& map, const MarketSpec& market, int gh_nodes)
{
    if (!(varrho > 0.0))
        throw std::domain_error("kernel value must be positive");
    return conditional_wealth(std::log(varrho), residual_law(t, market), map, gauss_hermite(gh_nodes));
}

double phi_y(double t, double varrho, const TerminalMap& map, const MarketSpec& market, bool* widened)
{
    if (!(varrho > 0.0))
        throw std::domain_error("kernel value must be positive");
    return phi_y_at(std::log(varrho), residual_law(t, market), map, gauss_hermite(64), widened);
}

FeedbackPosition feedback_portfolio(double t, double varrho, double current_wealth, const MarketSpec& market,
                                    const TerminalMap& map)
{
    FeedbackPosition p;
    p.wealth = current_wealth;
    p.phi_y = phi_y(t, varrho, map, market, &p.widened_step);
    const auto& piece = market.piece_at(t);
    p.pi = piece.sigma.transpose().fullPivLu().solve(piece.theta) * (current_wealth - p.phi_y);
    return p;
}

FeedbackPosition feedback_portfolio(double t, double varrho, const MarketSpec& market, const TerminalMap& map)
{
    return feedback_portfolio(t, varrho, wealth(t, varrho, map, market), market, map);
}

} // namespace rqopt
