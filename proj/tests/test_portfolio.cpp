#include "oracles.hpp"
#include "rqopt/portfolio.hpp"
#include "rqopt/vi_solver.hpp"

#include <doctest.h>

using namespace rqopt;

namespace {

MarketSpec reference()
{
    Eigen::VectorXd th(1);
    th << 0.25;
    Eigen::MatrixXd sg(1, 1);
    sg << 0.2;
    return MarketSpec(1.0, {{1.0, 0.03, th, sg}});
}

struct Merton {
    MarketSpec market = reference();
    KernelLaw law = kernel_law(market);
    Grid grid{4096};
    double alpha;
    double x;
    RobustSolution sol;
    double k; // discrete level: Qbar = (k - ln rho)/alpha

    Merton(double alpha_, double x_)
        : alpha(alpha_), x(x_),
          sol(calibrate(x_, QuantileFunction::constant(grid, 0.0), UtilityModel::exponential(alpha_),
                        kernel_quantile(law, grid))),
          k(std::log(alpha_ / sol.lambda_star))
    {
    }
    TerminalMap map() const { return TerminalMap(sol.qbar(), law, x); }
};

} // namespace

TEST_CASE("terminal map is non-increasing and reproduces the grid")
{
    Merton mm(1.0, 2.0);
    auto map = mm.map();
    double prev = std::numeric_limits<double>::infinity();
    for (double lr = -3; lr <= 3; lr += 0.01) {
        double v = map.at_log(lr);
        CHECK(v <= prev);
        CHECK(v >= 0.0);
        prev = v;
    }
    auto kq = kernel_quantile(mm.law, mm.grid);
    for (std::size_t i = 0; i < mm.grid.size(); i += 97)
        CHECK(map(kq[mm.grid.mirror(i)]) == doctest::Approx(mm.sol.qbar()[i]).epsilon(1e-12));
    // exact in z for the classical payoff, including far outside the grid
    for (double lr : {-2.0, 0.0, 1.5, mm.k + 0.5})
        CHECK(map.at_log(lr) == doctest::Approx(std::max(0.0, mm.k - lr) / mm.alpha).epsilon(1e-9).scale(1.0));
}

TEST_CASE("Gauss-Hermite moments")
{
    const auto& gh = gauss_hermite(64);
    double m0 = 0, m2 = 0, m4 = 0, me = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        double z = gh.nodes[i], w = gh.weights[i];
        m0 += w;
        m2 += w * z * z;
        m4 += w * z * z * z * z;
        me += w * std::exp(z);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(me == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    CHECK(&gauss_hermite(64) == &gh);
    CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}

TEST_CASE("wealth process at the ends and in between")
{
    Merton mm(1.0, 3.0);
    auto map = mm.map();
    // the continuous budget of the grid payoff; the grid budget itself differs by the midpoint error
    CHECK(wealth(0.0, 1.0, map, mm.market) == doctest::Approx(oracle::call_on_log(mm.k, -0.06125, 0.25) / mm.alpha).epsilon(1e-9));
    CHECK(wealth(0.0, 1.0, map, mm.market) == doctest::Approx(3.0).epsilon(1e-4));
    for (double v : {0.5, 1.0, 2.0})
        CHECK(wealth(1.0, v, map, mm.market) == map(v));

    // Y(t, y) = E[R (k - ln y - ln R)^+]/alpha, ln R ~ N(-(r + theta^2/2)(T-t), theta^2 (T-t))
    const double t = 0.5, tau = 0.5;
    const double mu = -(0.03 + 0.5 * 0.0625) * tau, sd = 0.25 * std::sqrt(tau);
    for (double y : {0.6, 1.0, 1.7}) {
        double want = oracle::call_on_log(mm.k - std::log(y), mu, sd) / mm.alpha;
        CHECK(wealth(t, y, map, mm.market) == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK_THROWS_AS(wealth(1.5, 1.0, map, mm.market), std::domain_error);
    CHECK_THROWS_AS(wealth(0.5, -1.0, map, mm.market), std::domain_error);
}

TEST_CASE("feedback exposure of the classical exponential investor")
{
    Merton mm(2.0, 3.0);
    auto map = mm.map();
    const double t = 0.5, tau = 0.5;
    const double mu = -(0.03 + 0.5 * 0.0625) * tau, sd = 0.25 * std::sqrt(tau);
    for (double y : {0.7, 1.0, 1.4}) {
        auto pos = feedback_portfolio(t, y, mm.market, map);
        double d = (mm.k - std::log(y) - mu - sd * sd) / sd;
        double exposure = std::exp(mu + 0.5 * sd * sd) * oracle::norm_cdf(d) / mm.alpha;
        CHECK(pos.wealth - pos.phi_y == doctest::Approx(exposure).epsilon(1e-6));
        CHECK(pos.pi(0) == doctest::Approx(0.25 / 0.2 * exposure).epsilon(1e-6));
        CHECK_FALSE(pos.widened_step);
    }
    auto at = feedback_portfolio(t, 1.0, 5.0, mm.market, map);
    CHECK(at.wealth == 5.0);
}

TEST_CASE("constant payoff is held in the bond")
{
    auto market = reference();
    auto law = kernel_law(market);
    Grid g(256);
    TerminalMap map(QuantileFunction::constant(g, 1.3), law, 1.3 * std::exp(-0.03));
    for (double t : {0.0, 0.3, 0.9}) {
        auto pos = feedback_portfolio(t, 1.1, market, map);
        CHECK(pos.wealth == doctest::Approx(1.3 * std::exp(-0.03 * (1 - t))).epsilon(1e-12));
        CHECK(std::abs(pos.pi(0)) <= 1e-8);
    }
}

TEST_CASE("replication on simulated paths")
{
    Merton mm(1.0, 1.0);
    auto map = mm.map();
    auto par = replicate_and_verify(mm.market, map, 400, 64, 7, 3);
    auto ser = replicate_and_verify_serial(mm.market, map, 400, 64, 7, 3);
    CHECK(par.terminal_rmse == ser.terminal_rmse);
    CHECK(par.pathwise_max_err == ser.pathwise_max_err);
    CHECK(par.mean_target == ser.mean_target);
    CHECK(par.deflated_mean == ser.deflated_mean);
    REQUIRE(par.records.size() == ser.records.size());
    for (std::size_t i = 0; i < par.records.size(); ++i)
        CHECK(par.records[i].wealth == ser.records[i].wealth);
    CHECK(par.records.size() == 3 * 65);

    CHECK(par.budget_gap == 0.0);
    CHECK(par.anti_monotone);
    CHECK(par.terminal_rmse <= 0.01);
    REQUIRE(par.monitor_times.size() == 5);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(std::abs(par.deflated_mean[k] - 1.0) <= 3 * par.deflated_se[k] + 1e-3);
    CHECK(par.model_budget_gap <= 1e-4);
}

TEST_CASE("replication argument checks")
{
    Merton mm(1.0, 1.0);
    auto map = mm.map();
    CHECK_THROWS_AS(replicate_and_verify(mm.market, map, 10, 8, 1), std::invalid_argument);
    CHECK_THROWS_AS(replicate_and_verify(mm.market, map, 10, 30, 1), std::invalid_argument);
    CHECK_THROWS_AS(replicate_and_verify(mm.market, map, 0, 32, 1), std::invalid_argument);
    Grid g(8);
    std::vector<double> neg{-1, 0, 0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(TerminalMap(QuantileFunction(g, neg, -1, 0), mm.law, 1.0), std::invalid_argument);
}
