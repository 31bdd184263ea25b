#include "oracles.hpp"
#include "rqopt/exp_solver.hpp"
#include "rqopt/vi_solver.hpp"

#include <doctest.h>

#include <random>

using namespace rqopt;

namespace {

const KernelLaw ref_law(-0.06125, 0.25);

QuantileFunction oracle_kernel(const Grid& g)
{
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::exp(ref_law.m + ref_law.s * oracle::norm_quantile(g.node(i)));
    return QuantileFunction(g, v, 0.0, std::numeric_limits<double>::infinity());
}

double sup_gap(const QuantileFunction& a, const QuantileFunction& b)
{
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_CASE("weighting function of the two-point claim")
{
    Grid g(1024);
    auto cq = ClaimSpec::atoms({0, 1}, {0.5, 0.5}).quantile(g);
    auto w = weighting(cq, 1.0);
    CHECK(w(0.5) == doctest::Approx(0.268941).epsilon(1e-6));
    CHECK(w(0.5) == doctest::Approx(std::exp(-1.0) / (1 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(w.normalizer == doctest::Approx((1 + std::exp(-1.0)) / 2).epsilon(1e-14));
    CHECK(w(0.0) == 0.0);
    CHECK(w(1.0) == 1.0);
    for (std::size_t j = 1; j < w.edge.size(); ++j)
        CHECK(w.edge[j] > w.edge[j - 1]);
    // linear on each half: slope e^{-1}/E|u| then 1/E|u|
    CHECK(w(0.25) == doctest::Approx(0.5 * w(0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(weighting(ClaimSpec::constant(1.0).quantile(g), 1.0), std::invalid_argument);
}

TEST_CASE("envelope input endpoints and a partial moment")
{
    Grid g(4096);
    auto kq = oracle_kernel(g);
    auto cq = ClaimSpec::atoms({0, 1}, {0.5, 0.5}).quantile(g);
    auto p = envelope_input(cq, 1.0, kq);
    const double norm = (1 + std::exp(-1.0)) / 2;
    const double er = std::exp(ref_law.m + 0.5 * ref_law.s * ref_law.s);
    REQUIRE(p.s.size() == g.size() + 1);
    CHECK(p.s.front() == 0.0);
    CHECK(p.s.back() == 1.0);
    CHECK(p.f.back() == 0.0);
    CHECK(p.f.front() == doctest::Approx(-er / norm).epsilon(1e-5));
    for (std::size_t j = 1; j < p.s.size(); ++j) {
        CHECK(p.s[j] > p.s[j - 1]);
        CHECK(p.f[j] > p.f[j - 1]);
    }
    // at s = 1 - w(1/2): -E[rho; ln rho <= m] / E|u(claim)|
    std::size_t mid = g.size() / 2;
    CHECK(p.s[mid] == doctest::Approx(1 - std::exp(-1.0) / (1 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(p.f[mid] == doctest::Approx(-er * oracle::norm_cdf(-ref_law.s) / norm).epsilon(1e-4));
}

TEST_CASE("concave envelope basics")
{
    std::vector<double> x{0, 0.2, 0.5, 0.9, 1.0};
    std::vector<double> conc(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        conc[i] = std::sqrt(x[i]);
    auto e = concave_envelope(x, conc);
    CHECK(e.knots.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(e.delta[i] == conc[i]);

    std::vector<double> vee{0.5, 0.3, 0.0, 0.4, 0.5};
    auto v = concave_envelope(x, vee);
    CHECK(v.knots == std::vector<std::size_t>{0, 4});
    for (double d : v.delta)
        CHECK(d == doctest::Approx(0.5));
    CHECK(v.slope_at(0.3) == doctest::Approx(0.0).scale(1.0));

    std::vector<double> kink{0, 0.5, 0.6, 0.7, 1.0};
    std::vector<double> kf{0, 0.5, 0.55, 0.6, 0.6};
    auto k = concave_envelope(kink, kf);
    // right-continuous slope at a knot
    CHECK(k.slope_at(0.5) == doctest::Approx(0.5));
    CHECK(k.slope_at(0.49) == doctest::Approx(1.0));
    CHECK(k.slope_at(1.0) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(k.slope_at(1.5), std::domain_error);

    std::vector<double> bad{0, 1, 1};
    CHECK_THROWS_AS(concave_envelope(bad, std::vector<double>{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("concave envelope against the chord oracle")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0, 1);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t n = 3 + rng() % 40;
        std::vector<double> x(n), f(n);
        for (auto& v : x)
            v = U(rng);
        std::sort(x.begin(), x.end());
        x.erase(std::unique(x.begin(), x.end()), x.end());
        f.resize(x.size());
        for (auto& v : f)
            v = U(rng) - 0.5;
        auto e = concave_envelope(x, f);
        auto want = oracle::chord_envelope(x, f);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(e.delta[i] == doctest::Approx(want[i]).epsilon(1e-12).scale(1.0));
            CHECK(e.delta[i] >= f[i] - 1e-15);
        }
        for (std::size_t i = 1; i < e.slope.size(); ++i)
            CHECK(e.slope[i] <= e.slope[i - 1] + 1e-12);
    }
}

TEST_CASE("constant claim reduces to the classical Merton solution")
{
    Grid g(2048);
    auto kq = oracle_kernel(g);
    auto cq = QuantileFunction::constant(g, 0.7);
    auto e = solve_exponential(2.0, cq, 1.5, kq);
    CHECK_FALSE(e.floor_active);
    auto v = calibrate(2.0, cq, UtilityModel::exponential(1.5), kq);
    CHECK(e.lambda == doctest::Approx(v.lambda_star).epsilon(1e-8));
    CHECK(sup_gap(e.qbar, v.qbar()) <= 1e-8);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double want = (std::log(1.5) - std::log(e.lambda * kq[g.mirror(i)])) / 1.5 - 0.7;
        CHECK(e.qbar[i] == doctest::Approx(want).epsilon(1e-10).scale(1.0));
    }
    CHECK(std::abs(e.budget_residual) <= 1e-10 * 2.0);
}

TEST_CASE("two-point claim: envelope route equals the PAVA route")
{
    for (std::size_t n : {256u, 1024u, 4096u}) {
        Grid g(n);
        auto kq = oracle_kernel(g);
        auto cq = ClaimSpec::atoms({0, 1}, {0.5, 0.5}).quantile(g);
        auto e = solve_exponential(1.0, cq, 1.0, kq);
        auto p = calibrate(1.0, cq, UtilityModel::exponential(1.0), kq);
        CHECK(std::abs(e.budget_residual) <= 1e-10);
        CHECK_FALSE(e.floor_active);
        CHECK(sup_gap(e.qbar, p.qbar()) <= 5.0 / n);
        CHECK(e.lambda == doctest::Approx(p.lambda_star).epsilon(1e-6));
        CHECK(e.v0 == doctest::Approx(p.v0).epsilon(1e-9));
    }
}

TEST_CASE("continuous claims: envelope route equals the PAVA route")
{
    Grid g(1024);
    auto kq = oracle_kernel(g);
    for (auto claim : {ClaimSpec::uniform(-0.5, 1.5), ClaimSpec::shifted_lognormal(0, 0.5, -0.5)}) {
        auto cq = claim.quantile(g);
        auto e = solve_exponential(1.5, cq, 0.8, kq);
        auto p = calibrate(1.5, cq, UtilityModel::exponential(0.8), kq);
        CHECK(sup_gap(e.qbar, p.qbar()) <= 5.0 / 1024);
        CHECK(e.lambda == doctest::Approx(p.lambda_star).epsilon(1e-6));
    }
}

TEST_CASE("floored solution at small wealth")
{
    Grid g(1024);
    auto kq = oracle_kernel(g);
    auto cq = ClaimSpec::atoms({0, 1}, {0.5, 0.5}).quantile(g);
    auto e = solve_exponential(0.05, cq, 1.0, kq);
    CHECK(e.floor_active);
    CHECK(e.qbar[0] == 0.0);
    CHECK(std::abs(e.budget_residual) <= 1e-10);
    auto p = calibrate(0.05, cq, UtilityModel::exponential(1.0), kq);
    CHECK(sup_gap(e.qbar, p.qbar()) <= 5.0 / 1024);
    CHECK(e.lambda == doctest::Approx(p.lambda_star).epsilon(1e-6));
}

TEST_CASE("hull gaps map to flat segments of Qbar and to H > 0")
{
    Grid g(1024);
    auto kq = oracle_kernel(g);
    auto cq = ClaimSpec::atoms({0, 1}, {0.5, 0.5}).quantile(g);
    auto e = solve_exponential(1.0, cq, 1.0, kq);
    auto p = calibrate(1.0, cq, UtilityModel::exponential(1.0), kq);
    const auto& h = p.lagrangian.slack.h_edge;
    std::size_t flat = 0, positive = 0, sym = 0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        bool is_flat = e.qbar[i + 1] - e.qbar[i] <= 1e-12;
        bool h_pos = h[i + 1] > 1e-12;
        flat += is_flat;
        positive += h_pos;
        sym += is_flat != h_pos;
    }
    CHECK(flat > 0);
    CHECK(positive > 0);
    CHECK(sym <= 2);
}

TEST_CASE("wealth validation")
{
    Grid g(16);
    auto kq = oracle_kernel(g);
    auto cq = ClaimSpec::uniform(0, 1).quantile(g);
    CHECK_THROWS_AS(solve_exponential(0.0, cq, 1.0, kq), std::invalid_argument);
    CHECK_THROWS_AS(solve_exponential(1.0, cq, -1.0, kq), std::invalid_argument);
}
