#include "oracles.hpp"
#include "rqopt/market.hpp"
#include "rqopt/simulate.hpp"

#include <doctest.h>

#include <algorithm>

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

} // namespace

TEST_CASE("reference kernel law")
{
    auto law = kernel_law(reference());
    CHECK(law.m == doctest::Approx(-0.06125).epsilon(1e-15));
    CHECK(law.s == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(law.mean() == doctest::Approx(0.970446).epsilon(1e-6));
}

TEST_CASE("piecewise rates add up")
{
    Eigen::VectorXd th(1);
    th << 0.25;
    Eigen::MatrixXd sg(1, 1);
    sg << 0.2;
    MarketSpec m(1.0, {{0.5, 0.02, th, sg}, {1.0, 0.04, th, sg}});
    auto law = kernel_law(m);
    CHECK(law.m == doctest::Approx(-0.06125).epsilon(1e-14));
    CHECK(law.s == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m.piece_at(0.5).r == 0.04);
    CHECK(m.piece_at(0.25).r == 0.02);
    CHECK(m.piece_at(1.0).r == 0.04);
}

TEST_CASE("theta from drifts and two assets")
{
    Eigen::VectorXd beta(2);
    beta << 0.08, 0.05;
    Eigen::MatrixXd sg(2, 2);
    sg << 0.2, 0.0, 0.05, 0.15;
    auto p = MarketSpec::piece_from_drift(1.0, 0.03, beta, sg);
    Eigen::VectorXd back = sg * p.theta + Eigen::VectorXd::Constant(2, 0.03);
    CHECK((back - beta).norm() < 1e-14);
}

TEST_CASE("invalid markets")
{
    Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
    Eigen::MatrixXd sg(1, 1);
    sg << 0.2;
    CHECK_THROWS_AS(MarketSpec(1.0, {{1.0, 0.03, z, sg}}), std::invalid_argument);
    Eigen::VectorXd th(1);
    th << 0.25;
    Eigen::MatrixXd sing = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(MarketSpec(1.0, {{1.0, 0.03, th, sing}}), std::invalid_argument);
    CHECK_THROWS_AS(MarketSpec(1.0, {{0.5, 0.03, th, sg}}), std::invalid_argument);
    CHECK_THROWS_AS(MarketSpec(-1.0, {{1.0, 0.03, th, sg}}), std::invalid_argument);
    CHECK_THROWS_AS(KernelLaw(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("kernel quantile values")
{
    KernelLaw law(-0.06125, 0.25);
    Grid g(4);
    auto q = kernel_quantile(law, g);
    CHECK(q[0] * q[3] == doctest::Approx(std::exp(2 * law.m)).epsilon(1e-15));
    CHECK(q[1] * q[2] == doctest::Approx(std::exp(2 * law.m)).epsilon(1e-15));
    CHECK(law.quantile(0.5) == doctest::Approx(0.940589).epsilon(1e-6));
    double z = oracle::norm_quantile(0.975);
    CHECK(law.quantile(0.975) == doctest::Approx(std::exp(-0.06125 + 0.25 * z)).epsilon(1e-12));
    CHECK(law.quantile(0.975) == doctest::Approx(1.535).epsilon(1e-3));

    auto big = kernel_quantile(law, Grid(1024));
    for (std::size_t i = 1; i < big.size(); ++i)
        CHECK(big[i] > big[i - 1]);
    for (double t : {1e-10, 1e-4, 0.3, 0.77, 1 - 1e-6})
        CHECK(law.quantile(t) == doctest::Approx(std::exp(law.m + law.s * oracle::norm_quantile(t))).epsilon(1e-12));
}

TEST_CASE("terminal kernel sample moments")
{
    auto m = reference();
    const std::size_t n = 100000;
    auto p = simulate_kernel(m, n, 4, 2024);
    double s = 0, s2 = 0, l = 0, l2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lv = p.log_at(i, 4), v = std::exp(lv);
        s += v;
        s2 += v * v;
        l += lv;
        l2 += lv * lv;
    }
    double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean - std::exp(-0.03)) < 3 * std::sqrt(var / n));

    double lm = l / n, lvar = (l2 / n - lm * lm) * n / (n - 1.0);
    // SE of a normal sample variance is sigma^2 sqrt(2/(n-1))
    CHECK(std::abs(lvar - 0.0625) < 3 * 0.0625 * std::sqrt(2.0 / (n - 1)));

    // driftless exponential factor exp(-int theta dW - int |theta|^2/2)
    double e = 0, e2 = 0;
    for (std::size_t i = 0; i < 20000; ++i) {
        double f = std::exp(p.log_at(i, 4) + 0.03);
        e += f;
        e2 += f * f;
    }
    double em = e / 20000, ev = e2 / 20000 - em * em;
    CHECK(std::abs(em - 1.0) < 3 * std::sqrt(ev / 20000));
}

TEST_CASE("empirical terminal law within DKW band")
{
    auto law = kernel_law(reference());
    const std::size_t n = 100000;
    auto p = simulate_kernel(reference(), n, 1, 5);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::exp(p.log_at(i, 1));
    std::sort(v.begin(), v.end());
    double eps = std::sqrt(std::log(2.0 / 0.001) / (2.0 * n));
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double F = law.cdf(v[i]);
        worst = std::max({worst, std::abs(F - (i + 1.0) / n), std::abs(F - static_cast<double>(i) / n)});
    }
    CHECK(worst < eps);
}

TEST_CASE("one step equals many steps with the matched terminal draw")
{
    auto m = reference();
    auto c64 = step_coefficients(m, 64);
    auto c1 = step_coefficients(m, 1);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    std::vector<double> z(64);
    double sum = 0;
    for (auto& x : z) {
        x = N(rng);
        sum += x;
    }
    std::vector<double> zt{sum / 8.0};
    auto p64 = kernel_path_from_normals(c64, z);
    auto p1 = kernel_path_from_normals(c1, zt);
    CHECK(p64.back() == doctest::Approx(p1.back()).epsilon(1e-13));
}

TEST_CASE("doubling the steps refines the same path")
{
    auto m = reference();
    for (std::size_t n : {16u, 24u, 100u}) {
        auto a = simulate_kernel(m, 5, n, 4);
        auto b = simulate_kernel(m, 5, 2 * n, 4);
        for (std::size_t p = 0; p < 5; ++p)
            for (std::size_t k = 0; k <= n; ++k)
                CHECK(b.log_at(p, 2 * k) == doctest::Approx(a.log_at(p, k)).epsilon(1e-12).scale(1.0));
    }
    std::vector<double> z(64);
    path_normals(1, 2, z);
    double s = 0, s2 = 0;
    for (auto v : z) {
        s += v;
        s2 += v * v;
    }
    CHECK(std::abs(s) / 8.0 < 4.0);
    CHECK(s2 / 64 == doctest::Approx(1.0).epsilon(0.6));
}

TEST_CASE("seeding contract")
{
    auto m = reference();
    auto a = simulate_kernel(m, 257, 16, 99);
    auto b = simulate_kernel_serial(m, 257, 16, 99);
    auto c = simulate_kernel(m, 257, 16, 100);
    CHECK(a.log_varrho == b.log_varrho);
    CHECK(a.log_varrho != c.log_varrho);
    // a path does not depend on how many others are simulated
    auto d = simulate_kernel(m, 10, 16, 99);
    for (std::size_t k = 0; k <= 16; ++k)
        CHECK(d.log_at(7, k) == a.log_at(7, k));
}
