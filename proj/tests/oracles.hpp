// Independent reference computations for the tests. Nothing here calls the library's
// numerics; only plain formulas, brute force and bisection.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline double norm_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

inline double norm_pdf(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// Bisection on erfc; accurate to a few ulps for p in [1e-300, 1 - 1e-16].
inline double norm_quantile(double p)
{
    if (p > 0.5)
        return -norm_quantile(1.0 - p);
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (norm_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// min over all permutations of (1/k) sum f(x_i + y_sigma(i))
inline double min_over_couplings(std::vector<double> x, std::vector<double> y, const std::function<double(double)>& f)
{
    std::vector<std::size_t> p(y.size());
    std::iota(p.begin(), p.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += f(x[i] + y[p[i]]);
        best = std::min(best, s / static_cast<double>(x.size()));
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

// min over permutations of (1/k) sum x_i y_sigma(i)
inline double min_product_coupling(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<std::size_t> p(y.size());
    std::iota(p.begin(), p.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += x[i] * y[p[i]];
        best = std::min(best, s / static_cast<double>(x.size()));
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

// Exact maximum of sum_i g_i(q_i) over nondecreasing q on the lattice {0, h, ..., (L-1)h}.
// best[i][l] = g_i(l h) + max_{l' <= l} best[i-1][l'].
inline double monotone_lattice_max(const std::vector<std::function<double(double)>>& g, double h, int L)
{
    std::vector<double> prev(L, 0.0), cur(L);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double run = -std::numeric_limits<double>::infinity();
        for (int l = 0; l < L; ++l) {
            run = std::max(run, prev[l]);
            cur[l] = g[i](h * l) + run;
        }
        prev = cur;
    }
    return *std::max_element(prev.begin(), prev.end());
}

// Upper concave envelope at each abscissa by the O(n^2) chord test.
inline std::vector<double> chord_envelope(const std::vector<double>& x, const std::vector<double>& f)
{
    const std::size_t n = x.size();
    std::vector<double> d(f);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = i; k <= j; ++k) {
                double c = f[i] + (f[j] - f[i]) * (x[k] - x[i]) / (x[j] - x[i]);
                d[k] = std::max(d[k], c);
            }
    return d;
}

// E[e^Z (k - Z)^+], Z ~ N(mu, sigma^2)
inline double call_on_log(double k, double mu, double sigma)
{
    double d = (k - mu - sigma * sigma) / sigma;
    return std::exp(mu + 0.5 * sigma * sigma) * ((k - mu - sigma * sigma) * norm_cdf(d) + sigma * norm_pdf(d));
}

// Exponential utility, zero claim, ln rho ~ N(m, s^2): X* = (k - ln rho)^+ / alpha with
// E[rho X*] = x. Returns k (the budget is increasing in k).
inline double merton_exp_level(double x, double alpha, double m, double s)
{
    double lo = -50.0, hi = 50.0;
    for (int i = 0; i < 300; ++i) {
        double mid = 0.5 * (lo + hi);
        if (call_on_log(mid, m, s) / alpha < x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// E[-exp(-alpha X*)] for the payoff above
inline double merton_exp_value(double k, double m, double s)
{
    double tail = 1.0 - norm_cdf((k - m) / s);
    return -tail - std::exp(-k) * std::exp(m + 0.5 * s * s) * norm_cdf((k - m - s * s) / s);
}

} // namespace oracle
