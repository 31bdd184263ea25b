#include "rqopt/integrate.hpp"
#include "rqopt/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace rqopt {

namespace {

constexpr int settle_windows = 3;

double gk(const std::function<double(double)>& f, double a, double b)
{
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-13);
}

// Adds windows produced by `window(k)` for k = 1..k_max until `settle_windows`
// consecutive ones are negligible. Returns false on divergence.
template <class W>
bool sweep(W window, int k_max, double tol, double& total, int& used)
{
    int quiet = 0;
    for (int k = 1; k <= k_max; ++k) {
        double w = window(k);
        if (!std::isfinite(w))
            return false;
        total += w;
        used = k;
        if (std::abs(w) <= tol * std::max(1.0, std::abs(total))) {
            if (++quiet == settle_windows)
                return true;
        } else {
            quiet = 0;
        }
    }
    return false;
}

} // namespace

TailIntegral gaussian_expectation(const std::function<double(double)>& g, double tol)
{
    auto f = [&](double z) { return g(z) * normal_pdf(z); };
    // cut points Z_k = Phi^{-1}(1 - 2^{-k}); Z_1 = 0
    auto cut = [](int k) { return -normal_quantile(std::ldexp(1.0, -k)); };

    TailIntegral r;
    double total = 0.0;
    int up = 0, down = 0;
    bool ok_up = sweep([&](int k) { return gk(f, cut(k), cut(k + 1)); }, 52, tol, total, up);
    bool ok_down = sweep([&](int k) { return gk(f, -cut(k + 1), -cut(k)); }, 52, tol, total, down);
    r.value = total;
    r.finite = ok_up && ok_down && std::isfinite(total);
    r.windows = std::max(up, down);
    return r;
}

TailIntegral unit_interval_integral(const std::function<double(double)>& f, double tol)
{
    TailIntegral r;
    double total = gk(f, 0.25, 0.75);
    if (!std::isfinite(total))
        return r;
    int lo = 0, hi = 0;
    bool ok_lo = sweep([&](int k) { return gk(f, std::ldexp(1.0, -k - 2), std::ldexp(1.0, -k - 1)); },
                       1000, tol, total, lo);
    // toward 1 the abscissae run out of precision past 2^-52
    bool ok_hi = sweep([&](int k) { return gk(f, 1.0 - std::ldexp(1.0, -k - 1), 1.0 - std::ldexp(1.0, -k - 2)); },
                       50, tol, total, hi);
    r.value = total;
    r.finite = ok_lo && ok_hi && std::isfinite(total);
    r.windows = std::max(lo, hi);
    return r;
}

} // namespace rqopt
