#pragma once

#include <functional>

namespace rqopt {

struct TailIntegral {
    double value = 0.0;
    bool finite = false;
    int windows = 0; // windows consumed per side before the sums settled
};

// E[g(Z)], Z standard normal. The real line is cut at Z_k = Phi^{-1}(1 - 2^{-k});
// window contributions must Cauchy-settle at `tol` (relative to the running sum)
// on both sides, otherwise the integral is declared divergent.
TailIntegral gaussian_expectation(const std::function<double(double)>& g, double tol = 1e-8);

// int_0^1 f(t) dt with dyadic windows [2^{-k-1}, 2^{-k}] toward both endpoints.
TailIntegral unit_interval_integral(const std::function<double(double)>& f, double tol = 1e-8);

} // namespace rqopt
