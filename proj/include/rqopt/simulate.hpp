#pragma once

#include "rqopt/market.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rqopt {

// Per-step integrals of the kernel exponent on a uniform time grid.
struct StepCoefficients {
    double dt;
    std::vector<double> drift;    // int (r + |theta|^2/2) over the step
    std::vector<double> variance; // int |theta|^2 over the step
    std::vector<double> rate;     // int r over the step
};

StepCoefficients step_coefficients(const MarketSpec& market, std::size_t n_steps);

// Independent stream for path `path`; the same (seed, path) always gives the same draws.
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path);

// Standardized Brownian increments of path `path`, one per step (iid standard normal).
// The path is built by bisection, so 2n steps refine the n-step path of the same (seed, path).
void path_normals(std::uint64_t seed, std::uint64_t path, std::span<double> out);

// ln varrho on the time grid (n_steps + 1 values per path, row-major).
struct KernelPaths {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::vector<double> log_varrho;

    double log_at(std::size_t path, std::size_t step) const { return log_varrho[path * (n_steps + 1) + step]; }
};

// ln varrho path driven by the given standard normal increments, one per step.
std::vector<double> kernel_path_from_normals(const StepCoefficients& c, std::span<const double> normals);

KernelPaths simulate_kernel(const MarketSpec& market, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed);
KernelPaths simulate_kernel_serial(const MarketSpec& market, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed);

} // namespace rqopt
