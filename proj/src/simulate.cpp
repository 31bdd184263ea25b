#include "rqopt/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace rqopt {

StepCoefficients step_coefficients(const MarketSpec& market, std::size_t n_steps)
{
    if (n_steps < 1)
        throw std::invalid_argument("need at least one time step");
    StepCoefficients c;
    const double T = market.horizon();
    c.dt = T / static_cast<double>(n_steps);
    c.drift.resize(n_steps);
    c.variance.resize(n_steps);
    c.rate.resize(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        double a = T * static_cast<double>(k) / static_cast<double>(n_steps);
        double b = k + 1 == n_steps ? T : T * static_cast<double>(k + 1) / static_cast<double>(n_steps);
        c.rate[k] = market.integrated_rate(a, b);
        c.variance[k] = market.integrated_theta_sq(a, b);
        c.drift[k] = c.rate[k] + 0.5 * c.variance[k];
    }
    return c;
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> kernel_path_from_normals(const StepCoefficients& c, std::span<const double> normals)
{
    if (normals.size() != c.drift.size())
        throw std::invalid_argument("one normal draw per step required");
    std::vector<double> out(normals.size() + 1);
    out[0] = 0.0;
    for (std::size_t k = 0; k < normals.size(); ++k)
        out[k + 1] = out[k] - c.drift[k] - std::sqrt(c.variance[k]) * normals[k];
    return out;
}

namespace {

// Box-Muller on the raw engine, so the draws do not depend on the standard
// library's normal_distribution implementation.
class Normals {
public:
    explicit Normals(std::mt19937_64& eng) : eng_(eng) {}
    double operator()()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return rad * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
    std::mt19937_64& eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

void fill_path(const StepCoefficients& c, std::uint64_t seed, std::size_t path, double* out)
{
    std::vector<double> z(c.drift.size());
    path_normals(seed, path, z);
    out[0] = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k)
        out[k + 1] = out[k] - c.drift[k] - std::sqrt(c.variance[k]) * z[k];
}

} // namespace

void path_normals(std::uint64_t seed, std::uint64_t path, std::span<double> out)
{
    const std::size_t n = out.size();
    if (n == 0)
        return;
    auto eng = path_engine(seed, path);
    Normals z(eng);
    // n = m 2^j with m odd: m forward steps of length 2^j, then bisection level by level
    std::size_t h = 1;
    while ((n / h) % 2 == 0)
        h *= 2;
    std::vector<double> w(n + 1, 0.0);
    for (std::size_t a = 0; a < n; a += h)
        w[a + h] = w[a] + std::sqrt(static_cast<double>(h)) * z();
    for (; h > 1; h /= 2)
        for (std::size_t a = 0; a < n; a += h)
            w[a + h / 2] = 0.5 * (w[a] + w[a + h]) + 0.5 * std::sqrt(static_cast<double>(h)) * z();
    for (std::size_t k = 0; k < n; ++k)
        out[k] = w[k + 1] - w[k];
}

namespace {

KernelPaths allocate(std::size_t n_paths, const StepCoefficients& c)
{
    if (n_paths < 1)
        throw std::invalid_argument("need at least one path");
    KernelPaths p;
    p.n_paths = n_paths;
    p.n_steps = c.drift.size();
    p.dt = c.dt;
    p.log_varrho.resize(n_paths * (p.n_steps + 1));
    return p;
}

} // namespace

KernelPaths simulate_kernel(const MarketSpec& market, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed)
{
    auto c = step_coefficients(market, n_steps);
    auto p = allocate(n_paths, c);
    const auto stride = static_cast<std::ptrdiff_t>(n_steps + 1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_paths); ++i)
        fill_path(c, seed, static_cast<std::size_t>(i), p.log_varrho.data() + i * stride);
    return p;
}

KernelPaths simulate_kernel_serial(const MarketSpec& market, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed)
{
    auto c = step_coefficients(market, n_steps);
    auto p = allocate(n_paths, c);
    for (std::size_t i = 0; i < n_paths; ++i)
        fill_path(c, seed, i, p.log_varrho.data() + i * (n_steps + 1));
    return p;
}

} // namespace rqopt
