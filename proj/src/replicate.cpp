#include "rqopt/portfolio.hpp"
#include "rqopt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rqopt {

namespace {

constexpr std::size_t n_monitors = 5; // t = 0, T/4, T/2, 3T/4, T

struct PathOutput {
    double start;
    double terminal;
    double target;
    double log_varrho_T;
    double deflated[n_monitors];
};

class Replicator {
public:
    Replicator(const MarketSpec& market, const TerminalMap& map, std::size_t n_steps, std::uint64_t seed)
        : market_(market), map_(map), coef_(step_coefficients(market, n_steps)), seed_(seed), n_steps_(n_steps),
          gh_(gauss_hermite(64))
    {
        if (n_steps < 16 || n_steps % 4 != 0)
            throw std::invalid_argument("replication needs at least 16 steps, a multiple of 4");
        // residual kernel law at each step start
        const double T = market.horizon();
        for (std::size_t k = 0; k < n_steps; ++k) {
            double t = T * static_cast<double>(k) / static_cast<double>(n_steps);
            double v = market.integrated_theta_sq(t, T);
            res_m_.push_back(-(market.integrated_rate(t, T) + 0.5 * v));
            res_s_.push_back(std::sqrt(v));
        }
    }

    std::size_t steps() const { return n_steps_; }
    double dt() const { return coef_.dt; }

    PathOutput run(std::size_t path, std::vector<double>& log_varrho, std::vector<double>* wealth_out) const
    {
        simulate(path, log_varrho);
        PathOutput o{};
        double x = map_.initial_wealth();
        o.start = x;
        const std::size_t stride = n_steps_ / (n_monitors - 1);
        for (std::size_t k = 0; k < n_steps_; ++k) {
            if (wealth_out)
                (*wealth_out)[k] = x;
            if (k % stride == 0)
                o.deflated[k / stride] = std::exp(log_varrho[k]) * x;
            double py = phi_y_fd(log_varrho[k], k);
            double driver = -(log_varrho[k + 1] - log_varrho[k] + coef_.drift[k]); // int theta^T dW
            x += x * coef_.rate[k] + (x - py) * (coef_.variance[k] + driver);
        }
        if (wealth_out)
            (*wealth_out)[n_steps_] = x;
        o.deflated[n_monitors - 1] = std::exp(log_varrho[n_steps_]) * x;
        o.terminal = x;
        o.log_varrho_T = log_varrho[n_steps_];
        o.target = map_.at_log(o.log_varrho_T);
        return o;
    }

private:
    // same draws as simulate_kernel for this (seed, path)
    void simulate(std::size_t path, std::vector<double>& out) const
    {
        std::vector<double> z(n_steps_);
        path_normals(seed_, path, z);
        out = kernel_path_from_normals(coef_, z);
    }

    double conditional(double log_y, std::size_t k) const
    {
        return map_.conditional(log_y, res_m_[k], res_s_[k], gh_);
    }

    double phi_y_fd(double log_y, std::size_t k) const
    {
        constexpr double h = 1e-5;
        double fu = (1.0 + h) * conditional(log_y + std::log1p(h), k);
        double fd = (1.0 - h) * conditional(log_y + std::log1p(-h), k);
        return (fu - fd) / (2.0 * h);
    }

    const MarketSpec& market_;
    const TerminalMap& map_;
    StepCoefficients coef_;
    std::uint64_t seed_;
    std::size_t n_steps_;
    const GaussHermite& gh_;
    std::vector<double> res_m_, res_s_;
};

ReplicationReport summarize(const Replicator& rep, const MarketSpec& market, const TerminalMap& map,
                            const std::vector<PathOutput>& out)
{
    ReplicationReport r;
    const std::size_t n = out.size();
    r.n_paths = n;
    r.n_steps = rep.steps();
    double se2 = 0.0, mean_t = 0.0;
    for (const auto& o : out) {
        double e = o.terminal - o.target;
        se2 += e * e;
        r.pathwise_max_err = std::max(r.pathwise_max_err, std::abs(e));
        mean_t += o.target;
    }
    r.terminal_rmse = std::sqrt(se2 / static_cast<double>(n));
    r.mean_target = mean_t / static_cast<double>(n);
    for (const auto& o : out)
        r.budget_gap = std::max(r.budget_gap, std::abs(o.start - map.initial_wealth()));
    r.model_budget_gap = std::abs(wealth(0.0, 1.0, map, market) - map.initial_wealth());

    for (std::size_t j = 0; j < n_monitors; ++j) {
        r.monitor_times.push_back(market.horizon() * static_cast<double>(j) / static_cast<double>(n_monitors - 1));
        double m = 0.0, m2 = 0.0;
        for (const auto& o : out) {
            m += o.deflated[j];
            m2 += o.deflated[j] * o.deflated[j];
        }
        m /= static_cast<double>(n);
        double var = std::max(0.0, m2 / static_cast<double>(n) - m * m) * static_cast<double>(n) / std::max<double>(1.0, static_cast<double>(n) - 1.0);
        r.deflated_mean.push_back(m);
        r.deflated_se.push_back(std::sqrt(var / static_cast<double>(n)));
    }

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return out[a].log_varrho_T < out[b].log_varrho_T; });
    for (std::size_t i = 1; i < n; ++i)
        if (out[idx[i]].target > out[idx[i - 1]].target)
            r.anti_monotone = false;
    return r;
}

template <bool Parallel>
ReplicationReport replicate(const MarketSpec& market, const TerminalMap& map, std::size_t n_paths, std::size_t n_steps,
                            std::uint64_t seed, std::size_t record_paths)
{
    if (n_paths < 1)
        throw std::invalid_argument("need at least one path");
    Replicator rep(market, map, n_steps, seed);
    record_paths = std::min(record_paths, n_paths);
    std::vector<PathOutput> out(n_paths);
    std::vector<double> rec_log(record_paths * (n_steps + 1)), rec_x(record_paths * (n_steps + 1));

    auto body = [&](std::size_t p, std::vector<double>& lv, std::vector<double>& wx) {
        bool keep = p < record_paths;
        out[p] = rep.run(p, lv, keep ? &wx : nullptr);
        if (keep) {
            std::copy(lv.begin(), lv.end(), rec_log.begin() + static_cast<std::ptrdiff_t>(p * (n_steps + 1)));
            std::copy(wx.begin(), wx.end(), rec_x.begin() + static_cast<std::ptrdiff_t>(p * (n_steps + 1)));
        }
    };

    if constexpr (Parallel) {
#pragma omp parallel
        {
            std::vector<double> lv(n_steps + 1), wx(n_steps + 1);
#pragma omp for schedule(dynamic, 16)
            for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_paths); ++p)
                body(static_cast<std::size_t>(p), lv, wx);
        }
    } else {
        std::vector<double> lv(n_steps + 1), wx(n_steps + 1);
        for (std::size_t p = 0; p < n_paths; ++p)
            body(p, lv, wx);
    }

    auto r = summarize(rep, market, map, out);
    for (std::size_t p = 0; p < record_paths; ++p)
        for (std::size_t k = 0; k <= n_steps; ++k)
            r.records.push_back({p, rep.dt() * static_cast<double>(k), std::exp(rec_log[p * (n_steps + 1) + k]),
                                 rec_x[p * (n_steps + 1) + k]});
    return r;
}

} // namespace

ReplicationReport replicate_and_verify(const MarketSpec& market, const TerminalMap& map, std::size_t n_paths,
                                       std::size_t n_steps, std::uint64_t seed, std::size_t record_paths)
{
    return replicate<true>(market, map, n_paths, n_steps, seed, record_paths);
}

ReplicationReport replicate_and_verify_serial(const MarketSpec& market, const TerminalMap& map, std::size_t n_paths,
                                              std::size_t n_steps, std::uint64_t seed, std::size_t record_paths)
{
    return replicate<false>(market, map, n_paths, n_steps, seed, record_paths);
}

} // namespace rqopt
