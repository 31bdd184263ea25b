#include "rqopt/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rqopt {

Grid::Grid(std::size_t n) : n_(n)
{
    if (n < 2)
        throw std::invalid_argument("grid needs at least 2 cells");
}

QuantileFunction::QuantileFunction(Grid grid, std::vector<double> values, double value_at_0, double left_limit_at_1)
    : grid_(grid), values_(std::move(values)), at0_(value_at_0), at1_(left_limit_at_1)
{
    if (values_.size() != grid_.size())
        throw std::invalid_argument("quantile values do not match the grid");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("quantile value not finite at node " + std::to_string(i));
        if (i > 0 && values_[i] < values_[i - 1])
            throw std::invalid_argument("quantile decreases at node " + std::to_string(i));
    }
    if (std::isnan(at0_) || std::isnan(at1_) || at0_ > values_.front() || at1_ < values_.back())
        throw std::invalid_argument("quantile endpoint limits inconsistent with node values");
}

QuantileFunction QuantileFunction::constant(Grid grid, double c)
{
    return QuantileFunction(grid, std::vector<double>(grid.size(), c), c, c);
}

QuantileFunction QuantileFunction::sample(Grid grid, const std::function<double(double)>& q,
                                          double value_at_0, double left_limit_at_1)
{
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = q(grid.node(i));
    return QuantileFunction(grid, std::move(v), value_at_0, left_limit_at_1);
}

double QuantileFunction::at(double t) const
{
    if (!(t > 0.0 && t < 1.0))
        throw std::domain_error("quantile evaluated outside (0,1)");
    auto i = static_cast<std::size_t>(t * static_cast<double>(grid_.size()));
    return values_[std::min(i, values_.size() - 1)];
}

bool QuantileFunction::nonnegative() const
{
    return values_.front() >= 0.0;
}

namespace {

struct Atoms {
    std::vector<double> value;
    std::vector<double> cum;
};

Atoms sorted_atoms(std::span<const double> values, std::span<const double> probs)
{
    if (values.empty())
        throw std::invalid_argument("empty atom list");
    if (values.size() != probs.size())
        throw std::invalid_argument("atom values and probabilities differ in length");
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(probs[k] >= 0.0))
            throw std::invalid_argument("negative atom probability");
        if (!std::isfinite(values[k]))
            throw std::invalid_argument("atom value not finite");
        total += probs[k];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("atom probabilities do not sum to 1");

    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });

    Atoms out;
    double acc = 0.0;
    for (auto k : idx) {
        if (probs[k] == 0.0)
            continue;
        if (!out.value.empty() && out.value.back() == values[k]) {
            acc += probs[k];
            out.cum.back() = acc;
            continue;
        }
        acc += probs[k];
        out.value.push_back(values[k]);
        out.cum.push_back(acc);
    }
    return out;
}

double lookup(const Atoms& a, double t)
{
    // first atom whose cumulative mass exceeds t
    auto it = std::upper_bound(a.cum.begin(), a.cum.end(), t);
    if (it == a.cum.end())
        return a.value.back();
    return a.value[static_cast<std::size_t>(it - a.cum.begin())];
}

} // namespace

double atom_quantile(std::span<const double> values, std::span<const double> probs, double t)
{
    if (!(t > 0.0 && t < 1.0))
        throw std::domain_error("quantile evaluated outside (0,1)");
    return lookup(sorted_atoms(values, probs), t);
}

QuantileFunction from_atoms(std::span<const double> values, std::span<const double> probs, const Grid& grid)
{
    Atoms a = sorted_atoms(values, probs);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = lookup(a, grid.node(i));
    return QuantileFunction(grid, std::move(v), a.value.front(), a.value.back());
}

double pair_reversed(const QuantileFunction& a, const QuantileFunction& b)
{
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("pairing of quantiles on different grids");
    const std::size_t n = a.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[n - 1 - i];
    return s / static_cast<double>(n);
}

} // namespace rqopt
