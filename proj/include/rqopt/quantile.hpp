#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rqopt {

// Midpoint grid t_i = (i + 1/2)/n, i = 0..n-1, on (0,1).
class Grid {
public:
    explicit Grid(std::size_t n);

    std::size_t size() const { return n_; }
    double node(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(n_); }
    double edge(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(n_); }
    double weight() const { return 1.0 / static_cast<double>(n_); }
    // index of the node 1 - t_i
    std::size_t mirror(std::size_t i) const { return n_ - 1 - i; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t n_;
};

// Right-continuous increasing function on (0,1), sampled at grid nodes.
class QuantileFunction {
public:
    QuantileFunction(Grid grid, std::vector<double> values, double value_at_0, double left_limit_at_1);

    static QuantileFunction constant(Grid grid, double c);
    // Samples q at the nodes; the endpoint limits are passed explicitly.
    static QuantileFunction sample(Grid grid, const std::function<double(double)>& q,
                                   double value_at_0, double left_limit_at_1);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    double value_at_0() const { return at0_; }
    double left_limit_at_1() const { return at1_; }

    // Step lookup: the value of the cell containing t.
    double at(double t) const;
    bool nonnegative() const;

private:
    Grid grid_;
    std::vector<double> values_;
    double at0_;
    double at1_;
};

// Right-continuous inverse of a discrete CDF, evaluated at t in (0,1).
double atom_quantile(std::span<const double> values, std::span<const double> probs, double t);

QuantileFunction from_atoms(std::span<const double> values, std::span<const double> probs, const Grid& grid);

// (1/n) sum_i a(t_i) b(1 - t_i)
double pair_reversed(const QuantileFunction& a, const QuantileFunction& b);

} // namespace rqopt
