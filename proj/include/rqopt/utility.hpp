#pragma once

#include <string>

namespace rqopt {

// Exponential -exp(-alpha x), power (x+b)^gamma/gamma, log ln(x+b).
class UtilityModel {
public:
    enum class Kind { exponential, power, log };

    static UtilityModel exponential(double alpha);
    static UtilityModel power(double gamma, double shift);
    static UtilityModel log(double shift);

    Kind kind() const { return kind_; }
    double alpha() const { return a_; }
    double gamma() const { return a_; }
    double shift() const { return b_; }

    // -inf for exponential utility
    double domain_low() const;
    // whether u(domain_low) is finite (power utility)
    bool closed_domain() const { return kind_ == Kind::power; }

    double value(double x) const;
    double marginal(double x) const;
    double curvature(double x) const;
    double inverse_marginal(double y) const;

    std::string describe() const;

private:
    UtilityModel(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}
    void check_domain(double x) const;

    Kind kind_;
    double a_;
    double b_;
};

} // namespace rqopt
