#include "rqopt/utility.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rqopt {

UtilityModel UtilityModel::exponential(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("exponential utility needs alpha > 0");
    return {Kind::exponential, alpha, 0.0};
}

UtilityModel UtilityModel::power(double gamma, double shift)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("power utility needs gamma in (0,1)");
    if (!std::isfinite(shift))
        throw std::invalid_argument("utility shift not finite");
    return {Kind::power, gamma, shift};
}

UtilityModel UtilityModel::log(double shift)
{
    if (!std::isfinite(shift))
        throw std::invalid_argument("utility shift not finite");
    return {Kind::log, 0.0, shift};
}

double UtilityModel::domain_low() const
{
    if (kind_ == Kind::exponential)
        return -std::numeric_limits<double>::infinity();
    return -b_;
}

void UtilityModel::check_domain(double x) const
{
    if (kind_ == Kind::exponential)
        return;
    double z = x + b_;
    if (z < 0.0 || (z == 0.0 && kind_ == Kind::log) || std::isnan(x))
        throw std::domain_error("utility argument below its domain");
}

double UtilityModel::value(double x) const
{
    check_domain(x);
    switch (kind_) {
    case Kind::exponential:
        return -std::exp(-a_ * x);
    case Kind::power:
        return std::pow(x + b_, a_) / a_;
    case Kind::log:
        return std::log(x + b_);
    }
    return 0.0;
}

double UtilityModel::marginal(double x) const
{
    check_domain(x);
    switch (kind_) {
    case Kind::exponential:
        return a_ * std::exp(-a_ * x);
    case Kind::power:
        return std::pow(x + b_, a_ - 1.0);
    case Kind::log:
        return 1.0 / (x + b_);
    }
    return 0.0;
}

double UtilityModel::curvature(double x) const
{
    check_domain(x);
    switch (kind_) {
    case Kind::exponential:
        return -a_ * a_ * std::exp(-a_ * x);
    case Kind::power:
        return (a_ - 1.0) * std::pow(x + b_, a_ - 2.0);
    case Kind::log:
        return -1.0 / ((x + b_) * (x + b_));
    }
    return 0.0;
}

double UtilityModel::inverse_marginal(double y) const
{
    if (!(y > 0.0))
        throw std::domain_error("inverse marginal utility needs a positive argument");
    switch (kind_) {
    case Kind::exponential:
        return (std::log(a_) - std::log(y)) / a_;
    case Kind::power:
        return std::pow(y, 1.0 / (a_ - 1.0)) - b_;
    case Kind::log:
        return 1.0 / y - b_;
    }
    return 0.0;
}

std::string UtilityModel::describe() const
{
    std::ostringstream os;
    switch (kind_) {
    case Kind::exponential:
        os << "exponential(alpha=" << a_ << ")";
        break;
    case Kind::power:
        os << "power(gamma=" << a_ << ", shift=" << b_ << ")";
        break;
    case Kind::log:
        os << "log(shift=" << b_ << ")";
        break;
    }
    return os.str();
}

} // namespace rqopt
