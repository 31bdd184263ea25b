#include "rqopt/claim.hpp"
#include "rqopt/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rqopt {

ClaimSpec ClaimSpec::atoms(std::vector<double> values, std::vector<double> probs)
{
    // validates and normalizes through the quantile constructor
    (void)atom_quantile(values, probs, 0.5);
    ClaimSpec c;
    c.kind_ = Kind::atoms;
    c.values_ = std::move(values);
    c.probs_ = std::move(probs);
    return c;
}

ClaimSpec ClaimSpec::constant(double v)
{
    if (!std::isfinite(v))
        throw std::invalid_argument("constant claim not finite");
    ClaimSpec c;
    c.kind_ = Kind::constant;
    c.p1_ = v;
    return c;
}

ClaimSpec ClaimSpec::uniform(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
        throw std::invalid_argument("uniform claim needs finite a < b");
    ClaimSpec c;
    c.kind_ = Kind::uniform;
    c.p1_ = a;
    c.p2_ = b;
    return c;
}

ClaimSpec ClaimSpec::shifted_lognormal(double mu, double sigma, double shift)
{
    if (!std::isfinite(mu) || !std::isfinite(shift) || !(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("lognormal claim needs finite mu, shift and sigma > 0");
    ClaimSpec c;
    c.kind_ = Kind::lognormal;
    c.p1_ = mu;
    c.p2_ = sigma;
    c.p3_ = shift;
    return c;
}

double ClaimSpec::ess_inf() const
{
    switch (kind_) {
    case Kind::atoms: {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (probs_[k] > 0.0)
                lo = std::min(lo, values_[k]);
        return lo;
    }
    case Kind::constant:
        return p1_;
    case Kind::uniform:
        return p1_;
    case Kind::lognormal:
        return p3_;
    }
    return 0.0;
}

double ClaimSpec::ess_sup() const
{
    switch (kind_) {
    case Kind::atoms: {
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (probs_[k] > 0.0)
                hi = std::max(hi, values_[k]);
        return hi;
    }
    case Kind::constant:
        return p1_;
    case Kind::uniform:
        return p2_;
    case Kind::lognormal:
        return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

double ClaimSpec::quantile_at(double t) const
{
    if (!(t > 0.0 && t < 1.0))
        throw std::domain_error("quantile evaluated outside (0,1)");
    switch (kind_) {
    case Kind::atoms:
        return atom_quantile(values_, probs_, t);
    case Kind::constant:
        return p1_;
    case Kind::uniform:
        return p1_ + (p2_ - p1_) * t;
    case Kind::lognormal:
        return p3_ + std::exp(p1_ + p2_ * normal_quantile(t));
    }
    return 0.0;
}

QuantileFunction ClaimSpec::quantile(const Grid& grid) const
{
    if (kind_ == Kind::atoms)
        return from_atoms(values_, probs_, grid);
    return QuantileFunction::sample(grid, [this](double t) { return quantile_at(t); }, ess_inf(), ess_sup());
}

bool ClaimSpec::degenerate() const
{
    return ess_inf() == ess_sup();
}

TailIntegral ClaimSpec::expectation(const std::function<double(double)>& g) const
{
    switch (kind_) {
    case Kind::atoms: {
        TailIntegral r;
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (probs_[k] > 0.0)
                r.value += probs_[k] * g(values_[k]);
        r.finite = std::isfinite(r.value);
        return r;
    }
    case Kind::constant: {
        TailIntegral r;
        r.value = g(p1_);
        r.finite = std::isfinite(r.value);
        return r;
    }
    case Kind::uniform:
        return unit_interval_integral([&](double t) { return g(p1_ + (p2_ - p1_) * t); });
    case Kind::lognormal:
        return gaussian_expectation([&](double z) { return g(p3_ + std::exp(p1_ + p2_ * z)); });
    }
    return {};
}

void ClaimSpec::check_compatible(const UtilityModel& u) const
{
    double low = std::min(0.0, ess_inf());
    double edge = u.domain_low();
    if (low < edge || (low == edge && !u.closed_domain()))
        throw std::invalid_argument("claim essential infimum violates the utility domain: " + describe() + " vs " +
                                    u.describe());
    auto eu = expectation([&](double v) { return u.value(v); });
    if (!eu.finite)
        throw std::invalid_argument("expected utility of the claim is not finite");
}

std::string ClaimSpec::describe() const
{
    std::ostringstream os;
    switch (kind_) {
    case Kind::atoms:
        os << "atoms(" << values_.size() << ")";
        break;
    case Kind::constant:
        os << "constant(" << p1_ << ")";
        break;
    case Kind::uniform:
        os << "uniform(" << p1_ << ", " << p2_ << ")";
        break;
    case Kind::lognormal:
        os << "lognormal(mu=" << p1_ << ", sigma=" << p2_ << ", shift=" << p3_ << ")";
        break;
    }
    return os.str();
}

} // namespace rqopt
