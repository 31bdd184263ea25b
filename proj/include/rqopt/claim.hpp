#pragma once

#include "rqopt/integrate.hpp"
#include "rqopt/quantile.hpp"
#include "rqopt/utility.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rqopt {

// Law of the intractable claim. The essential infimum is always finite.
class ClaimSpec {
public:
    enum class Kind { atoms, constant, uniform, lognormal };

    static ClaimSpec atoms(std::vector<double> values, std::vector<double> probs);
    static ClaimSpec constant(double c);
    static ClaimSpec uniform(double a, double b);
    // shift + exp(mu + sigma Z)
    static ClaimSpec shifted_lognormal(double mu, double sigma, double shift);

    Kind kind() const { return kind_; }
    double ess_inf() const;
    double ess_sup() const;
    double quantile_at(double t) const;
    QuantileFunction quantile(const Grid& grid) const;
    bool degenerate() const;

    // E[g(claim)]; exact for atoms, windowed quadrature otherwise
    TailIntegral expectation(const std::function<double(double)>& g) const;

    // Throws unless u is defined on [min(0, ess_inf), inf) and E[u(claim)] is finite.
    void check_compatible(const UtilityModel& u) const;

    std::string describe() const;

private:
    ClaimSpec() = default;

    Kind kind_ = Kind::constant;
    std::vector<double> values_;
    std::vector<double> probs_;
    double p1_ = 0.0, p2_ = 0.0, p3_ = 0.0;
};

} // namespace rqopt
