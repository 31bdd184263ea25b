#include "rqopt/normal.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>

namespace rqopt {

namespace {
const boost::math::normal_distribution<double> std_normal{};
}

double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z) * 0.3989422804014327;
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double normal_sf(double z)
{
    return 0.5 * std::erfc(z * M_SQRT1_2);
}

double normal_quantile(double p)
{
    if (p <= 0.0)
        return -std::numeric_limits<double>::infinity();
    if (p >= 1.0)
        return std::numeric_limits<double>::infinity();
    // 1 - p is exact for p >= 1/2, so this makes the quantile odd about 1/2
    if (p > 0.5)
        return -boost::math::quantile(std_normal, 1.0 - p);
    return boost::math::quantile(std_normal, p);
}

} // namespace rqopt
