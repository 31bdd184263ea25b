#pragma once

namespace rqopt {

double normal_pdf(double z);
double normal_cdf(double z);
// upper tail 1 - Phi(z) without cancellation
double normal_sf(double z);
double normal_quantile(double p);

} // namespace rqopt
