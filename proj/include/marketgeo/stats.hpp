#pragma once

namespace marketgeo {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF. Accurate to well below 1e-9 across (0, 1);
// throws ConfigError outside that open interval.
double normal_quantile(double p);

} // namespace marketgeo
