#pragma once

#include <string>

namespace rss {

// Reference distributions used to build quantile-grid populations.
enum class DistributionKind { StandardNormal, StandardUniform, StandardExponential, Beta52 };

DistributionKind distribution_from_name(const std::string& name);
std::string distribution_name(DistributionKind kind);

// Inverse standard normal CDF (Wichura's PPND16 rational approximations),
// accurate to full double precision on (0, 1).
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Quantile of the named distribution, defined on (0, 1).
// Beta(5,2) is inverted from its polynomial CDF x^5 (6 - 5x) by a
// Newton/bisection hybrid to ~1e-14.
double quantile(DistributionKind kind, double p);

// CDF of Beta(5,2) on [0, 1].
double beta52_cdf(double x);

}  // namespace rss
