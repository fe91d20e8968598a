#include "rss/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace rss {

DistributionKind distribution_from_name(const std::string& name) {
  if (name == "normal") return DistributionKind::StandardNormal;
  if (name == "uniform") return DistributionKind::StandardUniform;
  if (name == "exp") return DistributionKind::StandardExponential;
  if (name == "beta52") return DistributionKind::Beta52;
  throw std::invalid_argument("unknown distribution '" + name +
                              "' (expected normal|uniform|exp|beta52)");
}

std::string distribution_name(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::StandardNormal: return "normal";
    case DistributionKind::StandardUniform: return "uniform";
    case DistributionKind::StandardExponential: return "exp";
    case DistributionKind::Beta52: return "beta52";
  }
  return "?";
}

// Wichura (1988), algorithm AS 241, PPND16.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -v : v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double beta52_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  return x2 * x2 * x * (6.0 - 5.0 * x);
}

namespace {

double beta52_quantile(double p) {
  // CDF is strictly increasing on [0,1]; Newton from the midpoint with a
  // bisection bracket keeps every iterate inside (lo, hi).
  double lo = 0.0, hi = 1.0, x = 0.7;
  for (int it = 0; it < 200; ++it) {
    const double f = beta52_cdf(x) - p;
    if (f > 0.0) hi = x; else lo = x;
    const double x4 = x * x * x * x;
    const double d = 30.0 * x4 * (1.0 - x);  // CDF derivative (beta density * B)
    double next = (d > 0.0) ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) < 1e-16 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace

double quantile(DistributionKind kind, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must be in (0,1)");
  switch (kind) {
    case DistributionKind::StandardNormal: return normal_quantile(p);
    case DistributionKind::StandardUniform: return p;
    case DistributionKind::StandardExponential: return -std::log1p(-p);
    case DistributionKind::Beta52: return beta52_quantile(p);
  }
  throw std::logic_error("quantile: unreachable");
}

}  // namespace rss
