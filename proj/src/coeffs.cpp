#include "cdiso/coeffs.hpp"

#include <numbers>
#include <sstream>

namespace cdiso {

namespace {

constexpr double kTaylorThreshold = 1e-6;

void check_t_theta(double t, double theta) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("distortion coefficient: t must lie in [0,1]");
  if (!(theta >= 0.0)) throw DomainError("distortion coefficient: theta must be nonnegative");
}

// sin(t x)/sin(x) and sinh(t x)/sinh(x) for small x:
//   t * [1 -+ (1 - t^2) x^2 / 6 + (1 - t^2)(7 - 3 t^2) x^4 / 360]
double ratio_taylor(double t, double x, bool hyperbolic) {
  const double x2 = x * x;
  const double a = (1.0 - t * t);
  const double second = a * x2 / 6.0;
  const double fourth = a * (7.0 - 3.0 * t * t) * x2 * x2 / 360.0;
  return t * (1.0 + (hyperbolic ? -second : second) + fourth);
}

}  // namespace

std::string to_string(const ExtendedReal& x) {
  if (x.is_infinite()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << x.value();
  return os.str();
}

void ProfileParams::validate() const {
  if (!(N >= 1.0) || std::isinf(N)) throw DomainError("ProfileParams: N must be a finite real >= 1");
  if (!(D > 0.0)) throw DomainError("ProfileParams: D must be positive");
  if (!std::isfinite(K)) throw DomainError("ProfileParams: K must be finite");
}

double bonnet_myers_diameter(double K, double N) {
  if (K > 0.0 && N > 1.0) return std::numbers::pi * std::sqrt((N - 1.0) / K);
  return std::numeric_limits<double>::infinity();
}

double ProfileParams::effective_diameter() const {
  return std::min(D, bonnet_myers_diameter(K, N));
}

ExtendedReal sigma(double t, double theta, double K, double N) {
  check_t_theta(t, theta);
  if (!(N >= 0.0)) throw DomainError("sigma: N must be nonnegative");
  if (!std::isfinite(K) || !std::isfinite(theta)) throw DomainError("sigma: non-finite argument");

  const double k_theta2 = K * theta * theta;
  if (k_theta2 == 0.0) return t;
  if (k_theta2 >= N * std::numbers::pi * std::numbers::pi) return ExtendedReal::infinity();
  if (k_theta2 > 0.0) {
    const double x = theta * std::sqrt(K / N);
    if (x < kTaylorThreshold) return ratio_taylor(t, x, false);
    return std::sin(t * x) / std::sin(x);
  }
  if (N == 0.0) return t;
  const double x = theta * std::sqrt(-K / N);
  if (x < kTaylorThreshold) return ratio_taylor(t, x, true);
  // sinh overflows past ~710; the ratio is then exp(-(1-t) x) to full precision.
  if (x > 700.0) return std::exp(-(1.0 - t) * x) * (1.0 - std::exp(-2.0 * t * x)) / (1.0 - std::exp(-2.0 * x));
  return std::sinh(t * x) / std::sinh(x);
}

ExtendedReal tau(double t, double theta, double K, double N) {
  if (!(N >= 1.0)) throw DomainError("tau: N must be >= 1");
  const ExtendedReal s = sigma(t, theta, K, N - 1.0);
  if (s.is_infinite()) return s;
  return std::pow(t, 1.0 / N) * std::pow(s.value(), (N - 1.0) / N);
}

double s_delta(double t, double delta) {
  if (delta > 0.0) {
    const double r = std::sqrt(delta);
    return std::sin(r * t) / r;
  }
  if (delta == 0.0) return t;
  const double r = std::sqrt(-delta);
  return std::sinh(r * t) / r;
}

double c_delta(double t, double delta) {
  if (delta > 0.0) return std::cos(std::sqrt(delta) * t);
  if (delta == 0.0) return 1.0;
  return std::cosh(std::sqrt(-delta) * t);
}

}  // namespace cdiso
