#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace cdiso {

/// Thrown when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when an operation would exceed a configured work budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real number or +infinity.
///
/// The infinite value is a distinct state rather than a large double so that
/// infima and products treat it as absorbing.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit on purpose

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// Finite value; throws if the value is +infinity.
  double value() const {
    if (infinite_) throw DomainError("ExtendedReal::value on +infinity");
    return value_;
  }

  /// Value as a double, mapping the infinite state to IEEE +inf.
  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

std::string to_string(const ExtendedReal& x);

/// Curvature, dimension and diameter bounds (K, N, D).
struct ProfileParams {
  double K = 0.0;
  double N = 1.0;
  double D = std::numeric_limits<double>::infinity();

  /// Throws DomainError unless N >= 1 and D > 0.
  void validate() const;

  /// Diameter after the Bonnet-Myers cap pi*sqrt((N-1)/K) for K > 0, N > 1.
  double effective_diameter() const;
};

/// pi*sqrt((N-1)/K) for K > 0 and N > 1, +inf otherwise.
double bonnet_myers_diameter(double K, double N);

/// Distortion coefficient sigma_{K,N}^{(t)}(theta).
///
/// Branches, in this order:
///   * K*theta^2 == 0                -> t
///   * K*theta^2 >= N*pi^2           -> +infinity
///   * 0 < K*theta^2 < N*pi^2        -> sin(t*theta*sqrt(K/N)) / sin(theta*sqrt(K/N))
///   * K*theta^2 < 0, N == 0         -> t
///   * K*theta^2 < 0, N > 0          -> sinh(t*theta*sqrt(-K/N)) / sinh(theta*sqrt(-K/N))
/// The trigonometric ratios switch to a three-term Taylor series when the
/// argument theta*sqrt(|K|/N) is below 1e-6.
ExtendedReal sigma(double t, double theta, double K, double N);

/// tau_{K,N}^{(t)}(theta) = t^{1/N} * sigma_{K,N-1}^{(t)}(theta)^{(N-1)/N}; requires N >= 1.
ExtendedReal tau(double t, double theta, double K, double N);

/// Generalized sine: sin(sqrt(delta) t)/sqrt(delta), t, or sinh(sqrt(-delta) t)/sqrt(-delta).
double s_delta(double t, double delta);

/// Generalized cosine: cos(sqrt(delta) t), 1, or cosh(sqrt(-delta) t).
double c_delta(double t, double delta);

}  // namespace cdiso
