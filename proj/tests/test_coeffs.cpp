#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cdiso/coeffs.hpp"

using namespace cdiso;
using std::numbers::pi;

TEST_CASE("sigma branches") {
  CHECK(sigma(0.7, 1.3, 0, 5).value() == 0.7);
  CHECK(sigma(0.5, 4.0, 3, 2).is_infinite());
  CHECK(sigma(0.5, pi / 2, 1, 1).value() == doctest::Approx(std::sin(pi / 4)).epsilon(1e-12));
  // K < 0 with N == 0 falls back to t.
  CHECK(sigma(0.3, 2.0, -1, 0).value() == 0.3);
  CHECK(sigma(0.5, 1.0, -2, 2).value() == doctest::Approx(std::sinh(0.5) / std::sinh(1.0)).epsilon(1e-12));
}

TEST_CASE("sigma is exactly t at zero curvature") {
  for (double t : {0.0, 0.1, 0.37, 0.5, 1.0})
    for (double theta : {0.0, 0.5, 3.0, 100.0})
      for (double N : {0.0, 1.0, 2.5, 10.0}) CHECK(sigma(t, theta, 0.0, N).value() == t);
}

TEST_CASE("sigma endpoints and monotonicity in t") {
  for (double K : {-3.0, -0.5, 0.5, 2.0})
    for (double theta : {0.1, 1.0, 2.0}) {
      const double N = 3.0;
      if (sigma(0.5, theta, K, N).is_infinite()) continue;
      CHECK(std::abs(sigma(0.0, theta, K, N).value()) <= 1e-12);
      CHECK(std::abs(sigma(1.0, theta, K, N).value() - 1.0) <= 1e-12);
      // Past a quarter period the sine ratio peaks before t = 1.
      if (K > 0 && theta * std::sqrt(K / N) > pi / 2) continue;
      double prev = -1.0;
      for (int i = 0; i <= 50; ++i) {
        const double s = sigma(i / 50.0, theta, K, N).value();
        CHECK(s >= prev);
        prev = s;
      }
    }
}

TEST_CASE("sigma is continuous across the small-argument switch") {
  // theta * sqrt(K/N) crosses 1e-6 near theta = 1e-6 for K = N.
  for (double K : {-1.0, 1.0})
    for (double theta : {1e-6, 2e-6, 1e-3}) {
      const double a = sigma(0.3, theta - 1e-8, K, 1.0).value();
      const double b = sigma(0.3, theta + 1e-8, K, 1.0).value();
      CHECK(std::abs(a - b) <= 1e-6);
      CHECK(std::abs(a - 0.3) <= 1e-6);
    }
  // Kθ² → 0 through small K.
  for (double K : {1e-14, 1e-10, -1e-10}) CHECK(std::abs(sigma(0.4, 1.0, K, 2).value() - 0.4) <= 1e-6);
}

TEST_CASE("tau") {
  for (double t : {0.0, 0.2, 0.9}) CHECK(tau(t, 1.7, 0, 3).value() == doctest::Approx(t).epsilon(1e-15));
  CHECK(tau(0.5, pi / 2, 1, 2).value() == doctest::Approx(0.5946035575).epsilon(1e-9));
  CHECK(tau(1.0, 1.2, 1, 3).value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(tau(0.5, 1.0, 1, 0.5), DomainError);
}

TEST_CASE("generalized sine and cosine") {
  CHECK(s_delta(0.8, 0) == 0.8);
  CHECK(c_delta(0.8, 0) == 1.0);
  CHECK(s_delta(pi / 2, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c_delta(1, -1) == doctest::Approx(1.5430806348).epsilon(1e-10));
}

TEST_CASE("profile params") {
  CHECK_THROWS_AS((ProfileParams{0, 0.5, 1}.validate()), DomainError);
  CHECK_THROWS_AS((ProfileParams{0, 2, 0}.validate()), DomainError);
  CHECK(ProfileParams{1, 2, 10}.effective_diameter() == doctest::Approx(pi));
  CHECK(std::isinf(bonnet_myers_diameter(0, 2)));
  CHECK(to_string(ExtendedReal::infinity()) == "inf");
}
