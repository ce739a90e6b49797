#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cdiso/iso1d.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/numeric.hpp"

using namespace cdiso;
using std::numbers::pi;

namespace {

Density1D uniform01() { return Density1D::from_function("flat", [](double) { return 1.0; }, 0, 1); }
Density1D sin_density() { return Density1D::from_function("sin", [](double t) { return std::sin(t); }, 0, pi); }

}  // namespace

TEST_CASE("structured profile examples") {
  const IsoResult u = profile_structured(uniform01(), 0.3);
  CHECK(u.value == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(u.minimizer.size() == 1);
  CHECK(measure(uniform01(), u.minimizer) == doctest::Approx(0.3).epsilon(1e-6));

  const IsoResult s = profile_structured(sin_density(), 0.5);
  CHECK(s.value == doctest::Approx(0.5).epsilon(1e-9));
  REQUIRE(s.minimizer.size() == 1);
  const auto& c = s.minimizer.components()[0];
  const bool left = std::abs(c.lo) < 1e-9 && std::abs(c.hi - pi / 2) < 1e-6;
  const bool right = std::abs(c.lo - pi / 2) < 1e-6 && std::abs(c.hi - pi) < 1e-9;
  CHECK((left || right));

  for (double v : {0.0, 1.0}) CHECK(profile_structured(sin_density(), v).value == 0.0);
}

TEST_CASE("minimizer invariants") {
  const auto d = make_named_density("sin_power", {{"K", 2}, {"N", 3}});
  for (double v : linspace(0.05, 0.95, 7)) {
    const IsoResult r = profile_structured(d, v);
    CHECK(measure(d, r.minimizer) == doctest::Approx(v).epsilon(1e-6));
    CHECK(std::abs(minkowski_content(d, r.minimizer) - r.value) <= 1e-9);
  }
}

TEST_CASE("brute force oracle") {
  const auto u = profile_bruteforce(uniform01(), 0.3);
  CHECK(u.best.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(profile_bruteforce(sin_density(), 0.0).best.value == 0.0);
  const auto s = profile_bruteforce(sin_density(), 0.5);
  CHECK(std::abs(s.best.value - profile_structured(sin_density(), 0.5).value) <= s.tolerance);
  BruteForceOptions tiny;
  tiny.budget = 10;
  CHECK_THROWS_AS(profile_bruteforce(sin_density(), 0.4, tiny), ResourceError);
}

TEST_CASE("oracle dominance and symmetry on the named densities") {
  const auto d = make_named_density("cosh_power", {{"K", -1}, {"N", 3}, {"xi", -0.5}, {"D", 1.0}});
  REQUIRE(check_cd(d, -1, 3).pass);
  BruteForceOptions o;
  o.grid_nodes = 41;
  for (double v : linspace(0.0, 1.0, 11)) {
    const auto s = profile_structured(d, v);
    const auto b = profile_bruteforce(d, v, o);
    CHECK(s.value <= b.best.value + b.tolerance);
    CHECK(std::abs(s.value - profile_structured(d, 1.0 - v).value) <= 1e-6);
  }
}

TEST_CASE("profile vanishes at small volume when the density vanishes at an end") {
  const auto d = sin_density();
  double prev = 1.0;
  for (double v : {1e-2, 1e-3, 1e-4}) {
    const double x = profile_structured(d, v).value;
    CHECK(x < prev);
    prev = x;
  }
  CHECK(prev < 0.03);
}
