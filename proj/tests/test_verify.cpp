#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cdiso/mms.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/numeric.hpp"
#include "cdiso/verify.hpp"

using namespace cdiso;
using std::numbers::pi;

TEST_CASE("compare on an interval with the sin density") {
  const auto X = gen_interval(make_named_density("sin_power", {{"K", 1}, {"N", 2}}), 401, 1, 2);
  const auto grid = linspace(0.1, 0.9, 9);
  CompareOptions o;
  o.centers = 16;
  o.random_potentials = 1;
  const auto r = compare_profile(X, 1, 2, grid, {}, o);
  const double delta = X.resolution();
  for (const auto& e : r.entries) CHECK(e.estimate >= e.model - 2 * delta);
  CHECK(r.violation_count() == 0);

  const auto ends = compare_profile(X, 1, 2, {0.0, 1.0}, {}, o);
  for (const auto& e : ends.entries) {
    CHECK(e.model == 0.0);
    CHECK(e.estimate == 0.0);
  }
}

// The single-eps quotient on the Fibonacci lattice jumps with each shell of
// points reached; some ball centers land 0.38 at eps = 0.1. Kept as a known
// failure so a better lattice or estimator shows up here.
TEST_CASE("compare on the sphere at half volume, single-eps quotient" * doctest::should_fail()) {
  const auto S = gen_sphere(2, 2000, 7);
  CompareOptions o;
  o.centers = 8;
  o.random_potentials = 0;
  const auto r = compare_profile(S, 1, 2, {0.5}, {0.1}, o);
  CHECK(r.entries[0].estimate >= 0.5 - 0.08);
}

TEST_CASE("compare on the sphere at half volume, two-sided fit") {
  const auto S = gen_sphere(2, 2000, 7);
  CompareOptions o;
  o.estimator = ContentEstimator::two_sided_fit;
  o.centers = 8;
  o.random_potentials = 0;
  const auto r = compare_profile(S, 1, 2, {0.5}, {}, o);
  CHECK(r.entries[0].estimate >= 0.5 - 0.08);
  CHECK(r.violation_count() == 0);
}

TEST_CASE("needle lower bound") {
  const auto X = gen_interval(make_named_density("uniform", {}), 201);
  Subset A(201, 0);
  for (std::size_t i = 0; i < 201; ++i) A[i] = X.labels()(i, 0) <= 0.3;
  const auto r = needle_lower_bound(X, A, 0, 1);
  CHECK(r.model_bound == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.measured == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.consistent);

  const auto all = needle_lower_bound(X, Subset(201, 1), 0, 1);
  CHECK(all.measured == 0.0);
  CHECK(all.needle_content == 0.0);
  CHECK(all.model_bound == 0.0);
}

TEST_CASE("rigidity of the polar cap") {
  const auto S = gen_suspension(gen_sphere(1, 64), 2, 64);
  const auto r = rigidity_cap_check(S, 0.5);
  CHECK(std::abs(r.cap_content - 0.5) <= 0.05);
  CHECK(r.cap_matches_model);
  bool band = false;
  for (const auto& c : r.competitors) {
    if (c.label.find("band") != std::string::npos) {
      band = true;
      CHECK(c.margin >= 0.1);
    }
    if (c.label.find("split") != std::string::npos) CHECK(c.margin > 0.0);
  }
  CHECK(band);
  const auto small = rigidity_cap_check(S, 0.01);
  CHECK(small.cap_content < 0.2);
}

TEST_CASE("diameter gap") {
  const auto g = diameter_gap(2, 0, pi - 0.5, 0.5);
  CHECK(g.positive);
  CHECK(g.eta > 0);
  double prev = g.eta;
  for (double D : linspace(pi - 0.5, pi - 0.01, 10)) {
    const double eta = diameter_gap(2, 0, D, 0.5).eta;
    CHECK(eta <= prev + 1e-9);
    prev = eta;
  }
  CHECK(prev < 1e-3);
  CHECK(diameter_gap(2, 0, 0.1, 0.5).eta > 1);
  CHECK_THROWS_AS(diameter_gap(2, 0, 4, 0.5), DomainError);
  CHECK_THROWS_AS(diameter_gap(2, 0.8, 2, 0.5), DomainError);
}

TEST_CASE("continuity in delta") {
  const auto grid = linspace(0, 0.5, 11);
  const auto c = profile_continuity_in_delta(2, 0.5, grid);
  CHECK(c.max_jump <= 0.1);
  for (double v : {0.0, 1.0})
    for (double x : profile_continuity_in_delta(2, v, grid).value) CHECK(x == 0.0);
}
