#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cdiso/density1d.hpp"
#include "cdiso/model_profiles.hpp"

using namespace cdiso;
using std::numbers::pi;

namespace {

Density1D uniform01() { return Density1D::from_function("flat", [](double) { return 1.0; }, 0, 1); }
Density1D sin_density() { return Density1D::from_function("sin", [](double t) { return std::sin(t); }, 0, pi); }

}  // namespace

TEST_CASE("interval sets merge and sort") {
  IntervalSet s({{0.5, 0.7}, {0.1, 0.2}, {0.2, 0.3}, {0.9, 0.8}});
  REQUIRE(s.size() == 2);
  CHECK(s.components()[0].lo == 0.1);
  CHECK(s.components()[0].hi == 0.3);
  CHECK(s.components()[1].lo == 0.5);
}

TEST_CASE("measure") {
  CHECK(measure(uniform01(), IntervalSet::single(0, 0.25)) == doctest::Approx(0.25).epsilon(1e-12));
  const auto sin2 = Density1D::from_function("sin2", [](double t) { return std::sin(t) * std::sin(t); }, 0, pi);
  CHECK(measure(sin2, IntervalSet::single(0, pi / 2)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(measure(sin_density(), IntervalSet()) == 0.0);
  // Normalization constant of sin on [0, π] is 1/2.
  CHECK(sin_density()(pi / 2) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("minkowski content of interval unions") {
  CHECK(minkowski_content(uniform01(), IntervalSet::single(0, 0.4)) == doctest::Approx(1.0));
  CHECK(minkowski_content(sin_density(), IntervalSet::single(0, pi / 2)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(minkowski_content(sin_density(), IntervalSet::single(0, pi)) == 0.0);
  CHECK(minkowski_content(uniform01(), IntervalSet({{0.1, 0.2}, {0.5, 0.6}})) == doctest::Approx(4.0));
}

TEST_CASE("cdf and quantiles invert each other") {
  const auto d = sin_density();
  for (double m : {0.01, 0.25, 0.5, 0.9}) CHECK(d.cdf(d.quantile(m)) == doctest::Approx(m).epsilon(1e-9));
  CHECK(d.cdf(pi / 2) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("check_cd verdicts") {
  const auto sin2 = Density1D::from_function("sin2", [](double t) { return std::pow(std::sin(t), 2); }, 0, pi, 512);
  CHECK(check_cd(sin2, 2, 3).pass);
  CHECK(check_cd(uniform01(), 0, 2).pass);
  CHECK(check_cd(uniform01(), 0, 7).pass);
  const auto sq = Density1D::from_function("t2", [](double t) { return t * t; }, 0.1, 1, 256);
  const CdCheck bad = check_cd(sq, 0, 2);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.worst);
  CHECK(bad.worst->violation > bad.tolerance);
}

TEST_CASE("check_cd is invariant under translation of the support") {
  auto f = [](double s) { return [s](double t) { return std::sin(t - s); }; };
  for (double K : {1.0, 1.2}) {
    const bool a = check_cd(Density1D::from_function("a", f(0), 0, pi, 512), K, 2).pass;
    const bool b = check_cd(Density1D::from_function("b", f(5), 5, 5 + pi, 512), K, 2).pass;
    CHECK(a == b);
  }
}

TEST_CASE("CD densities with K > 0 respect the Bonnet-Myers length") {
  // sin on a window longer than π is not a density; a CD(1,2) density must fit in [0, π].
  const auto ok = Density1D::from_function("sin", [](double t) { return std::sin(t); }, 0, pi, 512);
  CHECK(check_cd(ok, 1, 2).pass);
  CHECK(ok.length() <= pi + 1e-9);
  const auto flat = Density1D::from_function("flat", [](double) { return 1.0; }, 0, 4, 512);
  CHECK_FALSE(check_cd(flat, 1, 2).pass);
}

TEST_CASE("mollification") {
  const auto d = sin_density();
  MollifyOptions o;
  o.K = 1;
  double prev = 1e300;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto m = mollify(d, eps, 2, o);
    CHECK(check_cd(m.density, 1, 2, 1e-4).pass);
    const double gap = sup_distance(m.density, d);
    CHECK(gap < prev);
    prev = gap;
  }
  const auto flat = mollify(uniform01(), 0.05, 2, {0.0, MollifyExtension::zero, 256});
  CHECK(flat.density(0.5) == doctest::Approx(flat.density(0.4)).epsilon(1e-9));
  CHECK(standard_mollifier(0.0) == 0.0);
  CHECK(standard_mollifier(0.5) > 0.0);
}

TEST_CASE("mollification preserves pointwise order") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> lo(65), hi(65);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = u(rng);
      hi[i] = lo[i] + u(rng);
    }
    // Order is compared on the unnormalized scale, so undo the normalizations.
    const auto a = Density1D::from_samples(0, 1, lo), b = Density1D::from_samples(0, 1, hi);
    MollifyOptions o;
    o.extension = MollifyExtension::zero;
    const auto ma = mollify(a, 0.05, 2, o), mb = mollify(b, 0.05, 2, o);
    const double sa = a.raw_mass() / ma.scale, sb = b.raw_mass() / mb.scale;
    for (double t = -0.04; t <= 1.04; t += 0.01) CHECK(ma.density(t) * sa <= mb.density(t) * sb + 1e-12);
  }
}

TEST_CASE("density csv round trip") {
  const auto d = Density1D::from_samples(0, 2, {0.0, 1.0, 2.0, 1.0, 0.0});
  std::stringstream s;
  write_density_csv(s, d);
  const auto back = read_density_csv(s);
  CHECK(back.lower() == 0.0);
  CHECK(back.upper() == 2.0);
  CHECK(back(1.0) == doctest::Approx(d(1.0)));
  std::stringstream bad("t,h\n0,1\n1,1\n3,1\n");
  CHECK_THROWS_AS(read_density_csv(bad), DomainError);
}
