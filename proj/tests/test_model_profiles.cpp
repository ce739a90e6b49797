#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cdiso/iso1d.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/numeric.hpp"

using namespace cdiso;
using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

// The printed closed form evaluated on a geometric xi grid with golden refinement.
double case3_oracle(double N, double D, double v) {
  const double lo = std::min(v, 1 - v), hi = std::max(v, 1 - v);
  auto g = [&](double xi) {
    const double a = std::pow(xi + 1, N), b = std::pow(xi, N);
    return N / D * std::pow(lo * a + hi * b, (N - 1) / N) / (a - b);
  };
  double best = 1.0 / D, arg = -1;
  for (double xi = 0.0; xi < 1e7; xi = xi < 1e-3 ? xi + 1e-4 : xi * 1.01) {
    if (g(xi) < best) best = g(xi), arg = xi;
  }
  if (arg >= 0) best = std::min(best, golden_section(g, std::max(0.0, arg / 1.02 - 1e-4), arg * 1.02 + 1e-4, 200).value);
  return best;
}

}  // namespace

TEST_CASE("jacobian density") {
  const ModelDensitySpec cosine{0, 1, 2, 0, kInf};
  for (double t : {-1.5, -0.3, 0.0, 1.0, 1.5}) CHECK(jacobian_density(cosine, t) == doctest::Approx(std::cos(t)));
  CHECK(jacobian_density(cosine, 1.6) == 0.0);
  CHECK(jacobian_density(cosine, -2.0) == 0.0);
  const ModelDensitySpec ind{1, -1, 1, 0, kInf};
  CHECK(jacobian_density(ind, 0.5) == 1.0);
  CHECK(jacobian_density(ind, -0.5) == 0.0);
  const ModelDensitySpec steep{1e3, 2, 3, 0, kInf};
  CHECK(std::isfinite(jacobian_density(steep, 0.5)));
  CHECK_THROWS_AS(jacobian_density(ModelDensitySpec{0, 0, 0.5, 0, kInf}, 0.1), DomainError);
}

TEST_CASE("model profile examples") {
  CHECK(model_profile_value(-1, 3, kInf, 0.4) == 0.0);
  CHECK(model_profile_value(0, 2, kInf, 0.4) == 0.0);
  CHECK(std::abs(model_profile_value(1, 2, pi, 0.5) - 0.5) <= 1e-6);
  CHECK(std::abs(model_profile_value(2, 3, pi, 0.5) - 2 / pi) <= 1e-6);
  CHECK(std::abs(model_profile_value(0, 2, 1, 0.5) - case3_oracle(2, 1, 0.5)) <= 1e-6);
  CHECK_THROWS_AS(model_profile_value(0, 0.5, 1, 0.5), DomainError);
}

TEST_CASE("case 3 closed form matches the xi oracle") {
  for (double N : {1.5, 2.0, 3.0})
    for (double v : {0.1, 0.5, 0.9}) {
      CHECK(std::abs(case3_closed_form(N, 1, v) - case3_oracle(N, 1, v)) <= 1e-6);
      CHECK(std::abs(model_profile_value(0, N, 1, v) - case3_oracle(N, 1, v)) <= 1e-6);
    }
}

TEST_CASE("profile curve endpoints, symmetry and agreement with iso1d") {
  const auto grid = linspace(0, 1, 11);
  const auto curve = profile_curve({1, 2, pi}, grid);
  CHECK(curve.front().value == 0.0);
  CHECK(curve.back().value == 0.0);
  const auto sin = Density1D::from_function("sin", [](double t) { return std::sin(t); }, 0, pi);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(curve[i].value - curve[grid.size() - 1 - i].value) <= 1e-6);
    CHECK(std::abs(curve[i].value - profile_structured(sin, grid[i]).value) <= 1e-6);
  }
}

TEST_CASE("model profile is nonincreasing in D") {
  for (double K : {-1.0, 0.0, 1.0}) {
    double prev = kInf;
    for (double D : {0.5, 1.0, 2.0, 3.0}) {
      const double x = model_profile_value(K, 2, D, 0.3);
      CHECK(x <= prev + 1e-9);
      prev = x;
    }
  }
}

TEST_CASE("grid-sampled CD densities sit above the model profile") {
  // sin sampled coarsely; exact profile of the sample versus I_{1,2,π}.
  std::vector<double> h;
  for (double t : linspace(0, pi, 65)) h.push_back(std::sin(t));
  const auto d = Density1D::from_samples(0, pi, h);
  const double tol = 2 * d.spacing() * d.lipschitz_estimate();
  for (double v : linspace(0.1, 0.9, 5)) {
    CHECK(profile_structured(d, v).value >= model_profile_value(1, 2, pi, v) - tol);
  }
}
