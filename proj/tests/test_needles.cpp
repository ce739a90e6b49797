#include <doctest.h>

#include <cmath>

#include "cdiso/l1ot.hpp"
#include "cdiso/mms.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/needles.hpp"

using namespace cdiso;

namespace {

FiniteMMS points_on_line(const std::vector<double>& xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd d(n, n), labels(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    labels(i, 0) = xs[i];
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::abs(xs[i] - xs[j]);
  }
  return FiniteMMS(d, Eigen::VectorXd::Constant(n, 1.0 / double(n)), labels);
}

struct Interval201 {
  FiniteMMS X = gen_interval(make_named_density("uniform", {}), 201);
  Eigen::VectorXd f;
  Interval201() : f(201) {
    for (Eigen::Index i = 0; i < 201; ++i) f(i) = X.labels()(i, 0) <= 0.5 ? 1.0 : 0.0;
    f.array() -= mean(X, f);
  }
};

}  // namespace

TEST_CASE("structure of a monotone potential on an interval") {
  const auto X = gen_interval(make_named_density("uniform", {}), 21);
  Eigen::VectorXd phi(21);
  for (Eigen::Index i = 0; i < 21; ++i) phi(i) = -X.labels()(i, 0);
  const auto S = build_structure(X, phi);
  CHECK(S.pair_count() == 21 * 20 / 2);
  for (std::size_t i = 0; i < 21; ++i) {
    CHECK(S.successors[i].size() == 20 - i);
    CHECK(S.initial[i] == (i == 0));
    CHECK(S.final[i] == (i == 20));
    CHECK(S.branch_forward[i] == 0);
    CHECK(S.branch_backward[i] == 0);
  }
}

TEST_CASE("constant potential saturates nothing") {
  const auto X = gen_sphere(2, 50);
  const auto S = build_structure(X, Eigen::VectorXd::Zero(50));
  CHECK(S.pair_count() == 0);
  for (auto x : S.transport_set_e) CHECK(x == 0);
}

TEST_CASE("tripod hub is forward branching") {
  // Hub 0; legs of 5 points at spacing 0.2; graph metric through the hub.
  const int legs = 3, per = 5;
  const int n = 1 + legs * per;
  auto leg = [&](int i) { return i == 0 ? -1 : (i - 1) / per; };
  auto radius = [&](int i) { return i == 0 ? 0.0 : 0.2 * ((i - 1) % per + 1); };
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d(i, j) = (leg(i) == leg(j) || i == 0 || j == 0) ? std::abs(radius(i) - radius(j)) : radius(i) + radius(j);
  const FiniteMMS X(d, Eigen::VectorXd::Constant(n, 1.0 / n));
  X.validate();
  Eigen::VectorXd phi(n);
  for (int i = 0; i < n; ++i) phi(i) = leg(i) == 0 ? radius(i) : -radius(i);
  const auto S = build_structure(X, phi);
  CHECK(S.branch_forward[0] == 1);
  CHECK(S.transport_set[0] == 0);
  // Tips of the outgoing legs are final and not branching.
  CHECK(S.final[2 * per]);
  CHECK(S.branch_forward[2 * per] == 0);
}

TEST_CASE("interval needle is the whole chain") {
  Interval201 c;
  const auto pot = solve_potential(c.X, c.f);
  const auto S = build_structure(c.X, pot.phi);
  const auto D = extract_needles(S, c.X);
  REQUIRE(D.needles.size() == 1);
  CHECK(D.needles[0].chain.size() == 201);
  CHECK(D.off_transport.empty());
  CHECK(D.needles[0].quotient_weight == doctest::Approx(1.0));
  CHECK(D.needles[0].isometry_defect <= 1e-9);
  REQUIRE(D.needles[0].density);
  CHECK((*D.needles[0].density)(0.5) == doctest::Approx(1.0).epsilon(1e-6));

  const auto rep = check_needles(D, c.X, c.f, 0, 2, 1e-6);
  CHECK(rep.worst_zero_mean <= 1e-8);
  CHECK(rep.cd_failures == 0);
  CHECK(rep.good_fraction == doctest::Approx(1.0));
  const auto mono = check_d2_monotone(S, c.X, 2000);
  CHECK(mono.violations == 0);
}

TEST_CASE("two disjoint chains give two needles") {
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(0.1 * i);
  for (int i = 0; i <= 20; ++i) xs.push_back(10 + 0.05 * i);
  const auto X = points_on_line(xs);
  Eigen::VectorXd phi(X.size());
  for (std::size_t i = 0; i < xs.size(); ++i) phi(i) = xs[i] < 5 ? -xs[i] : -(xs[i] - 10);
  const auto S = build_structure(X, phi);
  const auto D = extract_needles(S, X);
  REQUIRE(D.needles.size() == 2);
  double w0 = D.needles[0].quotient_weight, w1 = D.needles[1].quotient_weight;
  if (w0 > w1) std::swap(w0, w1);
  CHECK(w0 == doctest::Approx(11.0 / 32));
  CHECK(w1 == doctest::Approx(21.0 / 32));
}

TEST_CASE("single-point needles pass vacuously") {
  const auto X = points_on_line({0, 1});
  NeedleDecomposition D;
  Needle n;
  n.chain = {0};
  n.params = {0.0};
  n.quotient_weight = 0.5;
  D.needles.push_back(n);
  D.off_transport = {1};
  const auto rep = check_needles(D, X, Eigen::Vector2d(0, 0), 1, 2, 0.05);
  CHECK(rep.cd_failures == 0);
  CHECK(rep.per_needle[0].cd_pass);
}

TEST_CASE("tuples of size one are monotone") {
  Interval201 c;
  const auto pot = solve_potential(c.X, c.f);
  const auto S = build_structure(c.X, pot.phi);
  const auto mono = check_d2_monotone(S, c.X, 500, 1);
  CHECK(mono.tuples == 500);
  CHECK(mono.violations == 0);
}

TEST_CASE("great circle deviation of a meridian") {
  const int n = 9;
  Eigen::MatrixXd labels(n, 3), d(n, n);
  for (int i = 0; i < n; ++i) {
    const double a = 0.3 * i;
    labels.row(i) << std::sin(a), 0.0, std::cos(a);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = std::acos(std::clamp(labels.row(i).dot(labels.row(j)), -1.0, 1.0));
  const FiniteMMS X(d, Eigen::VectorXd::Constant(n, 1.0 / n), labels);
  Needle m;
  for (int i = 0; i < n; ++i) m.chain.push_back(i), m.params.push_back(0.3 * i);
  CHECK(great_circle_deviation(X, m) <= 1e-12);
}
