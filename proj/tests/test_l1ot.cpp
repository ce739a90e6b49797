#include <doctest.h>

#include <random>

#include "cdiso/l1ot.hpp"
#include "cdiso/mms.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/network_simplex.hpp"
#include "lp_oracle.hpp"

using namespace cdiso;

namespace {

FiniteMMS line(const std::vector<double>& xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::abs(xs[i] - xs[j]);
  return FiniteMMS(d, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

FiniteMMS random_planar(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd p(n, 2);
  for (std::size_t i = 0; i < n; ++i) p.row(i) << u(rng), u(rng);
  Eigen::MatrixXd d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
  return FiniteMMS(d, Eigen::VectorXd::Constant(n, 1.0 / double(n)), p);
}

Eigen::VectorXd random_probability(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1);
  Eigen::VectorXd p(n);
  for (auto& x : p) x = u(rng);
  return p / p.sum();
}

}  // namespace

TEST_CASE("plan examples") {
  const auto X = line({0, 1, 2});
  const auto p = solve_plan(X, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1));
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].from == 0);
  CHECK(p.entries[0].to == 2);
  CHECK(p.cost == doctest::Approx(2.0));
}

TEST_CASE("transportation solver on a tiny instance") {
  Eigen::MatrixXd c(2, 2);
  c << 1, 3, 2, 1;
  const auto s = solve_transportation(c, {5, 5}, {4, 6});
  CHECK(s.cost == doctest::Approx(4 * 1 + 1 * 3 + 5 * 1));
  for (const auto& f : s.flows)
    CHECK(s.source_dual[f.source] - s.sink_dual[f.sink] == doctest::Approx(c(f.source, f.sink)));
  CHECK_THROWS_AS(solve_transportation(c, {5, 5}, {4, 6}, 0), ResourceError);
}

TEST_CASE("random instances agree with the dense LP oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto X = random_planar(20, rng);
    const Eigen::VectorXd mu0 = random_probability(20, rng), mu1 = random_probability(20, rng);
    const auto plan = solve_plan(X, mu0, mu1);
    const double oracle = lp_oracle::transport_cost(X.dist(), mu0, mu1);
    CHECK(std::abs(plan.cost - oracle) <= 1e-8);

    const Eigen::VectorXd f = mu0 - mu1;
    const auto pot = solve_potential(X, f.cwiseQuotient(X.weights()));
    CHECK(pot.duality_gap <= 1e-8);
    CHECK(pot.lipschitz_defect <= 1e-9);
    for (const auto& e : pot.plan.entries)
      CHECK(std::abs(pot.phi(e.from) - pot.phi(e.to) - X.dist(e.from, e.to)) <= 1e-8);
  }
}

TEST_CASE("potentials") {
  const auto two = line({0, 1.5});
  const auto p = solve_potential(two, Eigen::Vector2d(1, -1));
  CHECK(p.phi(0) - p.phi(1) == doctest::Approx(1.5));

  const auto X = gen_interval(make_named_density("uniform", {}), 101);
  Eigen::VectorXd f(101);
  for (Eigen::Index i = 0; i < 101; ++i) f(i) = X.labels()(i, 0) <= 0.5 ? 1.0 : 0.0;
  f.array() -= mean(X, f);
  const auto q = solve_potential(X, f);
  for (std::size_t i = 0; i < 101; i += 10)
    for (std::size_t j = i; j < 101; j += 10) CHECK(q.phi(i) - q.phi(j) == doctest::Approx(X.dist(i, j)).epsilon(1e-9));

  Eigen::VectorXd g = Eigen::VectorXd::Ones(101);
  CHECK_THROWS_AS(solve_potential(X, g), DomainError);
}
