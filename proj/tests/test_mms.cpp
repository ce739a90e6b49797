#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "cdiso/mms.hpp"
#include "cdiso/model_profiles.hpp"

using namespace cdiso;
using std::numbers::pi;

namespace {

FiniteMMS uniform_interval(std::size_t n) { return gen_interval(make_named_density("uniform", {}), n); }

}  // namespace

TEST_CASE("interval generator") {
  const auto X = uniform_interval(11);
  for (std::size_t i = 0; i < 11; ++i)
    for (std::size_t j = 0; j < 11; ++j) CHECK(X.dist(i, j) == doctest::Approx(std::abs(double(i) - double(j)) / 10));
  CHECK(X.weight(0) == doctest::Approx(0.05));
  CHECK(X.weight(5) == doctest::Approx(0.1));
  const auto S = gen_interval(make_named_density("sin_power", {{"K", 1}, {"N", 2}}), 101, 1, 2);
  CHECK(std::abs(S.weights().sum() - 1.0) <= 1e-12);
  CHECK(S.metadata().K == 1.0);
  S.validate();
}

TEST_CASE("sphere generator") {
  const auto C = gen_sphere(1, 4);
  CHECK(C.dist(0, 1) == doctest::Approx(pi / 2));
  const auto S = gen_sphere(2, 2000, 7);
  CHECK(S.diameter() >= pi - 0.15);
  CHECK(S.diameter() <= pi + 1e-12);
  S.validate();
  const auto S3 = gen_sphere(3, 200, 5);
  S3.validate();
  CHECK(S3.labels().cols() == 4);
  CHECK_THROWS_AS(gen_sphere(0, 10), DomainError);
}

TEST_CASE("suspension generator") {
  const FiniteMMS point(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1));
  const auto I = gen_suspension(point, 2, 33);
  CHECK(I.diameter() == doctest::Approx(pi));
  // sin weights: the middle height carries the most mass.
  CHECK(I.weight(16) > I.weight(8));
  const auto S = gen_suspension(gen_sphere(1, 64), 2, 64);
  CHECK(S.diameter() >= pi - 0.05);
  S.validate();
}

TEST_CASE("enlargement") {
  const auto X = uniform_interval(11);
  Subset A(11, 0);
  CHECK(measure(X, enlarge(X, A, 0.5)) == 0.0);
  for (std::size_t i = 0; i <= 3; ++i) A[i] = 1;
  const Subset B = enlarge(X, A, 0.15);
  for (std::size_t i = 0; i < 11; ++i) CHECK(B[i] == (i <= 4 ? 1 : 0));
  const Subset all = enlarge(X, A, 2.0);
  CHECK(measure(X, all) == doctest::Approx(1.0));
}

TEST_CASE("discrete Minkowski content") {
  const auto X = uniform_interval(201);
  Subset A(201, 0), full(201, 1);
  for (std::size_t i = 0; i <= 100; ++i) A[i] = 1;
  const double delta = 1.0 / 200;
  CHECK(std::abs(minkowski_discrete(X, A, 2 * delta) - 1.0) <= 2 * delta);
  CHECK(minkowski_discrete(X, full, 0.1) == 0.0);
  CHECK(minkowski_fit(X, A, delta, 4 * delta) == doctest::Approx(1.0).epsilon(1e-9));

  const auto S = gen_sphere(2, 2000, 7);
  Subset cap(S.size(), 0);
  for (std::size_t i = 0; i < S.size(); ++i) cap[i] = S.labels()(i, 2) > 0;
  const double model = model_profile_value(1, 2, pi, 0.5);
  CHECK(std::abs(minkowski_discrete(S, cap, 0.1) - model) <= 0.15 * model);
  CHECK(std::abs(minkowski_two_sided(S, cap, S.resolution(), 4 * S.resolution()) - model) <= 0.15 * model);
}

TEST_CASE("space files round trip and validation") {
  const auto X = gen_sphere(2, 50, 3);
  const auto dir = std::filesystem::temp_directory_path() / "cdiso_test_mms";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "s").string();
  write_space(X, prefix);
  const auto Y = read_space(prefix);
  CHECK((X.dist() - Y.dist()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((X.weights() - Y.weights()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(Y.metadata().K == X.metadata().K);

  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(FiniteMMS(d, Eigen::VectorXd::Constant(3, 1.0 / 3)).validate(), DomainError);
}
