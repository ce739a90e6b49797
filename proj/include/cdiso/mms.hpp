#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cdiso/density1d.hpp"

namespace cdiso {

/// Indicator of a subset of the points of a FiniteMMS.
using Subset = std::vector<std::uint8_t>;

/// Claims and provenance attached by the generators.
struct MmsMetadata {
  std::string kind = "custom";  ///< interval, sphere, suspension or custom
  double K = 0.0;               ///< claimed curvature bound
  double N = 1.0;               ///< claimed dimension bound
  /// Suspension only: height t in [0, pi] and base point of every point (-1 at poles).
  std::vector<double> heights;
  std::vector<int> base_index;
};

/// Finite metric measure space: distance matrix plus probability weights.
class FiniteMMS {
 public:
  FiniteMMS() = default;
  FiniteMMS(Eigen::MatrixXd dist, Eigen::VectorXd weights, Eigen::MatrixXd labels = {},
            MmsMetadata metadata = {});

  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  const Eigen::MatrixXd& dist() const { return dist_; }
  double dist(std::size_t i, std::size_t j) const { return dist_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }
  /// Coordinates of an embedding, one row per point; may be empty.
  const Eigen::MatrixXd& labels() const { return labels_; }
  const MmsMetadata& metadata() const { return metadata_; }

  double diameter() const { return diameter_; }
  /// Largest nearest-neighbour distance (covering scale of the sample).
  double resolution() const { return resolution_; }

  /// Throws DomainError on asymmetry, a nonzero diagonal, negative entries,
  /// bad weights, or a triangle inequality violation beyond 1e-9. All
  /// triples are checked for n <= 300, `random_triples` samples otherwise.
  void validate(std::size_t random_triples = 100000, std::uint64_t seed = 1) const;

 private:
  Eigen::MatrixXd dist_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd labels_;
  MmsMetadata metadata_;
  double diameter_ = 0.0;
  double resolution_ = 0.0;
};

/// n equispaced points on the support of d, weighted by the mass of their
/// Voronoi cells. Metadata claims (K, N).
FiniteMMS gen_interval(const Density1D& d, std::size_t n, double K = 0.0, double N = 1.0);

/// n points on the unit sphere S^dim with geodesic distance and weights 1/n.
/// S^1: equispaced; S^2: Fibonacci lattice; S^3: seeded rejection sampling.
FiniteMMS gen_sphere(int dim, std::size_t n, std::uint64_t seed = 0);

/// Spherical suspension [0, pi] x_sin^{N-1} base with n_t heights, poles
/// included and collapsed to single points.
FiniteMMS gen_suspension(const FiniteMMS& base, double N, std::size_t n_t);

double measure(const FiniteMMS& X, const Subset& A);

/// {x : d(x, y) < eps for some y in A}.
Subset enlarge(const FiniteMMS& X, const Subset& A, double eps);

/// (m(A^eps) - m(A)) / eps with the closed neighbourhood d(x, A) <= eps.
double minkowski_discrete(const FiniteMMS& X, const Subset& A, double eps);

/// Least-squares slope of eps -> m(A^eps) - m(A) over `samples` equispaced
/// eps in [eps_lo, eps_hi], each outside point entering linearly over a
/// window of one resolution centred at its distance to A. The single-eps
/// quotient jumps with every shell of points reached; the slope of the
/// ramped growth does not (it is exact on a uniform 1-D grid).
double minkowski_fit(const FiniteMMS& X, const Subset& A, double eps_lo, double eps_hi, std::size_t samples = 64);

/// Mean of minkowski_fit for A and for its complement. The curvature terms
/// of the two growth curves have opposite signs and cancel to first order.
double minkowski_two_sided(const FiniteMMS& X, const Subset& A, double eps_lo, double eps_hi,
                           std::size_t samples = 64);

struct LadderValue {
  double eps = 0.0;
  double value = 0.0;
};

struct MinkowskiLadder {
  std::vector<LadderValue> rungs;
  double minimum = 0.0;
};

/// minkowski_discrete at eps = factor * resolution for each factor.
MinkowskiLadder minkowski_ladder(const FiniteMMS& X, const Subset& A,
                                 const std::vector<double>& factors = {2.0, 4.0, 8.0});

/// Points of X within distance r of `center`.
Subset ball(const FiniteMMS& X, std::size_t center, double r);

/// Writes prefix.dist.csv (n, then the strict lower triangle row by row),
/// prefix.weights.csv and prefix.meta.json.
void write_space(const FiniteMMS& X, const std::string& prefix);
FiniteMMS read_space(const std::string& prefix);

}  // namespace cdiso
