#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cdiso/density1d.hpp"
#include "cdiso/mms.hpp"

namespace cdiso {

/// Saturated pairs of a 1-Lipschitz potential and the sets built from them.
struct TransportStructure {
  double tol_sat = 0.0;
  /// successors[x] = {y != x : phi(x) - phi(y) >= d(x, y) - tol_sat}, sorted by index.
  std::vector<std::vector<std::uint32_t>> successors;
  std::vector<std::vector<std::uint32_t>> predecessors;
  std::vector<double> phi;
  Subset initial;           ///< in T_e with no predecessor
  Subset final;             ///< in T_e with no successor
  Subset transport_set_e;   ///< T_e: points in some saturated pair
  Subset branch_forward;    ///< A+
  Subset branch_backward;   ///< A-
  Subset transport_set;     ///< T = T_e minus (A+ union A-)

  std::size_t pair_count() const;
  /// d(x, y) - (phi(x) - phi(y)); nonnegative up to the Lipschitz defect.
  double gap(const FiniteMMS& X, std::size_t x, std::size_t y) const;
};

/// 10 * 1e-8 * diameter.
double default_tol_sat(const FiniteMMS& X);

/// A negative tol_sat selects default_tol_sat(X). A point is forward
/// branching when some saturated successor y is not saturated towards the
/// farthest saturated successor z, i.e. gap(y, z) > 3 tol_sat; backward
/// branching is the mirror test on predecessors.
TransportStructure build_structure(const FiniteMMS& X, const Eigen::VectorXd& phi, double tol_sat = -1.0);

struct Needle {
  std::vector<std::size_t> chain;  ///< phi decreasing
  std::vector<double> params;      ///< t_i = d(chain_0, chain_i)
  std::optional<Density1D> density;  ///< absent for a single point
  double quotient_weight = 0.0;    ///< mass of the chain
  double isometry_defect = 0.0;    ///< max |d(c_i, c_j) - |t_i - t_j||
  double affinity_defect = 0.0;    ///< max |phi(c_0) - t_i - phi(c_i)|
};

struct NeedleOptions {
  double tol_iso = -1.0;         ///< negative: 10 * tol_sat
  bool throw_on_isometry = true;
  std::size_t min_grid_cells = 64;
};

struct NeedleDecomposition {
  std::vector<Needle> needles;
  std::vector<std::size_t> off_transport;  ///< Z: points in no needle
  double needle_mass = 0.0;
  double off_transport_mass = 0.0;
  double branch_mass = 0.0;  ///< m(T_e minus T)
  double tol_iso = 0.0;
};

/// Greedy maximal chains over T: seed at the unprocessed point of largest
/// phi that has an unprocessed saturated successor, jump to the farthest
/// such successor until none is left, then collect every unprocessed point
/// lying between the seed and the end. Densities spread each point's weight
/// over its Voronoi cell on the chain and interpolate the cell averages
/// linearly on a uniform grid. Throws DomainError on an isometry defect
/// beyond tol_iso when options.throw_on_isometry.
NeedleDecomposition extract_needles(const TransportStructure& S, const FiniteMMS& X,
                                    const NeedleOptions& options = {});

struct NeedleCheck {
  double zero_mean_defect = 0.0;  ///< |sum f w| / needle mass
  bool cd_pass = true;
  double cd_violation = 0.0;      ///< worst rhs - lhs, 0 when none
  std::size_t mcp_violations = 0;
  double mcp_worst = 0.0;         ///< worst relative excess over the ratio bounds
};

struct NeedleReport {
  std::vector<NeedleCheck> per_needle;
  double total_mass = 0.0;
  double good_mass = 0.0;  ///< mass of needles within both thresholds below
  double good_fraction = 0.0;
  double worst_zero_mean = 0.0;
  double worst_cd = 0.0;
  std::size_t cd_failures = 0;
  std::size_t mcp_violations = 0;
  double off_transport_f_mass = 0.0;  ///< sum over Z of |f| w
};

struct NeedleCheckOptions {
  double zero_mean_threshold = 0.02;  ///< a needle counts as good below this
  unsigned threads = 1;
};

/// Zero mean, CD(K,N) at `tol` and the MCP ratio bounds on every needle.
NeedleReport check_needles(const NeedleDecomposition& D, const FiniteMMS& X, const Eigen::VectorXd& f, double K,
                           double N, double tol, const NeedleCheckOptions& options = {});

struct MonotoneReport {
  std::size_t tuples = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  ///< max over tuples and shifts of lhs - rhs
};

/// Samples tuples of 1 to max_size saturated pairs whose phi-orders agree
/// pairwise and tests sum d^2(x_i, y_i) <= sum d^2(x_i, y_{i+s}) for every
/// cyclic shift s. Excess above `threshold` counts as a violation.
MonotoneReport check_d2_monotone(const TransportStructure& S, const FiniteMMS& X, std::size_t samples,
                                 std::size_t max_size = 4, std::uint64_t seed = 7, double threshold = 1e-9);

/// Largest angular distance from a chain point to the best-fitting great
/// circle; needs 3-D unit-vector labels. Zero for chains of at most 2 points.
double great_circle_deviation(const FiniteMMS& X, const Needle& needle);

}  // namespace cdiso
