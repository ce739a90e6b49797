#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "cdiso/mms.hpp"

namespace cdiso {

struct PlanEntry {
  std::size_t from = 0;  ///< point index in X
  std::size_t to = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0.0;
  std::size_t pivots = 0;
};

struct OtOptions {
  double mass_units = 1099511627776.0;  ///< 2^40 integer units per unit of mass
  std::size_t max_pivots = 50'000'000;
  double marginal_tolerance = 1e-10;
};

/// Optimal plan between probability vectors mu0 and mu1 on X for cost d.
/// Masses are rounded to integer units (largest remainder) before solving.
TransportPlan solve_plan(const FiniteMMS& X, const Eigen::VectorXd& mu0, const Eigen::VectorXd& mu1,
                         const OtOptions& options = {});

/// Sum of f * w.
double mean(const FiniteMMS& X, const Eigen::VectorXd& f);

/// max over pairs of phi(x) - phi(y) - d(x, y).
double lipschitz_defect(const FiniteMMS& X, const Eigen::VectorXd& phi);

struct PotentialResult {
  Eigen::VectorXd phi;          ///< 1-Lipschitz, phi(root) = 0
  std::size_t root = 0;         ///< smallest index in the support of f
  double lipschitz_defect = 0.0;
  double objective = 0.0;       ///< sum f * phi * w
  double normalized_cost = 0.0; ///< (sum f_+ w) * W1(mu0, mu1)
  double duality_gap = 0.0;     ///< |objective - normalized_cost|
  TransportPlan plan;           ///< between mu0 = f_+ w / int f_+ and mu1 = f_- w / int f_-
};

struct PotentialOptions {
  OtOptions ot;
  double mean_tolerance = 1e-10;
  double zero_threshold = 1e-14;  ///< |f| w below this leaves the flow
};

/// Kantorovich potential maximizing sum f phi w over 1-Lipschitz phi, from
/// the duals of the transport problem between f_+ and f_-, made exactly
/// 1-Lipschitz by a double c-transform and extended off the support by
/// phi(x) = min_y d(x, y) + phi(y).
PotentialResult solve_potential(const FiniteMMS& X, const Eigen::VectorXd& f, const PotentialOptions& options = {});

}  // namespace cdiso
