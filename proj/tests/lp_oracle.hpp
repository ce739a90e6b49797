#pragma once

// Dense two-phase tableau simplex with Bland's rule for the transportation
// problem. Small and slow on purpose: an oracle independent of the network
// simplex in the library.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lp_oracle {

inline double transport_cost(const Eigen::MatrixXd& cost, const Eigen::VectorXd& supply, const Eigen::VectorXd& demand) {
  const int S = static_cast<int>(supply.size()), T = static_cast<int>(demand.size());
  const int nv = S * T;
  // Rows: supplies, then all demands but the last (redundant).
  const int m = S + T - 1;
  const int cols = nv + m + 1;  // variables, artificials, rhs
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, cols);
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < T; ++t) {
      tab(s, s * T + t) = 1;
      if (t < T - 1) tab(S + t, s * T + t) = 1;
    }
  for (int s = 0; s < S; ++s) tab(s, cols - 1) = supply(s);
  for (int t = 0; t < T - 1; ++t) tab(S + t, cols - 1) = demand(t);
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    tab(r, nv + r) = 1;
    basis[r] = nv + r;
  }

  const double eps = 1e-12;
  auto pivot = [&](int r, int c) {
    tab.row(r) /= tab(r, c);
    for (int i = 0; i <= m; ++i)
      if (i != r && tab(i, c) != 0.0) tab.row(i) -= tab(i, c) * tab.row(r);
    basis[r] = c;
  };
  auto run = [&](int allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      int enter = -1;
      for (int c = 0; c < allowed; ++c)
        if (tab(m, c) < -eps) {
          enter = c;
          break;
        }
      if (enter < 0) return;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r)
        if (tab(r, enter) > eps) {
          const double ratio = tab(r, cols - 1) / tab(r, enter);
          if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      if (leave < 0) throw std::runtime_error("lp oracle: unbounded");
      pivot(leave, enter);
    }
    throw std::runtime_error("lp oracle: iteration limit");
  };

  // Phase 1: minimize the sum of artificials.
  tab.row(m).setZero();
  for (int r = 0; r < m; ++r) tab.row(m) -= tab.row(r);
  for (int r = 0; r < m; ++r) tab(m, nv + r) = 0;
  run(nv + m);
  if (std::abs(tab(m, cols - 1)) > 1e-9) throw std::runtime_error("lp oracle: infeasible");
  for (int r = 0; r < m; ++r)
    if (basis[r] >= nv)
      for (int c = 0; c < nv; ++c)
        if (std::abs(tab(r, c)) > eps) {
          pivot(r, c);
          break;
        }

  // Phase 2 over the original variables.
  tab.row(m).setZero();
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < T; ++t) tab(m, s * T + t) = cost(s, t);
  for (int r = 0; r < m; ++r)
    if (basis[r] < nv) tab.row(m) -= tab(m, basis[r]) * tab.row(r);
  run(nv);
  return -tab(m, cols - 1);
}

}  // namespace lp_oracle
