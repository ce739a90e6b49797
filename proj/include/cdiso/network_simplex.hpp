#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cdiso {

struct FlowEntry {
  std::size_t source = 0;
  std::size_t sink = 0;
  std::int64_t amount = 0;
};

struct TransportationSolution {
  std::vector<FlowEntry> flows;       ///< positive flows only, sorted by (source, sink)
  std::vector<double> source_dual;    ///< alpha with alpha_s - beta_t <= cost(s,t)
  std::vector<double> sink_dual;      ///< beta, tight on every positive flow
  double cost = 0.0;                  ///< sum of amount * cost
  std::size_t pivots = 0;
};

/// Uncapacitated transportation problem by the primal network simplex
/// method: strongly feasible spanning trees, block-search pricing and
/// index-ordered tie breaking. supply and demand must have equal sums.
/// Throws ResourceError after max_pivots pivots.
TransportationSolution solve_transportation(const Eigen::MatrixXd& cost, const std::vector<std::int64_t>& supply,
                                            const std::vector<std::int64_t>& demand,
                                            std::size_t max_pivots = 50'000'000);

}  // namespace cdiso
