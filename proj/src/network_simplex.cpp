#include "cdiso/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cdiso/coeffs.hpp"

namespace cdiso {

namespace {

// Primal network simplex on the complete bipartite graph sources -> sinks,
// plus one artificial arc per node joining it to an extra root. Real arc
// a = s * nt + t; artificial arc of node x is M + x.
class TransportationSimplex {
 public:
  TransportationSimplex(const Eigen::MatrixXd& cost, const std::vector<std::int64_t>& supply,
                        const std::vector<std::int64_t>& demand)
      : cost_(cost),
        ns_(supply.size()),
        nt_(demand.size()),
        nodes_(ns_ + nt_),
        root_(nodes_),
        arcs_(ns_ * nt_) {
    double max_cost = 0.0;
    for (Eigen::Index i = 0; i < cost.rows(); ++i)
      for (Eigen::Index j = 0; j < cost.cols(); ++j) max_cost = std::max(max_cost, std::abs(cost(i, j)));
    art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
    tol_ = 1e-12 * std::max(1.0, max_cost) * std::sqrt(static_cast<double>(nodes_ + 1));

    const std::size_t all = nodes_ + 1;
    parent_.assign(all, kNone);
    pred_.assign(all, kNone);
    up_.assign(all, false);
    depth_.assign(all, 0);
    pi_.assign(all, 0.0);
    first_child_.assign(all, kNone);
    next_sib_.assign(all, kNone);
    prev_sib_.assign(all, kNone);
    art_up_.assign(nodes_, false);
    flow_.assign(arcs_ + nodes_, 0);
    in_tree_.assign(arcs_, 0);

    for (std::size_t x = 0; x < nodes_; ++x) {
      const std::int64_t b = x < ns_ ? supply[x] : -demand[x - ns_];
      // Positive supply hangs below the root through x -> root; everything else
      // through root -> x, so zero-flow tree arcs point away from the root.
      art_up_[x] = b > 0;
      parent_[x] = root_;
      pred_[x] = arcs_ + x;
      up_[x] = art_up_[x];
      depth_[x] = 1;
      flow_[arcs_ + x] = b > 0 ? b : -b;
      pi_[x] = art_up_[x] ? -art_cost_ : art_cost_;
      attach(x, root_);
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(arcs_))));
  }

  std::size_t run(std::size_t max_pivots) {
    std::size_t pivots = 0;
    while (true) {
      const std::size_t entering = find_entering();
      if (entering == kNone) break;
      if (++pivots > max_pivots)
        throw ResourceError("network simplex: pivot budget of " + std::to_string(max_pivots) + " exhausted");
      pivot(entering);
    }
    for (std::size_t x = 0; x < nodes_; ++x)
      if (flow_[arcs_ + x] != 0) throw DomainError("network simplex: supply and demand are not balanced");
    return pivots;
  }

  TransportationSolution solution() const {
    TransportationSolution out;
    for (std::size_t a = 0; a < arcs_; ++a) {
      if (flow_[a] > 0) {
        const std::size_t s = a / nt_, t = a % nt_;
        out.flows.push_back({s, t, flow_[a]});
        out.cost += static_cast<double>(flow_[a]) * cost_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
      }
    }
    // reduced cost c + pi_s - pi_t >= 0 gives alpha = -pi_s, beta = -pi_t
    out.source_dual.resize(ns_);
    out.sink_dual.resize(nt_);
    for (std::size_t s = 0; s < ns_; ++s) out.source_dual[s] = -pi_[s];
    for (std::size_t t = 0; t < nt_; ++t) out.sink_dual[t] = -pi_[ns_ + t];
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t arc_source(std::size_t a) const {
    if (a < arcs_) return a / nt_;
    const std::size_t x = a - arcs_;
    return art_up_[x] ? x : root_;
  }
  std::size_t arc_target(std::size_t a) const {
    if (a < arcs_) return ns_ + a % nt_;
    const std::size_t x = a - arcs_;
    return art_up_[x] ? root_ : x;
  }
  double arc_cost(std::size_t a) const {
    if (a < arcs_) return cost_(static_cast<Eigen::Index>(a / nt_), static_cast<Eigen::Index>(a % nt_));
    return art_cost_;
  }

  void attach(std::size_t x, std::size_t p) {
    parent_[x] = p;
    prev_sib_[x] = kNone;
    next_sib_[x] = first_child_[p];
    if (first_child_[p] != kNone) prev_sib_[first_child_[p]] = x;
    first_child_[p] = x;
  }
  void detach(std::size_t x) {
    const std::size_t p = parent_[x];
    if (prev_sib_[x] != kNone)
      next_sib_[prev_sib_[x]] = next_sib_[x];
    else
      first_child_[p] = next_sib_[x];
    if (next_sib_[x] != kNone) prev_sib_[next_sib_[x]] = prev_sib_[x];
    prev_sib_[x] = next_sib_[x] = kNone;
    parent_[x] = kNone;
  }

  std::size_t find_entering() {
    double best_rc = -tol_;
    std::size_t best = kNone;
    std::size_t count = block_;
    for (std::size_t k = 0; k < arcs_; ++k) {
      const std::size_t a = next_arc_;
      next_arc_ = next_arc_ + 1 == arcs_ ? 0 : next_arc_ + 1;
      if (!in_tree_[a]) {
        const std::size_t s = a / nt_, t = a % nt_;
        const double rc = cost_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) + pi_[s] - pi_[ns_ + t];
        if (rc < best_rc) {
          best_rc = rc;
          best = a;
        }
      }
      if (--count == 0) {
        if (best != kNone) return best;
        count = block_;
      }
    }
    return best;
  }

  void pivot(std::size_t entering) {
    const std::size_t first = arc_source(entering);
    const std::size_t second = arc_target(entering);

    std::size_t a = first, b = second;
    while (a != b) {
      if (depth_[a] >= depth_[b])
        a = parent_[a];
      else
        b = parent_[b];
    }
    const std::size_t join = a;

    // Leaving arc: last blocking arc in cycle orientation keeps the tree strongly feasible.
    constexpr std::int64_t kInfFlow = std::numeric_limits<std::int64_t>::max();
    std::int64_t delta = kInfFlow;
    std::size_t u_out = kNone;
    int side = 0;
    for (std::size_t u = first; u != join; u = parent_[u]) {
      const std::int64_t d = up_[u] ? flow_[pred_[u]] : kInfFlow;
      if (d < delta) {
        delta = d;
        u_out = u;
        side = 1;
      }
    }
    for (std::size_t u = second; u != join; u = parent_[u]) {
      const std::int64_t d = up_[u] ? kInfFlow : flow_[pred_[u]];
      if (d <= delta) {
        delta = d;
        u_out = u;
        side = 2;
      }
    }
    if (u_out == kNone) throw DomainError("network simplex: unbounded cycle");

    if (delta > 0) {
      flow_[entering] += delta;
      for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
      for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
    }

    // Re-hang the subtree cut off at u_out from the entering arc.
    const std::size_t in_node = side == 1 ? first : second;
    const std::size_t other = side == 1 ? second : first;
    const std::size_t leaving = pred_[u_out];
    if (leaving < arcs_) in_tree_[leaving] = 0;
    in_tree_[entering] = 1;

    std::vector<std::size_t>& path = path_;
    path.clear();
    for (std::size_t u = in_node; u != u_out; u = parent_[u]) path.push_back(u);
    path.push_back(u_out);

    detach(u_out);
    // Reverse parent links along in_node -> ... -> u_out.
    for (std::size_t i = path.size() - 1; i > 0; --i) {
      const std::size_t child = path[i - 1], node = path[i];
      detach(child);
      pred_[node] = pred_[child];
      up_[node] = !up_[child];
      attach(node, child);
    }
    pred_[in_node] = entering;
    up_[in_node] = side == 1;  // first -> second: in_node = first points up to second
    attach(in_node, other);

    refresh_subtree(in_node);
  }

  void refresh_subtree(std::size_t top) {
    std::vector<std::size_t>& stack = stack_;
    stack.clear();
    stack.push_back(top);
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      const std::size_t p = parent_[x];
      const double c = arc_cost(pred_[x]);
      // tree arcs have zero reduced cost: c + pi[source] - pi[target] = 0
      pi_[x] = up_[x] ? pi_[p] - c : pi_[p] + c;
      depth_[x] = depth_[p] + 1;
      for (std::size_t ch = first_child_[x]; ch != kNone; ch = next_sib_[ch]) stack.push_back(ch);
    }
  }

  const Eigen::MatrixXd& cost_;
  std::size_t ns_, nt_, nodes_, root_, arcs_;
  double art_cost_ = 0.0;
  double tol_ = 0.0;
  std::size_t block_ = 10;
  std::size_t next_arc_ = 0;

  std::vector<std::size_t> parent_, pred_;
  std::vector<bool> up_;
  std::vector<std::size_t> depth_;
  std::vector<double> pi_;
  std::vector<std::size_t> first_child_, next_sib_, prev_sib_;
  std::vector<bool> art_up_;
  std::vector<std::int64_t> flow_;
  std::vector<std::uint8_t> in_tree_;
  std::vector<std::size_t> path_, stack_;
};

}  // namespace

TransportationSolution solve_transportation(const Eigen::MatrixXd& cost, const std::vector<std::int64_t>& supply,
                                            const std::vector<std::int64_t>& demand, std::size_t max_pivots) {
  if (static_cast<std::size_t>(cost.rows()) != supply.size() || static_cast<std::size_t>(cost.cols()) != demand.size())
    throw DomainError("solve_transportation: cost matrix shape does not match supply and demand");
  if (supply.empty() || demand.empty()) throw DomainError("solve_transportation: empty side");
  for (auto s : supply)
    if (s < 0) throw DomainError("solve_transportation: negative supply");
  for (auto d : demand)
    if (d < 0) throw DomainError("solve_transportation: negative demand");
  if (std::accumulate(supply.begin(), supply.end(), std::int64_t{0}) !=
      std::accumulate(demand.begin(), demand.end(), std::int64_t{0}))
    throw DomainError("solve_transportation: supply and demand totals differ");
  if (!cost.allFinite()) throw DomainError("solve_transportation: non-finite cost");

  TransportationSimplex simplex(cost, supply, demand);
  const std::size_t pivots = simplex.run(max_pivots);
  TransportationSolution out = simplex.solution();
  out.pivots = pivots;
  return out;
}

}  // namespace cdiso
