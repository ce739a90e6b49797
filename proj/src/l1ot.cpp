#include "cdiso/l1ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "cdiso/coeffs.hpp"
#include "cdiso/network_simplex.hpp"

namespace cdiso {

namespace {

// Integer units summing exactly to `total`, by largest remainder (ties by index).
std::vector<std::int64_t> to_units(const std::vector<double>& masses, double total) {
  const double sum = std::accumulate(masses.begin(), masses.end(), 0.0);
  std::vector<std::int64_t> units(masses.size());
  std::vector<std::pair<double, std::size_t>> remainders(masses.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double exact = masses[i] / sum * total;
    units[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += units[i];
    remainders[i] = {exact - static_cast<double>(units[i]), i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const auto target = static_cast<std::int64_t>(total);
  for (std::size_t k = 0; assigned < target && k < remainders.size(); ++k, ++assigned) ++units[remainders[k].second];
  return units;
}

struct Solved {
  TransportPlan plan;
  std::vector<std::size_t> sources, sinks;
  std::vector<double> alpha, beta;
};

Solved solve_indexed(const FiniteMMS& X, const Eigen::VectorXd& mu0, const Eigen::VectorXd& mu1,
                     const OtOptions& options) {
  const std::size_t n = X.size();
  if (static_cast<std::size_t>(mu0.size()) != n || static_cast<std::size_t>(mu1.size()) != n)
    throw DomainError("solve_plan: marginal size does not match the space");
  if ((mu0.array() < 0.0).any() || (mu1.array() < 0.0).any()) throw DomainError("solve_plan: negative marginal");
  if (std::abs(mu0.sum() - 1.0) > options.marginal_tolerance || std::abs(mu1.sum() - 1.0) > options.marginal_tolerance)
    throw DomainError("solve_plan: marginals must both have unit mass");

  std::vector<std::size_t> src, snk;
  std::vector<double> m0, m1;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu0(static_cast<Eigen::Index>(i)) > 0.0) {
      src.push_back(i);
      m0.push_back(mu0(static_cast<Eigen::Index>(i)));
    }
    if (mu1(static_cast<Eigen::Index>(i)) > 0.0) {
      snk.push_back(i);
      m1.push_back(mu1(static_cast<Eigen::Index>(i)));
    }
  }
  auto u0 = to_units(m0, options.mass_units);
  auto u1 = to_units(m1, options.mass_units);

  Solved out;
  std::vector<std::int64_t> supply, demand;
  for (std::size_t k = 0; k < src.size(); ++k)
    if (u0[k] > 0) {
      out.sources.push_back(src[k]);
      supply.push_back(u0[k]);
    }
  for (std::size_t k = 0; k < snk.size(); ++k)
    if (u1[k] > 0) {
      out.sinks.push_back(snk[k]);
      demand.push_back(u1[k]);
    }

  Eigen::MatrixXd cost(static_cast<Eigen::Index>(out.sources.size()), static_cast<Eigen::Index>(out.sinks.size()));
  for (std::size_t s = 0; s < out.sources.size(); ++s)
    for (std::size_t t = 0; t < out.sinks.size(); ++t)
      cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = X.dist(out.sources[s], out.sinks[t]);

  const TransportationSolution sol = solve_transportation(cost, supply, demand, options.max_pivots);
  out.plan.pivots = sol.pivots;
  for (const auto& f : sol.flows) {
    const double mass = static_cast<double>(f.amount) / options.mass_units;
    const std::size_t from = out.sources[f.source], to = out.sinks[f.sink];
    out.plan.entries.push_back({from, to, mass});
    out.plan.cost += mass * X.dist(from, to);
  }
  out.alpha = sol.source_dual;
  out.beta = sol.sink_dual;
  return out;
}

}  // namespace

TransportPlan solve_plan(const FiniteMMS& X, const Eigen::VectorXd& mu0, const Eigen::VectorXd& mu1,
                         const OtOptions& options) {
  return solve_indexed(X, mu0, mu1, options).plan;
}

double mean(const FiniteMMS& X, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != X.size()) throw DomainError("function size does not match the space");
  return f.dot(X.weights());
}

double lipschitz_defect(const FiniteMMS& X, const Eigen::VectorXd& phi) {
  double worst = -std::numeric_limits<double>::infinity();
  const std::size_t n = X.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        worst = std::max(worst, phi(static_cast<Eigen::Index>(i)) - phi(static_cast<Eigen::Index>(j)) - X.dist(i, j));
  return n > 1 ? worst : 0.0;
}

PotentialResult solve_potential(const FiniteMMS& X, const Eigen::VectorXd& f, const PotentialOptions& options) {
  const std::size_t n = X.size();
  const double m = mean(X, f);
  const double scale = f.cwiseAbs().dot(X.weights());
  if (std::abs(m) > options.mean_tolerance * std::max(1.0, scale))
    throw DomainError("solve_potential: f must have zero mean");

  PotentialResult out;
  out.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  Eigen::VectorXd pos = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd neg = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double fw = f(k) * X.weight(i);
    if (std::abs(fw) <= options.zero_threshold) continue;
    if (fw > 0)
      pos(k) = fw;
    else
      neg(k) = -fw;
  }
  const double mass_pos = pos.sum(), mass_neg = neg.sum();
  if (mass_pos == 0.0 || mass_neg == 0.0) return out;  // f vanishes: every potential is optimal

  Solved solved = solve_indexed(X, pos / mass_pos, neg / mass_neg, options.ot);
  out.plan = std::move(solved.plan);

  // Double c-transform: alpha(s) = min_t d(s,t) + beta(t), then beta(t) = max_s alpha(s) - d(s,t).
  const auto& S = solved.sources;
  const auto& T = solved.sinks;
  std::vector<double> alpha(S.size()), beta(T.size());
  for (std::size_t s = 0; s < S.size(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < T.size(); ++t) best = std::min(best, X.dist(S[s], T[t]) + solved.beta[t]);
    alpha[s] = best;
  }
  for (std::size_t t = 0; t < T.size(); ++t) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < S.size(); ++s) best = std::max(best, alpha[s] - X.dist(S[s], T[t]));
    beta[t] = best;
  }

  std::vector<std::pair<std::size_t, double>> anchors;
  for (std::size_t s = 0; s < S.size(); ++s) anchors.emplace_back(S[s], alpha[s]);
  for (std::size_t t = 0; t < T.size(); ++t) anchors.emplace_back(T[t], beta[t]);
  for (std::size_t x = 0; x < n; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [y, value] : anchors) best = std::min(best, X.dist(x, y) + value);
    out.phi(static_cast<Eigen::Index>(x)) = best;
  }

  out.root = std::min(*std::min_element(S.begin(), S.end()), *std::min_element(T.begin(), T.end()));
  out.phi.array() -= out.phi(static_cast<Eigen::Index>(out.root));

  out.lipschitz_defect = lipschitz_defect(X, out.phi);
  out.objective = (f.array() * X.weights().array() * out.phi.array()).sum();
  out.normalized_cost = mass_pos * out.plan.cost;
  out.duality_gap = std::abs(out.objective - out.normalized_cost);
  return out;
}

}  // namespace cdiso
