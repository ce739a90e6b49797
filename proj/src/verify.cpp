#include "cdiso/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "cdiso/coeffs.hpp"
#include "cdiso/l1ot.hpp"
#include "cdiso/model_profiles.hpp"
#include "cdiso/needles.hpp"
#include "cdiso/numeric.hpp"

namespace cdiso {

Subset prefix_of_mass(const FiniteMMS& X, const std::vector<double>& key, double v) {
  const std::size_t n = X.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return key[a] < key[b]; });
  Subset A(n, 0);
  double mass = 0.0;
  for (auto i : order) {
    const double next = mass + X.weight(i);
    if (std::abs(next - v) > std::abs(mass - v) && mass > 0.0) break;
    A[i] = 1;
    mass = next;
  }
  return A;
}

Subset ball_of_mass(const FiniteMMS& X, std::size_t center, double v) {
  std::vector<double> key(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) key[i] = X.dist(center, i);
  return prefix_of_mass(X, key, v);
}

std::size_t CompareReport::violation_count() const {
  std::size_t count = 0;
  for (const auto& e : entries) count += e.violations.size();
  return count;
}

namespace {

std::vector<Candidate> candidates_for(const FiniteMMS& X, double v, const std::vector<std::size_t>& centers,
                                      const std::vector<Eigen::VectorXd>& potentials,
                                      const std::vector<Candidate>& user) {
  std::vector<Candidate> out;
  for (auto c : centers) out.push_back({"ball@" + std::to_string(c), ball_of_mass(X, c, v)});
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    const Eigen::VectorXd& phi = potentials[k];
    std::vector<double> key(phi.data(), phi.data() + phi.size());
    out.push_back({"sublevel#" + std::to_string(k), prefix_of_mass(X, key, v)});
    for (auto& value : key) value = -value;
    out.push_back({"superlevel#" + std::to_string(k), prefix_of_mass(X, key, v)});
  }
  for (const auto& c : user) out.push_back(c);
  return out;
}

}  // namespace

CompareReport compare_profile(const FiniteMMS& X, double K, double N, const std::vector<double>& v_grid,
                              std::vector<double> eps_ladder, const CompareOptions& options) {
  CompareReport report;
  report.K = K;
  report.N = N;
  report.D = X.diameter();
  report.resolution = X.resolution();
  if (eps_ladder.empty()) eps_ladder = {2.0 * X.resolution()};
  const std::size_t n = X.size();
  // A diameter equal to the Bonnet-Myers bound up to rounding carries no extra information.
  const double cap = bonnet_myers_diameter(K, N);
  const double D = report.D >= cap * (1.0 - 1e-9) ? std::numeric_limits<double>::infinity() : report.D;
  const bool fit = options.estimator == ContentEstimator::two_sided_fit;
  const double fit_lo = options.fit_lo * X.resolution(), fit_hi = options.fit_hi * X.resolution();

  std::vector<std::size_t> centers(n);
  std::iota(centers.begin(), centers.end(), 0);
  std::mt19937_64 rng(options.seed);
  if (options.centers < n) {
    std::shuffle(centers.begin(), centers.end(), rng);
    centers.resize(options.centers);
    std::sort(centers.begin(), centers.end());
  }

  std::vector<Eigen::VectorXd> potentials;
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < options.random_potentials && n > 1; ++k) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) f(static_cast<Eigen::Index>(i)) = normal(rng);
    f.array() -= mean(X, f) / X.weights().sum();
    potentials.push_back(solve_potential(X, f).phi);
  }

  for (double v : v_grid) {
    CompareEntry entry;
    entry.v = v;
    entry.model = model_profile_value(K, N, D, v);
    entry.estimate = std::numeric_limits<double>::infinity();
    if (v <= 0.0 || v >= 1.0) {
      entry.estimate = 0.0;
      entry.best = {v <= 0.0 ? "empty" : "whole", 0.0, v <= 0.0 ? 0.0 : 1.0, 0.0, entry.model, 0.0};
      report.entries.push_back(std::move(entry));
      continue;
    }
    const auto family = candidates_for(X, v, centers, potentials, options.user_sets);
    // Candidates of one v share a handful of masses; evaluate the model once per mass.
    std::vector<double> masses(family.size());
    for (std::size_t c = 0; c < family.size(); ++c) masses[c] = measure(X, family[c].set);
    std::vector<double> distinct(masses);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<double> models(distinct.size());
    parallel_for(distinct.size(), options.threads,
                 [&](std::size_t i) { models[i] = model_profile_value(K, N, D, distinct[i]); });

    std::vector<std::vector<CandidateValue>> values(family.size());
    parallel_for(family.size(), options.threads, [&](std::size_t c) {
      const double mass = masses[c];
      const double model = models[static_cast<std::size_t>(
          std::lower_bound(distinct.begin(), distinct.end(), mass) - distinct.begin())];
      if (fit) {
        const double eps = 0.5 * (fit_lo + fit_hi);
        values[c].push_back({family[c].label, eps, mass, minkowski_two_sided(X, family[c].set, fit_lo, fit_hi),
                             model, options.slack(eps, X.resolution())});
        return;
      }
      for (double eps : eps_ladder)
        values[c].push_back({family[c].label, eps, mass, minkowski_discrete(X, family[c].set, eps), model,
                             options.slack(eps, X.resolution())});
    });
    for (const auto& row : values)
      for (const auto& cv : row) {
        if (cv.content < entry.estimate) {
          entry.estimate = cv.content;
          entry.best = cv;
        }
        if (cv.content < cv.model - cv.slack) entry.violations.push_back(cv);
      }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

NeedleBoundReport needle_lower_bound(const FiniteMMS& X, const Subset& A, double K, double N, double eps,
                                     const SlackModel& slack) {
  const std::size_t n = X.size();
  if (A.size() != n) throw DomainError("needle_lower_bound: subset size does not match the space");
  NeedleBoundReport report;
  report.v = measure(X, A);
  report.eps = eps > 0.0 ? eps : 2.0 * X.resolution();
  report.slack = slack(report.eps, X.resolution());
  report.measured = minkowski_discrete(X, A, report.eps);

  Eigen::VectorXd f(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) f(static_cast<Eigen::Index>(i)) = (A[i] ? 1.0 : 0.0) - report.v;
  const PotentialResult pot = solve_potential(X, f);
  const TransportStructure S = build_structure(X, pot.phi);
  NeedleOptions needle_options;
  needle_options.throw_on_isometry = false;
  const NeedleDecomposition D = extract_needles(S, X, needle_options);
  report.needles = D.needles.size();
  report.off_transport_mass = D.off_transport_mass;

  for (const Needle& q : D.needles) {
    if (!q.density || q.quotient_weight <= 0.0) continue;
    const std::size_t k = q.chain.size();
    std::vector<Interval> trace;
    double inside = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!A[q.chain[i]]) continue;
      inside += X.weight(q.chain[i]);
      const double lo = i == 0 ? q.params[0] : 0.5 * (q.params[i - 1] + q.params[i]);
      const double hi = i + 1 == k ? q.params[k - 1] : 0.5 * (q.params[i] + q.params[i + 1]);
      trace.push_back({lo, hi});
    }
    const double vq = inside / q.quotient_weight;
    report.needle_content += q.quotient_weight * minkowski_content(*q.density, IntervalSet(std::move(trace)));
    const double length = q.params.back() - q.params.front();
    if (vq > 0.0 && vq < 1.0 && length > 0.0)
      report.model_bound += q.quotient_weight * model_profile_value(K, N, length, vq);
  }
  report.consistent = report.model_bound <= report.measured + report.slack;
  return report;
}

RigidityReport rigidity_cap_check(const FiniteMMS& S, double v, double eps, const SlackModel& slack) {
  const MmsMetadata& meta = S.metadata();
  if (meta.kind != "suspension" || meta.heights.size() != S.size())
    throw DomainError("rigidity_cap_check: space is not a generated suspension");
  if (!(v > 0.0 && v < 1.0)) throw DomainError("rigidity_cap_check: v must lie in (0, 1)");
  const std::size_t n = S.size();
  const double N = meta.N;

  RigidityReport report;
  report.v = v;
  report.N = N;
  report.eps = eps > 0.0 ? eps : 2.0 * S.resolution();
  report.tolerance = slack(report.eps, S.resolution());
  const Density1D profile = Density1D::from_function(
      "sin_power", [N](double t) { return std::pow(std::max(0.0, std::sin(t)), N - 1.0); }, 0.0, std::numbers::pi);
  report.r_v = profile.quantile(v);
  report.model = model_profile_value(N - 1.0, N, std::numeric_limits<double>::infinity(), v);

  const auto& t = meta.heights;
  Subset cap(n, 0);
  for (std::size_t i = 0; i < n; ++i) cap[i] = t[i] <= report.r_v + 1e-12;
  report.cap_mass = measure(S, cap);
  report.cap_content = minkowski_discrete(S, cap, report.eps);
  report.cap_matches_model = std::abs(report.cap_content - report.model) <= report.tolerance;

  auto add = [&](std::string label, const Subset& A) {
    Competitor c{std::move(label), measure(S, A), minkowski_discrete(S, A, report.eps), 0.0};
    c.margin = c.content - report.cap_content;
    report.competitors.push_back(std::move(c));
  };

  // Caps around points away from the poles.
  std::vector<double> rows(t);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  for (double target : {std::numbers::pi / 4, std::numbers::pi / 2}) {
    const auto it = std::min_element(rows.begin(), rows.end(),
                                     [&](double a, double b) { return std::abs(a - target) < std::abs(b - target); });
    for (std::size_t i = 0; i < n; ++i)
      if (t[i] == *it) {
        char label[64];
        std::snprintf(label, sizeof label, "tilted_cap@t=%.4f", *it);
        add(label, ball_of_mass(S, i, v));
        break;
      }
  }

  // Two polar caps of mass v/2 each, and a band around the equator of mass v.
  std::vector<double> two_sided(n), equatorial(n);
  for (std::size_t i = 0; i < n; ++i) {
    two_sided[i] = profile.cdf(t[i]) <= 0.5 ? profile.cdf(t[i]) : 1.0 - profile.cdf(t[i]);
    equatorial[i] = std::abs(profile.cdf(t[i]) - 0.5);
  }
  add("polar_bands", prefix_of_mass(S, two_sided, v));
  add("equatorial_band", prefix_of_mass(S, equatorial, v));

  // Split cap: deeper over half of the base, shallower over the other half,
  // each side moved by the same number of height rows.
  int max_base = -1;
  for (int b : meta.base_index) max_base = std::max(max_base, b);
  if (max_base >= 1) {
    const auto cut = std::upper_bound(rows.begin(), rows.end(), report.r_v + 1e-12);
    const auto last = static_cast<std::ptrdiff_t>(cut - rows.begin()) - 1;  // deepest row in the cap
    const std::ptrdiff_t shift = std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(rows.size()) / 20);
    const std::ptrdiff_t hi_row = std::min<std::ptrdiff_t>(last + shift, static_cast<std::ptrdiff_t>(rows.size()) - 1);
    const std::ptrdiff_t lo_row = std::max<std::ptrdiff_t>(last - shift, 0);
    Subset split(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int b = meta.base_index[i];
      const double limit = (b >= 0 && 2 * b <= max_base) ? rows[static_cast<std::size_t>(hi_row)]
                                                        : rows[static_cast<std::size_t>(lo_row)];
      split[i] = b < 0 ? t[i] < 1.0 : t[i] <= limit + 1e-12;
    }
    add("split_cap", split);
  }

  for (const auto& c : report.competitors)
    report.competitors_above = report.competitors_above && c.margin >= -report.tolerance;
  return report;
}

DiameterGap diameter_gap(double N, double delta, double D, double v) {
  if (!(D > 0.0 && D < std::numbers::pi)) throw DomainError("diameter_gap: D must lie in (0, pi)");
  if (!(N > 1.0) || !(delta >= 0.0 && delta <= 0.5 * (N - 1.0)))
    throw DomainError("diameter_gap: need N > 1 and 0 <= delta <= (N-1)/2");
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("diameter_gap: v must lie in [0, 1]");
  const double K = N - 1.0 - delta, n_eff = N + delta;
  DiameterGap gap;
  gap.bounded = model_profile_value(K, n_eff, D, v);
  gap.unbounded = model_profile_value(K, n_eff, std::numeric_limits<double>::infinity(), v);
  gap.eta = gap.bounded - gap.unbounded;
  gap.positive = gap.eta > 0.0;
  return gap;
}

DeltaContinuity profile_continuity_in_delta(double N, double v, const std::vector<double>& delta_grid,
                                            unsigned threads) {
  DeltaContinuity out;
  out.delta = delta_grid;
  out.value.resize(delta_grid.size());
  for (double d : delta_grid)
    if (!(d >= 0.0 && d <= 0.5 * (N - 1.0))) throw DomainError("profile_continuity_in_delta: delta out of range");
  parallel_for(delta_grid.size(), threads, [&](std::size_t i) {
    const double d = delta_grid[i];
    out.value[i] = model_profile_value(N - 1.0 - d, N + d, std::numeric_limits<double>::infinity(), v);
  });
  for (std::size_t i = 1; i < delta_grid.size(); ++i) {
    const double jump = std::abs(out.value[i] - out.value[i - 1]);
    out.max_jump = std::max(out.max_jump, jump);
    const double step = std::abs(delta_grid[i] - delta_grid[i - 1]);
    if (step > 0.0) out.fitted_constant = std::max(out.fitted_constant, jump / step);
  }
  return out;
}

}  // namespace cdiso
