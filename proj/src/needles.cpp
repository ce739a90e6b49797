#include "cdiso/needles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cdiso/coeffs.hpp"
#include "cdiso/numeric.hpp"

namespace cdiso {

std::size_t TransportStructure::pair_count() const {
  std::size_t count = 0;
  for (const auto& s : successors) count += s.size();
  return count;
}

double TransportStructure::gap(const FiniteMMS& X, std::size_t x, std::size_t y) const {
  return X.dist(x, y) - (phi[x] - phi[y]);
}

double default_tol_sat(const FiniteMMS& X) { return 10.0 * 1e-8 * X.diameter(); }

namespace {

// Some neighbour is off the ray towards the farthest neighbour.
bool branches(const TransportStructure& S, const FiniteMMS& X, std::size_t x,
              const std::vector<std::uint32_t>& neighbours) {
  if (neighbours.size() < 2) return false;
  std::size_t far = neighbours.front();
  for (auto y : neighbours)
    if (X.dist(x, y) > X.dist(x, far)) far = y;
  const double limit = 3.0 * S.tol_sat;
  for (auto y : neighbours)
    if (y != far && std::min(S.gap(X, y, far), S.gap(X, far, y)) > limit) return true;
  return false;
}

}  // namespace

TransportStructure build_structure(const FiniteMMS& X, const Eigen::VectorXd& phi, double tol_sat) {
  const std::size_t n = X.size();
  if (static_cast<std::size_t>(phi.size()) != n) throw DomainError("build_structure: potential size does not match");
  TransportStructure S;
  S.tol_sat = tol_sat < 0.0 ? default_tol_sat(X) : tol_sat;
  S.phi.assign(phi.data(), phi.data() + n);
  S.successors.assign(n, {});
  S.predecessors.assign(n, {});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y || X.dist(x, y) <= S.tol_sat) continue;
      if (S.gap(X, x, y) <= S.tol_sat) {
        S.successors[x].push_back(static_cast<std::uint32_t>(y));
        S.predecessors[y].push_back(static_cast<std::uint32_t>(x));
      }
    }

  S.initial.assign(n, 0);
  S.final.assign(n, 0);
  S.transport_set_e.assign(n, 0);
  S.branch_forward.assign(n, 0);
  S.branch_backward.assign(n, 0);
  S.transport_set.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    const bool has_out = !S.successors[x].empty(), has_in = !S.predecessors[x].empty();
    if (!has_out && !has_in) continue;
    S.transport_set_e[x] = 1;
    S.initial[x] = !has_in;
    S.final[x] = !has_out;
    S.branch_forward[x] = branches(S, X, x, S.successors[x]);
    S.branch_backward[x] = branches(S, X, x, S.predecessors[x]);
    S.transport_set[x] = !S.branch_forward[x] && !S.branch_backward[x];
  }
  return S;
}

namespace {

Density1D chain_density(const FiniteMMS& X, const std::vector<std::size_t>& chain, const std::vector<double>& t,
                        std::size_t min_cells) {
  // Merge points at the same parameter so that every cell has positive length.
  const double L = t.back() - t.front();
  std::vector<double> pos, mass;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!pos.empty() && t[i] - pos.back() <= 1e-12 * L) {
      mass.back() += X.weight(chain[i]);
      continue;
    }
    pos.push_back(t[i]);
    mass.push_back(X.weight(chain[i]));
  }
  const std::size_t k = pos.size();
  std::vector<double> average(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double lo = i == 0 ? pos[0] : 0.5 * (pos[i - 1] + pos[i]);
    const double hi = i + 1 == k ? pos[k - 1] : 0.5 * (pos[i] + pos[i + 1]);
    average[i] = mass[i] / (hi - lo);
  }
  const std::size_t cells = std::max(min_cells, 4 * k);
  std::vector<double> values(cells + 1);
  std::size_t seg = 0;
  for (std::size_t j = 0; j <= cells; ++j) {
    const double s = pos[0] + L * static_cast<double>(j) / static_cast<double>(cells);
    while (seg + 2 < k && s > pos[seg + 1]) ++seg;
    const double u = std::clamp((s - pos[seg]) / (pos[seg + 1] - pos[seg]), 0.0, 1.0);
    values[j] = (1.0 - u) * average[seg] + u * average[seg + 1];
  }
  return Density1D::from_samples(0.0, L, std::move(values));
}

}  // namespace

NeedleDecomposition extract_needles(const TransportStructure& S, const FiniteMMS& X, const NeedleOptions& options) {
  const std::size_t n = X.size();
  NeedleDecomposition out;
  out.tol_iso = options.tol_iso < 0.0 ? 10.0 * S.tol_sat : options.tol_iso;

  std::vector<std::size_t> order;
  for (std::size_t x = 0; x < n; ++x)
    if (S.transport_set[x]) order.push_back(x);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return S.phi[a] > S.phi[b]; });

  std::vector<std::uint8_t> done(n, 0);
  auto open = [&](std::size_t y) { return S.transport_set[y] && !done[y]; };
  const double closure = 2.0 * S.tol_sat;

  for (std::size_t seed : order) {
    if (done[seed]) continue;
    std::vector<std::size_t> members{seed};
    std::size_t end = seed;
    while (true) {
      std::size_t next = n;
      double best = -1.0;
      for (auto y : S.successors[end])
        if (open(y) && y != seed && X.dist(end, y) > best) {
          best = X.dist(end, y);
          next = y;
        }
      if (next == n) break;
      members.push_back(next);
      done[next] = 1;
      end = next;
    }
    done[seed] = 1;
    if (end != seed) {
      for (auto z : order)
        if (!done[z] && S.gap(X, seed, z) <= closure && S.gap(X, z, end) <= closure) {
          members.push_back(z);
          done[z] = 1;
        }
    }
    std::stable_sort(members.begin(), members.end(), [&](auto a, auto b) { return S.phi[a] > S.phi[b]; });

    Needle needle;
    needle.chain = members;
    for (auto c : members) {
      needle.params.push_back(X.dist(members.front(), c));
      needle.quotient_weight += X.weight(c);
    }
    // phi order and distance order can disagree within tolerance; keep t sorted.
    std::vector<std::size_t> idx(members.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return needle.params[a] < needle.params[b]; });
    std::vector<std::size_t> chain(members.size());
    std::vector<double> params(members.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      chain[i] = members[idx[i]];
      params[i] = needle.params[idx[i]];
    }
    needle.chain = std::move(chain);
    needle.params = std::move(params);

    for (std::size_t i = 0; i < needle.chain.size(); ++i) {
      needle.affinity_defect = std::max(
          needle.affinity_defect, std::abs(S.phi[needle.chain[0]] - needle.params[i] - S.phi[needle.chain[i]]));
      for (std::size_t j = i + 1; j < needle.chain.size(); ++j)
        needle.isometry_defect =
            std::max(needle.isometry_defect,
                     std::abs(X.dist(needle.chain[i], needle.chain[j]) - (needle.params[j] - needle.params[i])));
    }
    if (options.throw_on_isometry && needle.isometry_defect > out.tol_iso)
      throw DomainError("extract_needles: chain isometry defect " + std::to_string(needle.isometry_defect) +
                        " exceeds tol_iso " + std::to_string(out.tol_iso) + "; branching leaks into chains");
    if (needle.chain.size() > 1 && needle.quotient_weight > 0.0)
      needle.density = chain_density(X, needle.chain, needle.params, options.min_grid_cells);
    out.needle_mass += needle.quotient_weight;
    out.needles.push_back(std::move(needle));
  }

  for (std::size_t x = 0; x < n; ++x) {
    if (S.transport_set_e[x] && !S.transport_set[x]) out.branch_mass += X.weight(x);
    if (!S.transport_set[x]) {
      out.off_transport.push_back(x);
      out.off_transport_mass += X.weight(x);
    }
  }
  return out;
}

namespace {

// Ratio bounds between h(t1)/h(t0) for interior nodes, on a subgrid of at most 33 nodes.
void check_mcp(const Density1D& h, double K, double N, double tol, NeedleCheck& check) {
  if (N <= 1.0) return;
  const double delta = K / (N - 1.0);
  const double a = h.lower(), b = h.upper();
  if (delta > 0.0 && std::sqrt(delta) * (b - a) >= M_PI) return;
  const std::size_t cells = h.cells();
  const std::size_t stride = std::max<std::size_t>(1, cells / 32);
  std::vector<double> nodes;
  for (std::size_t j = stride; j < cells; j += stride) nodes.push_back(h.grid()[j]);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t0 = nodes[i], h0 = h(t0);
    if (h0 <= 0.0) continue;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double t1 = nodes[j];
      const double ratio = h(t1) / h0;
      const double lower = std::pow(s_delta(b - t1, delta) / s_delta(b - t0, delta), N - 1.0);
      const double upper = std::pow(s_delta(t1 - a, delta) / s_delta(t0 - a, delta), N - 1.0);
      const double excess = std::max(lower - ratio, ratio - upper) / std::max(ratio, lower);
      check.mcp_worst = std::max(check.mcp_worst, excess);
      if (excess > tol) ++check.mcp_violations;
    }
  }
}

}  // namespace

NeedleReport check_needles(const NeedleDecomposition& D, const FiniteMMS& X, const Eigen::VectorXd& f, double K,
                           double N, double tol, const NeedleCheckOptions& options) {
  if (static_cast<std::size_t>(f.size()) != X.size()) throw DomainError("check_needles: f size does not match");
  NeedleReport report;
  report.per_needle.resize(D.needles.size());
  parallel_for(D.needles.size(), options.threads, [&](std::size_t q) {
    const Needle& needle = D.needles[q];
    NeedleCheck& check = report.per_needle[q];
    double integral = 0.0;
    for (auto c : needle.chain) integral += f(static_cast<Eigen::Index>(c)) * X.weight(c);
    if (needle.quotient_weight > 0.0) check.zero_mean_defect = std::abs(integral) / needle.quotient_weight;
    if (!needle.density) return;
    const CdCheck cd = check_cd(*needle.density, K, N, tol);
    check.cd_pass = cd.pass;
    if (cd.worst) check.cd_violation = std::max(0.0, cd.worst->violation);
    check_mcp(*needle.density, K, N, tol, check);
  });

  for (std::size_t q = 0; q < D.needles.size(); ++q) {
    const NeedleCheck& c = report.per_needle[q];
    const double w = D.needles[q].quotient_weight;
    report.total_mass += w;
    if (c.cd_pass && c.zero_mean_defect <= options.zero_mean_threshold) report.good_mass += w;
    report.worst_zero_mean = std::max(report.worst_zero_mean, c.zero_mean_defect);
    report.worst_cd = std::max(report.worst_cd, c.cd_violation);
    report.cd_failures += c.cd_pass ? 0 : 1;
    report.mcp_violations += c.mcp_violations;
  }
  report.good_fraction = report.total_mass > 0.0 ? report.good_mass / report.total_mass : 1.0;
  for (auto z : D.off_transport) report.off_transport_f_mass += std::abs(f(static_cast<Eigen::Index>(z))) * X.weight(z);
  return report;
}

MonotoneReport check_d2_monotone(const TransportStructure& S, const FiniteMMS& X, std::size_t samples,
                                 std::size_t max_size, std::uint64_t seed, double threshold) {
  MonotoneReport report;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t x = 0; x < S.successors.size(); ++x)
    for (auto y : S.successors[x]) pairs.emplace_back(static_cast<std::uint32_t>(x), y);
  if (pairs.empty() || max_size == 0) return report;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::uniform_int_distribution<std::size_t> size(1, max_size);
  auto agree = [&](const auto& p, const auto& q) {
    return (S.phi[q.second] - S.phi[p.second]) * (S.phi[q.first] - S.phi[p.first]) >= 0.0;
  };
  auto d2 = [&](std::size_t a, std::size_t b) { return X.dist(a, b) * X.dist(a, b); };

  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t k = size(rng);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> tuple{pairs[pick(rng)]};
    for (int attempt = 0; tuple.size() < k && attempt < 200; ++attempt) {
      const auto candidate = pairs[pick(rng)];
      if (std::all_of(tuple.begin(), tuple.end(), [&](const auto& p) { return agree(p, candidate); }))
        tuple.push_back(candidate);
    }
    ++report.tuples;
    double lhs = 0.0;
    for (const auto& [x, y] : tuple) lhs += d2(x, y);
    bool violated = false;
    for (std::size_t shift = 1; shift < tuple.size(); ++shift) {
      double rhs = 0.0;
      for (std::size_t i = 0; i < tuple.size(); ++i) rhs += d2(tuple[i].first, tuple[(i + shift) % tuple.size()].second);
      report.worst_excess = std::max(report.worst_excess, lhs - rhs);
      violated = violated || lhs - rhs > threshold;
    }
    report.violations += violated ? 1 : 0;
  }
  return report;
}

double great_circle_deviation(const FiniteMMS& X, const Needle& needle) {
  if (needle.chain.size() <= 2) return 0.0;
  if (X.labels().cols() != 3) throw DomainError("great_circle_deviation: needs 3-D labels");
  Eigen::MatrixXd P(static_cast<Eigen::Index>(needle.chain.size()), 3);
  for (std::size_t i = 0; i < needle.chain.size(); ++i)
    P.row(static_cast<Eigen::Index>(i)) = X.labels().row(static_cast<Eigen::Index>(needle.chain[i])).normalized();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(P.transpose() * P);
  const Eigen::Vector3d normal = eig.eigenvectors().col(0);
  return (P * normal).cwiseAbs().array().min(1.0).asin().maxCoeff();
}

}  // namespace cdiso
