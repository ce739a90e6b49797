#include "cdiso/iso1d.hpp"

#include <cmath>
#include <limits>

#include "cdiso/coeffs.hpp"
#include "cdiso/numeric.hpp"

namespace cdiso {

std::string to_string(IsoMethod m) {
  switch (m) {
    case IsoMethod::halfline_left: return "halfline_left";
    case IsoMethod::halfline_right: return "halfline_right";
    case IsoMethod::interior_interval: return "interior_interval";
    case IsoMethod::complement: return "complement";
    case IsoMethod::bruteforce: return "bruteforce";
  }
  return "unknown";
}

namespace {

void check_volume(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("iso1d: v must lie in [0,1]");
}

IsoResult trivial(const Density1D& d, double v, IsoMethod method) {
  IsoResult r;
  r.v = v;
  r.value = 0.0;
  r.method = method;
  if (v >= 1.0) r.minimizer = IntervalSet::single(d.lower(), d.upper());
  return r;
}

// Boundary density of one endpoint, zero on the edges of [a, b].
double edge_aware(const Density1D& d, double x) {
  const double tol = 1e-9 * d.length();
  if (x <= d.lower() + tol || x >= d.upper() - tol) return 0.0;
  return d(x);
}

}  // namespace

IsoResult profile_structured(const Density1D& d, double v) {
  check_volume(v);
  if (v == 0.0 || v == 1.0) return trivial(d, v, IsoMethod::halfline_left);

  const double a = d.lower(), b = d.upper();
  IsoResult best;
  best.v = v;
  best.value = std::numeric_limits<double>::infinity();
  auto offer = [&](IntervalSet set, IsoMethod method) {
    const double value = minkowski_content(d, set);
    if (value < best.value) {
      best.value = value;
      best.minimizer = std::move(set);
      best.method = method;
    }
  };

  offer(IntervalSet::single(a, d.quantile(v)), IsoMethod::halfline_left);
  offer(IntervalSet::single(d.quantile_upper(1.0 - v), b), IsoMethod::halfline_right);

  // [l, r] with mass v.
  {
    const double l_max = d.quantile_upper(1.0 - v);
    auto right_end = [&](double l) { return d.quantile(std::min(1.0, d.cdf(l) + v)); };
    auto cost = [&](double l) { return edge_aware(d, l) + edge_aware(d, right_end(l)); };
    const ScalarMin m = scan_then_golden(cost, a, l_max);
    offer(IntervalSet::single(m.x, right_end(m.x)), IsoMethod::interior_interval);
  }

  // [a, l] U [r, b] with F(r) - F(l) = 1 - v.
  {
    const double l_max = d.quantile_upper(v);
    auto right_start = [&](double l) { return d.quantile(std::min(1.0, d.cdf(l) + 1.0 - v)); };
    auto cost = [&](double l) { return edge_aware(d, l) + edge_aware(d, right_start(l)); };
    const ScalarMin m = scan_then_golden(cost, a, l_max);
    const double r = right_start(m.x);
    offer(IntervalSet({{a, m.x}, {r, b}}), IsoMethod::complement);
  }
  return best;
}

BruteForceResult profile_bruteforce(const Density1D& d, double v, const BruteForceOptions& options) {
  check_volume(v);
  if (options.k_max < 1 || options.k_max > 2) throw DomainError("profile_bruteforce: k_max must be 1 or 2");
  if (options.grid_nodes < 3) throw DomainError("profile_bruteforce: need at least 3 grid nodes");

  const std::size_t n = options.grid_nodes;
  const auto g = linspace(d.lower(), d.upper(), n);
  const double spacing = g[1] - g[0];

  BruteForceResult out;
  out.tolerance = 2.0 * spacing * d.lipschitz_estimate();
  if (v == 0.0 || v == 1.0) {
    out.best = trivial(d, v, IsoMethod::bruteforce);
    return out;
  }

  const double nn = static_cast<double>(n);
  const double planned = 2.0 * nn + (options.k_max == 2 ? 4.0 * nn * nn * nn / 6.0 : 0.0);
  if (planned > static_cast<double>(options.budget))
    throw ResourceError("profile_bruteforce: enumeration of ~" + std::to_string(static_cast<long long>(planned)) +
                        " candidates exceeds budget " + std::to_string(options.budget));

  std::vector<double> F(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    F[i] = d.cdf(g[i]);
    h[i] = edge_aware(d, g[i]);
  }
  const double mass_tol = 1e-12;

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<Interval> best_set;
  auto consider = [&](std::vector<Interval> comps) {
    ++out.enumerated;
    double value = 0.0;
    for (const auto& c : comps) value += edge_aware(d, c.lo) + edge_aware(d, c.hi);
    if (value < best_value) {
      best_value = value;
      best_set = std::move(comps);
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (F[i] + v <= 1.0 + mass_tol) consider({{g[i], d.quantile(std::min(1.0, F[i] + v))}});
    if (F[i] - v >= -mass_tol) consider({{d.quantile_upper(std::max(0.0, F[i] - v)), g[i]}});
  }

  if (options.k_max == 2) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double m1 = F[q] - F[p];
        if (m1 > v) break;
        for (std::size_t r = q + 1; r < n; ++r) {
          // free right end of the second component
          const double target = F[r] + (v - m1);
          if (target <= 1.0 + mass_tol) {
            const double s = d.quantile(std::min(1.0, target));
            if (s > g[r]) consider({{g[p], g[q]}, {g[r], s}});
          }
          // free left end of the second component, r now plays the right end
          const double start = F[r] - (v - m1);
          if (start >= F[q] - mass_tol) {
            const double l = d.quantile_upper(std::max(0.0, start));
            if (l > g[q] && l < g[r]) consider({{g[p], g[q]}, {l, g[r]}});
          }
        }
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t s = r + 1; s < n; ++s) {
        const double m2 = F[s] - F[r];
        if (m2 > v) break;
        for (std::size_t p = 0; p < r; ++p) {
          // free right end of the first component
          const double target = F[p] + (v - m2);
          if (target <= F[r] + mass_tol) {
            const double q = d.quantile(std::min(1.0, target));
            if (q > g[p] && q < g[r]) consider({{g[p], q}, {g[r], g[s]}});
          }
          // free left end of the first component, p now plays the right end
          const double start = F[p] - (v - m2);
          if (start >= -mass_tol) {
            const double l = d.quantile_upper(std::max(0.0, start));
            if (l < g[p]) consider({{l, g[p]}, {g[r], g[s]}});
          }
        }
      }
    }
  }

  if (best_set.empty()) throw DomainError("profile_bruteforce: no feasible candidate");
  out.best.v = v;
  out.best.minimizer = IntervalSet(best_set);
  out.best.value = minkowski_content(d, out.best.minimizer);
  out.best.method = IsoMethod::bruteforce;
  return out;
}

}  // namespace cdiso
