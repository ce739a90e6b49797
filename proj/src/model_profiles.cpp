#include "cdiso/model_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "cdiso/iso1d.hpp"
#include "cdiso/numeric.hpp"

namespace cdiso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sinh(double x) {
  if (!(x > 0.0)) return -kInf;
  return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Density proportional to exp(logh) on [lo, hi], rescaled by its sampled maximum.
Density1D log_density(std::string name, std::function<double(double)> logh, double lo, double hi,
                      std::size_t cells) {
  double ref = -kInf;
  for (double t : linspace(lo, hi, 129)) {
    const double l = logh(t);
    if (std::isfinite(l)) ref = std::max(ref, l);
  }
  if (!std::isfinite(ref)) throw DomainError("window density: vanishes on the whole window");
  auto f = [logh = std::move(logh), ref](double t) {
    const double l = logh(t);
    return l == -kInf ? 0.0 : std::exp(l - ref);
  };
  return Density1D::from_function(std::move(name), f, lo, hi, cells);
}

Density1D flat_density(double lo, double hi, std::size_t cells) {
  return Density1D::from_function("flat", [](double) { return 1.0; }, lo, hi, cells);
}

void check_volume(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("model profile: v must lie in [0,1]");
}

// log(c_delta(t) + beta s_delta(t)) inside the support, -inf outside.
// Constants are fixed at construction; the call is on the quadrature hot path.
class LogJacobianBase {
 public:
  LogJacobianBase(double H, double K, double N)
      : supp_(jacobian_support(H, K, N)), beta_(H / (N - 1.0)), delta_(K / (N - 1.0)) {
    if (delta_ != 0.0) {
      r_ = std::sqrt(std::abs(delta_));
      b_ = beta_ / r_;
      phi_ = std::atan(b_);
      amp_ = 0.5 * std::log1p(b_ * b_);
    }
  }

  double operator()(double t) const {
    if (!(t > supp_.lo && t < supp_.hi)) return -kInf;
    if (delta_ > 0.0) {
      const double c = std::cos(r_ * t - phi_);
      return c > 0.0 ? amp_ + std::log(c) : -kInf;
    }
    if (delta_ == 0.0) {
      const double f = 1.0 + beta_ * t;
      return f > 0.0 ? std::log(f) : -kInf;
    }
    // cosh(rt) + b sinh(rt) = e^{r|t|}/2 * [(1 +- b) + (1 -+ b) e^{-2r|t|}]
    const double x = r_ * std::abs(t);
    const double sign = t >= 0.0 ? 1.0 : -1.0;
    const double bracket = (1.0 + sign * b_) + (1.0 - sign * b_) * std::exp(-2.0 * x);
    return bracket > 0.0 ? x - std::numbers::ln2 + std::log(bracket) : -kInf;
  }

 private:
  Interval supp_;
  double beta_, delta_;
  double r_ = 0.0, b_ = 0.0, phi_ = 0.0, amp_ = 0.0;
};

struct Best {
  double value = kInf;
  std::string argmin;
  void offer(double v, std::string arg) {
    if (v < value) {
      value = v;
      argmin = std::move(arg);
    }
  }
};

double inner_profile(const Density1D& d, double v) { return profile_structured(d, v).value; }

// Infimum over xi in [lo, hi] of f, searched in u = log1p((xi - lo)/scale).
struct OuterResult {
  double xi = 0.0;
  double value = kInf;
  bool tail_flat = true;
};

OuterResult outer_log(const std::function<double(double)>& f, double lo, double hi, double scale,
                      const ModelOptions& options) {
  auto xi_of = [&](double u) { return lo + scale * std::expm1(u); };
  const double u_max = std::log1p((hi - lo) / scale);
  const ScalarMin m = scan_then_golden([&](double u) { return f(xi_of(u)); }, 0.0, u_max,
                                       options.outer_samples, options.golden_iterations);
  OuterResult out{xi_of(m.x), m.value, true};
  const double far = f(hi);
  const double decade = f(lo + (hi - lo) / 10.0);
  out.tail_flat = std::abs(far - decade) < 1e-8;
  return out;
}

OuterResult outer_linear(const std::function<double(double)>& f, double lo, double hi,
                         const ModelOptions& options) {
  if (!(hi > lo)) return {lo, f(lo), true};
  const ScalarMin m = scan_then_golden(f, lo, hi, options.outer_samples, options.golden_iterations);
  return {m.x, m.value, true};
}

ProfileCase classify(const ProfileParams& p) {
  if (p.K <= 0.0 && std::isinf(p.D)) return ProfileCase::trivial;
  if (p.K > 0.0 && p.N == 1.0) return ProfileCase::degenerate;
  if (p.K > 0.0) return p.D < bonnet_myers_diameter(p.K, p.N) ? ProfileCase::case1 : ProfileCase::case2;
  return p.K == 0.0 ? ProfileCase::case3 : ProfileCase::case4;
}

double default_xi_max(double K) { return 50.0 / std::sqrt(std::abs(K) + 1.0); }

}  // namespace

Interval jacobian_support(double H, double K, double N) {
  if (!(N >= 1.0)) throw DomainError("jacobian: N must be >= 1");
  if (N == 1.0) {
    if (K > 0.0) return {0.0, 0.0};
    if (H > 0.0) return {0.0, kInf};
    if (H < 0.0) return {-kInf, 0.0};
    return {-kInf, kInf};
  }
  const double beta = H / (N - 1.0);
  const double delta = K / (N - 1.0);
  if (delta > 0.0) {
    const double r = std::sqrt(delta);
    const double phi = std::atan(beta / r);
    return {(phi - std::numbers::pi / 2.0) / r, (phi + std::numbers::pi / 2.0) / r};
  }
  if (delta == 0.0) {
    if (beta > 0.0) return {-1.0 / beta, kInf};
    if (beta < 0.0) return {-kInf, -1.0 / beta};
    return {-kInf, kInf};
  }
  const double r = std::sqrt(-delta);
  const double b = beta / r;
  if (b > 1.0) return {std::atanh(-1.0 / b) / r, kInf};
  if (b < -1.0) return {-kInf, std::atanh(-1.0 / b) / r};
  return {-kInf, kInf};
}

double jacobian_density(const ModelDensitySpec& spec, double t) {
  if (!(spec.N >= 1.0) || !std::isfinite(spec.N)) throw DomainError("jacobian: N must be a finite real >= 1");
  if (std::isfinite(spec.D) && (t < -spec.a || t > spec.D - spec.a)) return 0.0;
  if (spec.N == 1.0) {
    if (spec.K > 0.0) return t == 0.0 ? 1.0 : 0.0;
    return spec.H * t >= 0.0 ? 1.0 : 0.0;
  }
  const Interval supp = jacobian_support(spec.H, spec.K, spec.N);
  if (!(t > supp.lo && t < supp.hi)) return 0.0;
  const double delta = spec.K / (spec.N - 1.0);
  const double f = c_delta(t, delta) + spec.H / (spec.N - 1.0) * s_delta(t, delta);
  return std::pow(std::max(f, 0.0), spec.N - 1.0);
}

std::string to_string(WindowKind k) {
  switch (k) {
    case WindowKind::sin_power: return "sin_power";
    case WindowKind::t_power: return "t_power";
    case WindowKind::sinh_power: return "sinh_power";
    case WindowKind::cosh_power: return "cosh_power";
    case WindowKind::exp: return "exp";
    case WindowKind::flat: return "flat";
  }
  return "unknown";
}

std::string to_string(ProfileCase c) {
  switch (c) {
    case ProfileCase::case1: return "case1";
    case ProfileCase::case2: return "case2";
    case ProfileCase::case3: return "case3";
    case ProfileCase::case4: return "case4";
    case ProfileCase::trivial: return "trivial";
    case ProfileCase::degenerate: return "degenerate";
  }
  return "unknown";
}

Density1D window_density(WindowKind kind, double K, double N, double lo, double hi, std::size_t cells) {
  if (!(N >= 1.0) || !std::isfinite(N)) throw DomainError("window density: N must be a finite real >= 1");
  if (!(hi > lo)) throw DomainError("window density: empty window");
  if (kind == WindowKind::flat || N == 1.0) return flat_density(lo, hi, cells);
  const double m = N - 1.0;
  switch (kind) {
    case WindowKind::sin_power: {
      if (!(K > 0.0)) throw DomainError("sin_power window needs K > 0");
      const double r = std::sqrt(K / m);
      return log_density("sin_power", [=](double t) {
        const double s = std::sin(r * t);
        return s > 0.0 && r * t < std::numbers::pi ? m * std::log(s) : -kInf;
      }, lo, hi, cells);
    }
    case WindowKind::t_power:
      if (lo < 0.0) throw DomainError("t_power window must lie in [0, inf)");
      return log_density("t_power", [=](double t) { return t > 0.0 ? m * std::log(t) : -kInf; }, lo, hi, cells);
    case WindowKind::sinh_power: {
      if (!(K < 0.0)) throw DomainError("sinh_power window needs K < 0");
      if (lo < 0.0) throw DomainError("sinh_power window must lie in [0, inf)");
      const double r = std::sqrt(-K / m);
      return log_density("sinh_power", [=](double t) { return m * log_sinh(r * t); }, lo, hi, cells);
    }
    case WindowKind::cosh_power: {
      if (!(K < 0.0)) throw DomainError("cosh_power window needs K < 0");
      const double r = std::sqrt(-K / m);
      return log_density("cosh_power", [=](double t) { return m * log_cosh(r * t); }, lo, hi, cells);
    }
    case WindowKind::exp: {
      if (!(K < 0.0)) throw DomainError("exp window needs K < 0");
      const double c = std::sqrt(-K * m);
      return log_density("exp", [=](double t) { return c * t; }, lo, hi, cells);
    }
    case WindowKind::flat: break;
  }
  return flat_density(lo, hi, cells);
}

Density1D jacobian_window(const ModelDensitySpec& spec, std::size_t cells) {
  if (!std::isfinite(spec.D) || !(spec.D > 0.0)) throw DomainError("jacobian window: D must be finite and positive");
  if (!(spec.a >= 0.0 && spec.a <= spec.D)) throw DomainError("jacobian window: a must lie in [0, D]");
  if (spec.N == 1.0 && spec.K > 0.0) throw DomainError("jacobian window: N = 1, K > 0 is a point mass");
  const Interval supp = jacobian_support(spec.H, spec.K, spec.N);
  const double lo = std::max(-spec.a, supp.lo);
  const double hi = std::min(spec.D - spec.a, supp.hi);
  if (!(hi > lo)) throw DomainError("jacobian window: empty intersection with the support");
  if (spec.N == 1.0) return flat_density(lo, hi, cells);
  const double m = spec.N - 1.0;
  const LogJacobianBase base(spec.H, spec.K, spec.N);
  return log_density("jacobian", [=](double t) { return m * base(t); }, lo, hi, cells);
}

ModelProfileResult model_profile(const ProfileParams& params, double v, const ModelOptions& options) {
  params.validate();
  check_volume(v);
  const double K = params.K, N = params.N, D = params.D;
  ModelProfileResult out;
  out.which = classify(params);

  if (out.which == ProfileCase::trivial) {
    out.argmin = "trivial";
    return out;
  }
  if (out.which == ProfileCase::degenerate) {
    // A single point: no set has volume strictly between 0 and 1.
    out.value = (v == 0.0 || v == 1.0) ? 0.0 : kInf;
    out.argmin = "point";
    return out;
  }
  if (v == 0.0 || v == 1.0) {
    out.argmin = "endpoint";
    return out;
  }

  const std::size_t cells = options.cells;
  const double xi_max = options.xi_max > 0.0 ? options.xi_max : default_xi_max(K);
  Best best;

  switch (out.which) {
    case ProfileCase::case1: {
      // Windows [xi, xi+D] and their mirror images have equal profiles.
      const double cap = bonnet_myers_diameter(K, N);
      auto f = [&](double xi) {
        return inner_profile(window_density(WindowKind::sin_power, K, N, xi, xi + D, cells), v);
      };
      const OuterResult r = outer_linear(f, 0.0, 0.5 * (cap - D), options);
      best.offer(r.value, "family=sin_power;xi=" + format_double(r.xi));
      break;
    }
    case ProfileCase::case2: {
      const double cap = bonnet_myers_diameter(K, N);
      best.offer(inner_profile(window_density(WindowKind::sin_power, K, N, 0.0, cap, cells), v),
                 "family=sin_power;xi=0");
      break;
    }
    case ProfileCase::case3: {
      best.offer(inner_profile(flat_density(0.0, D, cells), v), "family=flat");
      if (N > 1.0) {
        auto f = [&](double xi) {
          return inner_profile(window_density(WindowKind::t_power, K, N, xi, xi + D, cells), v);
        };
        const OuterResult r = outer_log(f, 0.0, xi_max, D, options);
        out.tail_flat = r.tail_flat;
        best.offer(r.value, "family=t_power;xi=" + format_double(r.xi));
      }
      break;
    }
    case ProfileCase::case4: {
      if (N == 1.0) {
        best.offer(inner_profile(flat_density(0.0, D, cells), v), "family=flat");
        break;
      }
      auto sinh_f = [&](double xi) {
        return inner_profile(window_density(WindowKind::sinh_power, K, N, xi, xi + D, cells), v);
      };
      const OuterResult rs = outer_log(sinh_f, 0.0, xi_max, D, options);
      best.offer(rs.value, "family=sinh_power;xi=" + format_double(rs.xi));

      best.offer(inner_profile(window_density(WindowKind::exp, K, N, 0.0, D, cells), v), "family=exp");

      // cosh is even, so windows starting below -D/2 mirror ones above.
      auto cosh_f = [&](double xi) {
        return inner_profile(window_density(WindowKind::cosh_power, K, N, xi, xi + D, cells), v);
      };
      const OuterResult rc = outer_log(cosh_f, -0.5 * D, xi_max, D, options);
      best.offer(rc.value, "family=cosh_power;xi=" + format_double(rc.xi));
      out.tail_flat = rs.tail_flat && rc.tail_flat;
      break;
    }
    default: break;
  }
  out.value = best.value;
  out.argmin = best.argmin;
  return out;
}

double model_profile_value(double K, double N, double D, double v) {
  return model_profile(ProfileParams{K, N, D}, v).value;
}

ModelProfileResult model_profile_infimum(const ProfileParams& params, double v, const InfimumOptions& options) {
  params.validate();
  check_volume(v);
  ModelProfileResult out;
  out.which = classify(params);
  if (out.which == ProfileCase::trivial) {
    out.argmin = "trivial";
    return out;
  }
  if (out.which == ProfileCase::degenerate) {
    out.value = (v == 0.0 || v == 1.0) ? 0.0 : kInf;
    out.argmin = "point";
    return out;
  }
  if (v == 0.0 || v == 1.0) {
    out.argmin = "endpoint";
    return out;
  }

  const double K = params.K, N = params.N;
  const double D = params.effective_diameter();
  if (N == 1.0) {
    // J is an indicator: flat on a sub-window, best with the whole window.
    out.value = 1.0 / D;
    out.argmin = "H=0;a=0";
    return out;
  }

  const double u_limit = std::asinh(1e6);
  auto eval = [&](double u, double a) {
    a = std::clamp(a, 0.0, D);
    u = std::clamp(u, -u_limit, u_limit);
    return inner_profile(jacobian_window(ModelDensitySpec{std::sinh(u), K, N, a, D}, options.cells), v);
  };

  std::vector<double> us{0.0};
  for (double h : logspace(1e-3, 1e3, options.h_per_side)) {
    us.push_back(std::asinh(h));
    us.push_back(-std::asinh(h));
  }
  std::sort(us.begin(), us.end());
  const auto as = linspace(0.0, D, options.a_points);

  struct Sample {
    double u, a, value;
  };
  std::vector<Sample> samples;
  samples.reserve(us.size() * as.size());
  for (double u : us)
    for (double a : as) samples.push_back({u, a, eval(u, a)});
  std::sort(samples.begin(), samples.end(), [](const Sample& x, const Sample& y) { return x.value < y.value; });

  Sample best = samples.front();
  const double u_step0 = (us.back() - us.front()) / static_cast<double>(us.size() - 1);
  const double a_step0 = D / static_cast<double>(options.a_points - 1);
  for (std::size_t s = 0; s < std::min(options.refine_starts, samples.size()); ++s) {
    Sample cur = samples[s];
    double du = u_step0, da = a_step0;
    for (int it = 0; it < 4000 && (du > options.step_tolerance || da > options.step_tolerance * D); ++it) {
      bool moved = false;
      const double moves[4][2] = {{du, 0}, {-du, 0}, {0, da}, {0, -da}};
      for (const auto& mv : moves) {
        const double u = std::clamp(cur.u + mv[0], -u_limit, u_limit);
        const double a = std::clamp(cur.a + mv[1], 0.0, D);
        const double val = eval(u, a);
        if (val < cur.value) {
          cur = {u, a, val};
          moved = true;
          break;
        }
      }
      if (!moved) {
        du *= 0.5;
        da *= 0.5;
      }
    }
    if (cur.value < best.value) best = cur;
  }
  out.value = best.value;
  out.argmin = "H=" + format_double(std::sinh(best.u)) + ";a=" + format_double(best.a);
  return out;
}

double case3_closed_form(double N, double D, double v) {
  if (!(N >= 1.0) || !std::isfinite(N)) throw DomainError("case3_closed_form: N must be a finite real >= 1");
  if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("case3_closed_form: D must be finite and positive");
  check_volume(v);
  if (v == 0.0 || v == 1.0) return 0.0;
  const double lo = std::min(v, 1.0 - v), hi = std::max(v, 1.0 - v);
  auto g = [&](double xi) {
    if (xi <= 0.0) return std::pow(lo, (N - 1.0) / N);
    const double ratio = std::pow(xi / (xi + 1.0), N);
    const double log_num = (N - 1.0) / N * (N * std::log1p(xi) + std::log(lo + hi * ratio));
    const double log_den = N * std::log(xi) + std::log(std::expm1(N * std::log1p(1.0 / xi)));
    return std::exp(log_num - log_den);
  };
  auto gu = [&](double u) { return g(std::expm1(u)); };
  const ScalarMin m = scan_then_golden(gu, 0.0, std::log1p(1e8), 400, 100);
  return N / D * std::min(m.value, 1.0 / N);
}

std::vector<ModelProfileResult> profile_curve(const ProfileParams& params, const std::vector<double>& v_grid,
                                              const ModelOptions& options, unsigned threads) {
  std::vector<ModelProfileResult> out(v_grid.size());
  parallel_for(v_grid.size(), threads, [&](std::size_t i) { out[i] = model_profile(params, v_grid[i], options); });
  return out;
}

Density1D make_named_density(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const auto cells = static_cast<std::size_t>(get("cells", 1024));
  const double K = get("K", 0.0), N = get("N", 2.0);
  if (name == "uniform") return flat_density(get("a", 0.0), get("b", 1.0), cells);
  if (name == "sin_power") {
    const double cap = bonnet_myers_diameter(K, N);
    const double xi = get("xi", 0.0);
    return window_density(WindowKind::sin_power, K, N, xi, xi + get("D", cap), cells);
  }
  if (name == "t_power" || name == "sinh_power" || name == "cosh_power") {
    const WindowKind kind = name == "t_power"      ? WindowKind::t_power
                            : name == "sinh_power" ? WindowKind::sinh_power
                                                   : WindowKind::cosh_power;
    const double xi = get("xi", 0.0);
    return window_density(kind, K, N, xi, xi + get("D", 1.0), cells);
  }
  if (name == "exp") return window_density(WindowKind::exp, K, N, 0.0, get("D", 1.0), cells);
  if (name == "jacobian")
    return jacobian_window(ModelDensitySpec{get("H", 0.0), K, N, get("a", 0.0), get("D", 1.0)}, cells);
  throw DomainError("unknown density name: " + name);
}

}  // namespace cdiso
