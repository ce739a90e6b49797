#include "cdiso/density1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cdiso/coeffs.hpp"

namespace cdiso {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290,
                                               0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

double gauss_legendre(const std::function<double(double)>& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    const double dx = half * kGaussNodes[k];
    sum += kGaussWeights[k] * (f(mid - dx) + f(mid + dx));
  }
  return half * sum;
}

double checked(double v) {
  if (!(v >= 0.0) || std::isinf(v)) throw DomainError("density: value must be finite and nonnegative");
  return v;
}

}  // namespace

IntervalSet::IntervalSet(std::vector<Interval> components) {
  std::erase_if(components, [](const Interval& c) { return !(c.hi >= c.lo); });
  std::sort(components.begin(), components.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const auto& c : components) {
    if (!components_.empty() && c.lo <= components_.back().hi)
      components_.back().hi = std::max(components_.back().hi, c.hi);
    else
      components_.push_back(c);
  }
}

Density1D Density1D::from_samples(double a, double b, std::vector<double> values) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("density: need finite a < b");
  if (values.size() < 2) throw DomainError("density: need at least two samples");
  Density1D d;
  d.grid_ = linspace_grid(a, b, values.size());
  d.build(std::move(values));
  return d;
}

Density1D Density1D::from_function(std::string name, std::function<double(double)> f, double a,
                                   double b, std::size_t cells) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("density: need finite a < b");
  if (cells < 1) throw DomainError("density: need at least one cell");
  Density1D d;
  d.name_ = std::move(name);
  d.raw_ = [g = std::move(f)](double t) { return checked(g(t)); };
  d.grid_ = linspace_grid(a, b, cells + 1);
  std::vector<double> raw(d.grid_.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = d.raw_(d.grid_[i]);
  d.build(std::move(raw));
  return d;
}

std::vector<double> Density1D::linspace_grid(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + step * static_cast<double>(i);
  g.back() = b;
  return g;
}

void Density1D::build(std::vector<double> raw_values) {
  spacing_ = (grid_.back() - grid_.front()) / static_cast<double>(grid_.size() - 1);
  for (double v : raw_values) checked(v);

  // Positive samples must be contiguous: the support of a CD density is an interval.
  std::size_t first = raw_values.size(), last = 0;
  for (std::size_t i = 0; i < raw_values.size(); ++i) {
    if (raw_values[i] > 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == raw_values.size() && !raw_) throw DomainError("density: zero mass");
  for (std::size_t i = first; i < last; ++i)
    if (raw_values[i] == 0.0) throw DomainError("density: support is not an interval");

  values_ = std::move(raw_values);
  scale_ = 1.0;
  cumulative_.assign(grid_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    cumulative_[i + 1] = cumulative_[i] + cell_partial(i, grid_[i + 1]);
  raw_mass_ = cumulative_.back();
  if (!(raw_mass_ > 0.0) || !std::isfinite(raw_mass_)) throw DomainError("density: zero or infinite mass");

  scale_ = 1.0 / raw_mass_;
  for (auto& v : values_) v *= scale_;
  for (auto& c : cumulative_) c *= scale_;
  cumulative_.back() = 1.0;
}

double Density1D::cell_partial(std::size_t cell, double x) const {
  const double t0 = grid_[cell];
  if (x <= t0) return 0.0;
  if (raw_) return scale_ * gauss_legendre(raw_, t0, x);
  const double s = x - t0;
  const double h0 = values_[cell];
  const double slope = (values_[cell + 1] - h0) / spacing_;
  return s * (h0 + 0.5 * slope * s);
}

std::size_t Density1D::cell_of(double t) const {
  const double r = std::floor((t - grid_.front()) / spacing_);
  if (!(r > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(r), cells() - 1);
}

double Density1D::operator()(double t) const {
  if (t < grid_.front() || t > grid_.back() || std::isnan(t)) return 0.0;
  if (raw_) return scale_ * raw_(t);
  const std::size_t i = cell_of(t);
  const double w = (t - grid_[i]) / spacing_;
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double Density1D::cdf(double t) const {
  if (t <= grid_.front()) return 0.0;
  if (t >= grid_.back()) return 1.0;
  const std::size_t i = cell_of(t);
  return std::min(1.0, cumulative_[i] + cell_partial(i, t));
}

namespace {

// Solves partial(x) = target on [lo, hi], partial increasing with derivative h.
double solve_in_cell(const std::function<double(double)>& partial,
                     const std::function<double(double)>& h, double lo, double hi, double target,
                     double cell_mass) {
  if (target <= 0.0) return lo;
  if (target >= cell_mass) return hi;
  double x = lo + (hi - lo) * target / cell_mass;
  double a = lo, b = hi;
  for (int it = 0; it < 80; ++it) {
    const double g = partial(x) - target;
    if (g == 0.0) return x;
    if (g > 0.0)
      b = x;
    else
      a = x;
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    const double slope = h(x);
    if (slope > 0.0 && std::abs(g / slope) <= 1e-15 * std::max(1.0, std::abs(x))) return x - g / slope;
    double next = slope > 0.0 ? x - g / slope : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
  }
  return x;
}

}  // namespace

double Density1D::quantile(double mass) const {
  if (mass <= 0.0) {
    const auto it = std::find_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
    const std::size_t i = static_cast<std::size_t>(it - values_.begin());
    return i == 0 || i == values_.size() ? grid_.front() : grid_[i - 1];
  }
  if (mass >= 1.0) mass = 1.0;
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), mass);
  const std::size_t j = static_cast<std::size_t>(it - cumulative_.begin());
  if (j == 0) return grid_.front();
  if (j >= cumulative_.size()) return grid_.back();
  const std::size_t cell = j - 1;
  const double cell_mass = cumulative_[j] - cumulative_[cell];
  return solve_in_cell([&](double x) { return cell_partial(cell, x); },
                       [&](double x) { return (*this)(x); }, grid_[cell], grid_[j],
                       mass - cumulative_[cell], cell_mass);
}

double Density1D::quantile_upper(double mass) const {
  if (mass >= 1.0) {
    const auto it = std::find_if(values_.rbegin(), values_.rend(), [](double v) { return v > 0.0; });
    const std::size_t from_end = static_cast<std::size_t>(it - values_.rbegin());
    return from_end == 0 || from_end == values_.size() ? grid_.back()
                                                       : grid_[values_.size() - from_end];
  }
  if (mass <= 0.0) mass = 0.0;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), mass);
  const std::size_t j = static_cast<std::size_t>(it - cumulative_.begin());
  if (j >= cumulative_.size()) return grid_.back();
  if (j == 0) return grid_.front();
  const std::size_t cell = j - 1;
  const double cell_mass = cumulative_[j] - cumulative_[cell];
  return solve_in_cell([&](double x) { return cell_partial(cell, x); },
                       [&](double x) { return (*this)(x); }, grid_[cell], grid_[j],
                       mass - cumulative_[cell], cell_mass);
}

double Density1D::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double Density1D::lipschitz_estimate() const {
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i)
    lip = std::max(lip, std::abs(values_[i + 1] - values_[i]) / spacing_);
  return lip;
}

Interval Density1D::support() const {
  const double threshold = 1e-12 * max_value();
  std::size_t first = 0, last = values_.size() - 1;
  while (first < last && !(values_[first] > threshold)) ++first;
  while (last > first && !(values_[last] > threshold)) --last;
  return {grid_[first], grid_[last]};
}

namespace {

double edge_tolerance(const Density1D& d) { return 1e-9 * d.length(); }

}  // namespace

double measure(const Density1D& d, const IntervalSet& A) {
  const double tol = edge_tolerance(d);
  double total = 0.0;
  for (const auto& c : A.components()) {
    if (c.lo < d.lower() - tol || c.hi > d.upper() + tol)
      throw DomainError("measure: set is not contained in the density interval");
    total += d.cdf(c.hi) - d.cdf(c.lo);
  }
  return total;
}

double minkowski_content(const Density1D& d, const IntervalSet& A) {
  const double tol = edge_tolerance(d);
  double total = 0.0;
  for (const auto& c : A.components()) {
    if (c.lo < d.lower() - tol || c.hi > d.upper() + tol)
      throw DomainError("minkowski_content: set is not contained in the density interval");
    if (c.lo > d.lower() + tol) total += d(c.lo);
    if (c.hi < d.upper() - tol) total += d(c.hi);
  }
  return total;
}

double default_cd_tolerance(const Density1D& d) { return 1e-6 * (1.0 + d.max_value()); }

CdCheck check_cd(const Density1D& d, double K, double N, double tol) {
  if (!(N >= 1.0) || !std::isfinite(N)) throw DomainError("check_cd: N must be a finite real >= 1");
  if (!std::isfinite(K)) throw DomainError("check_cd: K must be finite");
  CdCheck out;
  out.tolerance = tol < 0.0 ? default_cd_tolerance(d) : tol;

  const auto& h = d.values();
  const auto& t = d.grid();
  const double threshold = 1e-12 * d.max_value();
  std::size_t first = 0, last = h.size() - 1;
  while (first < last && !(h[first] > threshold)) ++first;
  while (last > first && !(h[last] > threshold)) --last;

  auto record = [&](std::size_t i, std::size_t j, double violation) {
    if (!out.worst || violation > out.worst->violation) out.worst = CdWitness{t[i], t[j], violation};
  };

  if (N == 1.0) {
    // Constant on the support.
    double lo = h[first], hi = h[first];
    std::size_t ilo = first, ihi = first;
    for (std::size_t i = first; i <= last; ++i) {
      if (h[i] < lo) lo = h[i], ilo = i;
      if (h[i] > hi) hi = h[i], ihi = i;
    }
    out.pairs_checked = last - first + 1;
    record(std::min(ilo, ihi), std::max(ilo, ihi), hi - lo);
    out.pass = hi - lo <= out.tolerance;
    return out;
  }

  const double p = 1.0 / (N - 1.0);
  std::vector<double> y(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) y[i] = std::pow(h[i], p);

  for (std::size_t gap = 2; first + gap <= last; gap += 2) {
    const double theta = static_cast<double>(gap) * d.spacing();
    const ExtendedReal s = sigma(0.5, theta, K, N - 1.0);
    ++out.pairs_checked;
    if (s.is_infinite()) {
      // Positive density at distance theta beyond the Bonnet-Myers bound.
      record(first, first + gap, std::numeric_limits<double>::infinity());
      break;
    }
    const double c = s.value();
    const std::size_t half = gap / 2;
    for (std::size_t i = first; i + gap <= last; ++i) {
      const double violation = c * (y[i] + y[i + gap]) - y[i + half];
      if (!out.worst || violation > out.worst->violation) record(i, i + gap, violation);
    }
    out.pairs_checked += last - first - gap;
  }
  out.pass = !out.worst || out.worst->violation <= out.tolerance;
  return out;
}

double standard_mollifier(double x) {
  static const double normalizer = [] {
    // Midpoint rule is spectrally accurate for this flat-ended bump.
    constexpr int n = 4096;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double u = 2.0 * (k + 0.5) / n - 1.0;
      sum += std::exp(-1.0 / (1.0 - u * u));
    }
    return sum / n;
  }();
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  const double u = 2.0 * x - 1.0;
  return std::exp(-1.0 / (1.0 - u * u)) / normalizer;
}

MollifyResult mollify(const Density1D& d, double eps, double N, const MollifyOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("mollify: eps must be positive");
  if (!(N > 1.0) || !std::isfinite(N)) throw DomainError("mollify: N must be a finite real > 1");
  if (options.kernel_nodes < 8) throw DomainError("mollify: too few kernel nodes");

  const double p = 1.0 / (N - 1.0);
  const double a = d.lower(), b = d.upper();
  const auto& grid = d.grid();
  const auto& h = d.values();
  auto y_inside = [&](double s) { return std::pow(d(s), p); };

  // One-sided third-order slopes of y = h^{1/(N-1)} at both ends.
  double ya = 0, dya = 0, yb = 0, dyb = 0;
  const double delta = options.K / (N - 1.0);
  const bool jacobi = options.extension == MollifyExtension::jacobi;
  if (jacobi) {
    if (h.size() < 4) throw DomainError("mollify: Jacobi extension needs at least four samples");
    const std::size_t n = h.size();
    const double dx = d.spacing();
    auto yi = [&](std::size_t i) { return std::pow(h[i], p); };
    ya = yi(0);
    dya = (-11.0 * yi(0) + 18.0 * yi(1) - 9.0 * yi(2) + 2.0 * yi(3)) / (6.0 * dx);
    yb = yi(n - 1);
    dyb = (11.0 * yi(n - 1) - 18.0 * yi(n - 2) + 9.0 * yi(n - 3) - 2.0 * yi(n - 4)) / (6.0 * dx);
  }
  auto y_ext = [&](double s) {
    if (s >= a && s <= b) return y_inside(s);
    if (!jacobi) return 0.0;
    if (s < a) return ya * c_delta(s - a, delta) + dya * s_delta(s - a, delta);
    return yb * c_delta(s - b, delta) + dyb * s_delta(s - b, delta);
  };

  // Kernel weights on midpoints of (0, 1), normalized to sum exactly to 1.
  const int q = options.kernel_nodes;
  std::vector<double> u(q), w(q);
  double wsum = 0.0;
  for (int k = 0; k < q; ++k) {
    u[k] = (k + 0.5) / q;
    w[k] = standard_mollifier(u[k]);
    wsum += w[k];
  }
  for (auto& x : w) x /= wsum;

  const double lo = a - eps, hi = b + eps;
  const auto cells = static_cast<std::size_t>(
      std::max(16.0, std::ceil((hi - lo) / (grid[1] - grid[0]) - 1e-9)));
  std::vector<double> ye(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) {
    const double t = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(cells);
    double acc = 0.0;
    for (int k = 0; k < q; ++k) acc += w[k] * y_ext(t - eps * u[k]);
    ye[j] = acc;
  }

  // Keep the positive lobe around the original interval.
  std::size_t centre = static_cast<std::size_t>(
      std::llround(0.5 * (a + b - 2.0 * lo) / (hi - lo) * static_cast<double>(cells)));
  if (!(ye[centre] > 0.0))
    centre = static_cast<std::size_t>(std::max_element(ye.begin(), ye.end()) - ye.begin());
  std::size_t left = centre, right = centre;
  while (left > 0 && ye[left - 1] > 0.0) --left;
  while (right < cells && ye[right + 1] > 0.0) ++right;
  std::vector<double> out(cells + 1, 0.0);
  for (std::size_t j = left; j <= right; ++j) out[j] = std::pow(std::max(ye[j], 0.0), N - 1.0);

  Density1D result = Density1D::from_samples(lo, hi, std::move(out));
  const double scale = 1.0 / result.raw_mass();
  return {std::move(result), scale};
}

double sup_distance(const Density1D& d1, const Density1D& d2) {
  double best = 0.0;
  for (double t : d1.grid()) best = std::max(best, std::abs(d1(t) - d2(t)));
  for (double t : d2.grid()) best = std::max(best, std::abs(d1(t) - d2(t)));
  return best;
}

Density1D read_density_csv(std::istream& in) {
  std::vector<double> ts, hs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DomainError("density csv: line " + std::to_string(line_no) + " has no comma");
    try {
      std::size_t used = 0;
      const double t = std::stod(line.substr(0, comma), &used);
      const double v = std::stod(line.substr(comma + 1));
      ts.push_back(t);
      hs.push_back(v);
    } catch (const std::invalid_argument&) {
      if (!ts.empty())
        throw DomainError("density csv: line " + std::to_string(line_no) + " is not numeric");
      // header line
    }
  }
  if (ts.size() < 2) throw DomainError("density csv: need at least two rows");
  const double step = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  const double tol = 1e-9 * std::abs(ts.back() - ts.front()) + 1e-12;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double expected = ts.front() + step * static_cast<double>(i);
    if (std::abs(ts[i] - expected) > tol) throw DomainError("density csv: grid is not uniform");
  }
  return Density1D::from_samples(ts.front(), ts.back(), std::move(hs));
}

void write_density_csv(std::ostream& out, const Density1D& d) {
  out << "t,h\n";
  char buf[64];
  for (std::size_t i = 0; i < d.grid().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", d.grid()[i], d.values()[i]);
    out << buf;
  }
}

}  // namespace cdiso
