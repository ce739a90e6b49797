#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdiso {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Finite union of disjoint closed intervals, kept sorted.
class IntervalSet {
 public:
  IntervalSet() = default;
  /// Sorts and merges overlapping or touching components; drops reversed ones.
  explicit IntervalSet(std::vector<Interval> components);
  static IntervalSet single(double lo, double hi) { return IntervalSet({{lo, hi}}); }

  const std::vector<Interval>& components() const { return components_; }
  bool empty() const { return components_.empty(); }
  std::size_t size() const { return components_.size(); }

 private:
  std::vector<Interval> components_;
};

/// Probability density on [a, b] sampled on a uniform grid.
///
/// A density is either sampled (linear interpolation between nodes) or
/// closed-form (a callable evaluated exactly, with the grid used for
/// quadrature). Values are normalized to unit mass on construction; the raw
/// mass is kept as `raw_mass()`.
class Density1D {
 public:
  /// values[i] = h(a + i*(b-a)/(values.size()-1)).
  static Density1D from_samples(double a, double b, std::vector<double> values);

  /// Closed-form density proportional to `f` on [a, b]; `cells` quadrature cells.
  static Density1D from_function(std::string name, std::function<double(double)> f, double a,
                                 double b, std::size_t cells = 1024);

  double lower() const { return grid_.front(); }
  double upper() const { return grid_.back(); }
  double length() const { return upper() - lower(); }
  double spacing() const { return spacing_; }
  std::size_t cells() const { return grid_.size() - 1; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::optional<std::string>& closed_form_name() const { return name_; }
  bool is_closed_form() const { return static_cast<bool>(raw_); }

  /// Normalized density at t; zero outside [a, b].
  double operator()(double t) const;

  /// Mass of [a, t].
  double cdf(double t) const;

  /// Smallest t with cdf(t) >= mass.
  double quantile(double mass) const;

  /// Largest t with cdf(t) <= mass.
  double quantile_upper(double mass) const;

  /// Mass of the density before normalization.
  double raw_mass() const { return raw_mass_; }

  double max_value() const;

  /// max |h(t_{i+1}) - h(t_i)| / spacing over the grid.
  double lipschitz_estimate() const;

  /// Smallest interval containing {h > 1e-12 * max h}.
  Interval support() const;

 private:
  Density1D() = default;
  static std::vector<double> linspace_grid(double a, double b, std::size_t n);
  void build(std::vector<double> raw_values);
  double cell_partial(std::size_t cell, double x) const;
  std::size_t cell_of(double t) const;

  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
  std::function<double(double)> raw_;
  std::optional<std::string> name_;
  double scale_ = 1.0;
  double raw_mass_ = 1.0;
  double spacing_ = 0.0;
};

/// Mass of A (composite quadrature over each component).
double measure(const Density1D& d, const IntervalSet& A);

/// Minkowski content of a finite interval union: sum of h over boundary
/// points interior to [a, b]; a boundary point on an edge of [a, b] adds 0.
double minkowski_content(const Density1D& d, const IntervalSet& A);

struct CdWitness {
  double t0 = 0.0;
  double t1 = 0.0;
  double violation = 0.0;  ///< rhs - lhs on the h^{1/(N-1)} scale; +inf when sigma is infinite
};

struct CdCheck {
  bool pass = true;
  double tolerance = 0.0;
  std::size_t pairs_checked = 0;
  std::optional<CdWitness> worst;  ///< pair with the largest rhs - lhs
};

/// 1e-6 * (1 + max h).
double default_cd_tolerance(const Density1D& d);

/// Midpoint test of the CD(K,N) inequality for densities on a line,
///   h((t0+t1)/2)^{1/(N-1)} >= sigma^{(1/2)}_{K,N-1}(t1-t0) [h(t0)^{1/(N-1)} + h(t1)^{1/(N-1)}],
/// over every even-gap pair of grid nodes inside the support. For N == 1
/// the density must be constant on its support within tol.
/// A negative tol selects default_cd_tolerance(d).
CdCheck check_cd(const Density1D& d, double K, double N, double tol = -1.0);

/// How h^{1/(N-1)} is continued outside [a, b] before convolution.
enum class MollifyExtension {
  zero,    ///< h extended by zero
  jacobi,  ///< C^1 continuation solving y'' + K/(N-1) y = 0
};

struct MollifyOptions {
  double K = 0.0;
  MollifyExtension extension = MollifyExtension::jacobi;
  int kernel_nodes = 256;
};

struct MollifyResult {
  Density1D density;
  double scale = 1.0;  ///< factor applied to reach unit mass
};

/// h_eps = (h^{1/(N-1)} * psi_eps)^{N-1} on [a - eps, b + eps], renormalized.
/// psi(x) = C exp(-1/(1 - (2x-1)^2)) on (0, 1).
MollifyResult mollify(const Density1D& d, double eps, double N, const MollifyOptions& options = {});

/// The unit-mass bump psi on [0, 1].
double standard_mollifier(double x);

/// sup |d1 - d2| over the union of both grids, each density zero off its own interval.
double sup_distance(const Density1D& d1, const Density1D& d2);

/// Two-column CSV `t,h` with header; spacing must be uniform.
Density1D read_density_csv(std::istream& in);
void write_density_csv(std::ostream& out, const Density1D& d);

}  // namespace cdiso
