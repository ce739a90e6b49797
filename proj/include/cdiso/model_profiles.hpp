#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "cdiso/coeffs.hpp"
#include "cdiso/density1d.hpp"

namespace cdiso {

/// Parameters of the Jacobian density J_{H,K,N} restricted to [-a, D-a].
/// An infinite D means no window.
struct ModelDensitySpec {
  double H = 0.0;
  double K = 0.0;
  double N = 2.0;
  double a = 0.0;
  double D = std::numeric_limits<double>::infinity();
};

/// J_{H,K,N}(t), unnormalized: (c_delta(t) + H/(N-1) s_delta(t))_+^{N-1}, cut
/// between the first nonpositive and first positive roots. For N = 1 it is
/// the indicator of {t = 0} (K > 0) or of {H t >= 0} (K <= 0).
double jacobian_density(const ModelDensitySpec& spec, double t);

/// Roots (xi_minus, xi_plus) bounding the support of J_{H,K,N}; may be infinite.
Interval jacobian_support(double H, double K, double N);

/// Window families used by the explicit cases.
enum class WindowKind { sin_power, t_power, sinh_power, cosh_power, exp, flat };

std::string to_string(WindowKind k);

/// Normalized density of the given family on [lo, hi] for curvature K and
/// dimension N; evaluated in log space so large windows do not overflow.
Density1D window_density(WindowKind kind, double K, double N, double lo, double hi,
                         std::size_t cells = 512);

/// Normalized J_{H,K,N} on [-a, D-a] intersected with its support.
Density1D jacobian_window(const ModelDensitySpec& spec, std::size_t cells = 512);

enum class ProfileCase { case1, case2, case3, case4, trivial, degenerate };

std::string to_string(ProfileCase c);

struct ModelOptions {
  std::size_t cells = 512;        ///< quadrature cells per window density
  int outer_samples = 20;         ///< coarse grid for the outer infimum
  int golden_iterations = 50;
  double xi_max = -1.0;           ///< outer truncation; negative means 50/sqrt(|K|+1)
};

struct ModelProfileResult {
  double value = 0.0;             ///< +inf when no set of volume v exists
  ProfileCase which = ProfileCase::trivial;
  std::string argmin;             ///< "family=...;xi=..." or "H=...;a=..."
  bool tail_flat = true;          ///< outer value moved < 1e-8 over the last decade of xi
};

/// I_{K,N,D}(v) by case dispatch over the explicit window families.
ModelProfileResult model_profile(const ProfileParams& params, double v, const ModelOptions& options = {});

double model_profile_value(double K, double N, double D, double v);

struct InfimumOptions {
  std::size_t cells = 384;
  std::size_t h_per_side = 25;    ///< log-spaced |H| in [1e-3, 1e3] on each side of 0
  std::size_t a_points = 11;
  std::size_t refine_starts = 3;
  double step_tolerance = 1e-7;
};

/// I_{K,N,D}(v) as the infimum over (H, a) of the Jacobian window profiles.
ModelProfileResult model_profile_infimum(const ProfileParams& params, double v,
                                         const InfimumOptions& options = {});

/// (N/D) inf_{xi >= 0} (min(v,1-v)(xi+1)^N + max(v,1-v) xi^N)^{(N-1)/N} / ((xi+1)^N - xi^N),
/// including the xi -> infinity limit 1/D.
double case3_closed_form(double N, double D, double v);

/// model_profile over a grid of volumes.
std::vector<ModelProfileResult> profile_curve(const ProfileParams& params, const std::vector<double>& v_grid,
                                              const ModelOptions& options = {}, unsigned threads = 1);

/// Closed-form density by name: uniform, sin_power, t_power, sinh_power,
/// cosh_power, exp, jacobian. Missing parameters take defaults.
Density1D make_named_density(const std::string& name, const std::map<std::string, double>& params);

}  // namespace cdiso
