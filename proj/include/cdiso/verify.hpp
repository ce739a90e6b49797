#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cdiso/mms.hpp"

namespace cdiso {

/// Discretization slack c1 * eps + c2 * resolution.
struct SlackModel {
  double c1 = 0.5;
  double c2 = 1.0;
  double operator()(double eps, double resolution) const { return c1 * eps + c2 * resolution; }
};

/// Smallest prefix of the points ordered by `key` whose mass is closest to v.
Subset prefix_of_mass(const FiniteMMS& X, const std::vector<double>& key, double v);

/// Ball around `center` with mass as close to v as the sample allows.
Subset ball_of_mass(const FiniteMMS& X, std::size_t center, double v);

struct Candidate {
  std::string label;
  Subset set;
};

enum class ContentEstimator {
  quotient,       ///< minkowski_discrete at every rung of the eps ladder
  two_sided_fit,  ///< minkowski_two_sided over [fit_lo, fit_hi] * resolution
};

struct CompareOptions {
  ContentEstimator estimator = ContentEstimator::quotient;
  double fit_lo = 1.0;
  double fit_hi = 4.0;
  std::size_t centers = 32;      ///< ball centers, spread deterministically by seed
  std::size_t random_potentials = 2;  ///< sublevel sets of phi for random zero-mean f
  std::vector<Candidate> user_sets;
  SlackModel slack;
  std::uint64_t seed = 11;
  unsigned threads = 1;
};

struct CandidateValue {
  std::string label;
  double eps = 0.0;  ///< rung, or the middle of the fit range
  double mass = 0.0;
  double content = 0.0;
  double model = 0.0;  ///< model profile at the candidate's own mass
  double slack = 0.0;
};

struct CompareEntry {
  double v = 0.0;
  double model = 0.0;     ///< I_{K,N,D}(v)
  double estimate = 0.0;  ///< min content over candidates and rungs
  CandidateValue best;
  std::vector<CandidateValue> violations;  ///< content < model(mass) - slack
};

struct CompareReport {
  double K = 0.0, N = 0.0, D = 0.0;
  double resolution = 0.0;
  std::vector<CompareEntry> entries;
  std::size_t violation_count() const;
};

/// Upper estimates of the profile of X by discrete Minkowski content over
/// balls, sublevel sets of Kantorovich potentials and user sets, each
/// compared to I_{K,N,D} at its own mass with D the diameter of X. An empty
/// eps ladder means {2 * resolution}; the fit estimator ignores the ladder.
CompareReport compare_profile(const FiniteMMS& X, double K, double N, const std::vector<double>& v_grid,
                              std::vector<double> eps_ladder, const CompareOptions& options = {});

struct NeedleBoundReport {
  double v = 0.0;
  double eps = 0.0;
  double measured = 0.0;        ///< minkowski_discrete(A, eps)
  double needle_content = 0.0;  ///< sum over needles of weight * content of the trace of A
  double model_bound = 0.0;     ///< sum over needles of weight * I_{K,N,length}(m_q(A))
  double off_transport_mass = 0.0;
  double slack = 0.0;
  std::size_t needles = 0;
  bool consistent = true;  ///< model_bound <= measured + slack
};

/// Replays the localization proof on a finite space: needles of
/// f = chi_A - m(A), 1-D content of A along each needle, and the model
/// profile for the needle length. A non-positive eps means 2 * resolution.
NeedleBoundReport needle_lower_bound(const FiniteMMS& X, const Subset& A, double K, double N, double eps = -1.0,
                                     const SlackModel& slack = {});

struct Competitor {
  std::string label;
  double mass = 0.0;
  double content = 0.0;
  double margin = 0.0;  ///< content - cap content
};

struct RigidityReport {
  double v = 0.0;
  double N = 0.0;
  double r_v = 0.0;
  double eps = 0.0;
  double cap_mass = 0.0;
  double cap_content = 0.0;
  double model = 0.0;  ///< I_{N-1,N,inf}(v)
  double tolerance = 0.0;
  std::vector<Competitor> competitors;
  bool cap_matches_model = true;   ///< |cap - model| <= tolerance
  bool competitors_above = true;   ///< every margin >= -tolerance
};

/// Polar cap {t <= r_v} of a spherical suspension against the model value
/// and against tilted caps, bands and split caps of nearby mass.
/// A non-positive eps means 2 * resolution.
RigidityReport rigidity_cap_check(const FiniteMMS& S, double v, double eps = -1.0, const SlackModel& slack = {});

struct DiameterGap {
  double eta = 0.0;
  double bounded = 0.0;    ///< I_{N-1-delta, N+delta, D}(v)
  double unbounded = 0.0;  ///< I_{N-1-delta, N+delta, inf}(v)
  bool positive = false;
};

/// Profile gain from a diameter bound D < pi; throws DomainError unless
/// 0 < D < pi and 0 <= delta <= (N-1)/2.
DiameterGap diameter_gap(double N, double delta, double D, double v);

struct DeltaContinuity {
  std::vector<double> delta;
  std::vector<double> value;  ///< I_{N-1-delta, N+delta, inf}(v)
  double max_jump = 0.0;
  double fitted_constant = 0.0;  ///< max jump / grid step
};

DeltaContinuity profile_continuity_in_delta(double N, double v, const std::vector<double>& delta_grid,
                                            unsigned threads = 1);

}  // namespace cdiso
