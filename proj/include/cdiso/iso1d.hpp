#pragma once

#include <cstddef>
#include <string>

#include "cdiso/density1d.hpp"

namespace cdiso {

enum class IsoMethod { halfline_left, halfline_right, interior_interval, complement, bruteforce };

std::string to_string(IsoMethod m);

struct IsoResult {
  double v = 0.0;
  double value = 0.0;
  IntervalSet minimizer;
  IsoMethod method = IsoMethod::halfline_left;
};

/// Best of the four interval families: [a, r], [l, b], [l, r] and the
/// complement of an interior interval, each constrained to mass v.
IsoResult profile_structured(const Density1D& d, double v);

struct BruteForceOptions {
  int k_max = 2;                      ///< at most 2 components
  std::size_t grid_nodes = 81;        ///< coarse grid size, endpoints included
  std::size_t budget = 4'000'000;     ///< candidate sets before ResourceError
};

struct BruteForceResult {
  IsoResult best;
  double tolerance = 0.0;  ///< 2 * coarse spacing * Lip(h)
  std::size_t enumerated = 0;
};

/// Exhaustive search over unions of at most k_max intervals whose endpoints
/// sit on a coarse grid, except one endpoint which is solved from the CDF so
/// the mass is exactly v.
BruteForceResult profile_bruteforce(const Density1D& d, double v, const BruteForceOptions& options = {});

}  // namespace cdiso
