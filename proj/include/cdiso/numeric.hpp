#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cdiso {

struct ScalarMin {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of f on [lo, hi].
///
/// The endpoints are evaluated too and win if they beat the interior point,
/// so a monotone f returns the better endpoint.
ScalarMin golden_section(const std::function<double(double)>& f, double lo, double hi,
                         int iterations = 60);

/// Scan f on `samples` equispaced points of [lo, hi], then refine the best
/// sample with golden-section search on its neighbouring bracket.
ScalarMin scan_then_golden(const std::function<double(double)>& f, double lo, double hi,
                           int samples = 48, int iterations = 60);

/// Smallest x in [lo, hi] with pred(x) true, for a monotone predicate
/// (false ... false true ... true). Returns hi if pred never holds.
double bisect_first_true(const std::function<bool(double)>& pred, double lo, double hi,
                         double tolerance = 1e-12, int max_iterations = 200);

/// Adaptive Simpson quadrature of f on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance = 1e-13, int max_depth = 30);

/// n points equally spaced on [lo, hi], endpoints included (n >= 2).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// n points geometrically spaced on [lo, hi], lo > 0.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
/// threads == 0 means std::thread::hardware_concurrency().
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace cdiso
