#include "cdiso/mms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cdiso/coeffs.hpp"
#include "cdiso/numeric.hpp"

namespace cdiso {

namespace {

// Geodesic distance between unit vectors, accurate for near and antipodal pairs.
double great_circle(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

Eigen::MatrixXd sphere_distances(const Eigen::MatrixXd& coords) {
  const Eigen::Index n = coords.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = coords.row(i).transpose();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = great_circle(xi, coords.row(j).transpose());
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace

FiniteMMS::FiniteMMS(Eigen::MatrixXd dist, Eigen::VectorXd weights, Eigen::MatrixXd labels,
                     MmsMetadata metadata)
    : dist_(std::move(dist)), weights_(std::move(weights)), labels_(std::move(labels)),
      metadata_(std::move(metadata)) {
  if (dist_.rows() != dist_.cols() || dist_.rows() != weights_.size() || weights_.size() == 0)
    throw DomainError("FiniteMMS: distance matrix and weights disagree in size");
  if (labels_.size() != 0 && labels_.rows() != weights_.size())
    throw DomainError("FiniteMMS: one label row per point required");
  diameter_ = dist_.maxCoeff();
  const Eigen::Index n = dist_.rows();
  resolution_ = 0.0;
  if (n > 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) nearest = std::min(nearest, dist_(i, j));
      resolution_ = std::max(resolution_, nearest);
    }
  }
}

void FiniteMMS::validate(std::size_t random_triples, std::uint64_t seed) const {
  const Eigen::Index n = dist_.rows();
  const double sym_tol = 1e-12 * (1.0 + diameter_);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) throw DomainError("FiniteMMS: nonzero diagonal at " + std::to_string(i));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(dist_(i, j) >= 0.0) || !std::isfinite(dist_(i, j)))
        throw DomainError("FiniteMMS: invalid distance entry");
      if (std::abs(dist_(i, j) - dist_(j, i)) > sym_tol) throw DomainError("FiniteMMS: asymmetric distances");
    }
  }
  if ((weights_.array() < 0.0).any() || !weights_.allFinite()) throw DomainError("FiniteMMS: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-10) throw DomainError("FiniteMMS: weights must sum to 1");

  auto check = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    if (dist_(i, k) > dist_(i, j) + dist_(j, k) + 1e-9)
      throw DomainError("FiniteMMS: triangle inequality fails on (" + std::to_string(i) + "," +
                        std::to_string(j) + "," + std::to_string(k) + ")");
  };
  if (n <= 300) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) check(i, j, k);
    return;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  for (std::size_t s = 0; s < random_triples; ++s) check(pick(rng), pick(rng), pick(rng));
}

FiniteMMS gen_interval(const Density1D& d, std::size_t n, double K, double N) {
  if (n < 2) throw DomainError("gen_interval: need n >= 2");
  const Interval supp = d.support();
  const auto t = linspace(supp.lo, supp.hi, n);
  const Eigen::Index m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd dist(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) dist(i, j) = std::abs(t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(j)]);

  Eigen::VectorXd w(m);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double upper = i + 1 < n ? d.cdf(0.5 * (t[i] + t[i + 1])) : 1.0;
    w(static_cast<Eigen::Index>(i)) = upper - prev;
    prev = upper;
  }
  Eigen::MatrixXd labels(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) labels(i, 0) = t[static_cast<std::size_t>(i)];
  MmsMetadata meta;
  meta.kind = "interval";
  meta.K = K;
  meta.N = N;
  return FiniteMMS(std::move(dist), std::move(w), std::move(labels), std::move(meta));
}

FiniteMMS gen_sphere(int dim, std::size_t n, std::uint64_t seed) {
  if (dim < 1 || dim > 3) throw DomainError("gen_sphere: dimension must be 1, 2 or 3");
  if (n < 2) throw DomainError("gen_sphere: need n >= 2");
  const Eigen::Index m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd coords(m, dim + 1);
  if (dim == 1) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      coords(k, 0) = std::cos(a);
      coords(k, 1) = std::sin(a);
    }
  } else if (dim == 2) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (Eigen::Index k = 0; k < m; ++k) {
      const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden_angle * static_cast<double>(k);
      coords(k, 0) = r * std::cos(a);
      coords(k, 1) = r * std::sin(a);
      coords(k, 2) = z;
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index k = 0; k < m;) {
      Eigen::Vector4d x(u(rng), u(rng), u(rng), u(rng));
      const double r = x.norm();
      if (r > 1.0 || r < 1e-3) continue;
      coords.row(k++) = (x / r).transpose();
    }
  }
  MmsMetadata meta;
  meta.kind = "sphere";
  meta.K = dim - 1.0;
  meta.N = dim;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd dist = sphere_distances(coords);
  return FiniteMMS(std::move(dist), std::move(w), std::move(coords), std::move(meta));
}

FiniteMMS gen_suspension(const FiniteMMS& base, double N, std::size_t n_t) {
  if (base.diameter() > std::numbers::pi + 1e-12) throw DomainError("gen_suspension: base diameter exceeds pi");
  if (!(N >= 2.0) || !std::isfinite(N)) throw DomainError("gen_suspension: N must be a finite real >= 2");
  if (n_t < 3) throw DomainError("gen_suspension: need at least 3 heights");

  const std::size_t ny = base.size();
  const std::size_t n = 2 + (n_t - 2) * ny;
  std::vector<double> t(n);
  std::vector<int> yi(n, -1);
  t[0] = 0.0;
  t[n - 1] = std::numbers::pi;
  for (std::size_t i = 1; i + 1 < n_t; ++i) {
    const double ti = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_t - 1);
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t p = 1 + (i - 1) * ny + j;
      t[p] = ti;
      yi[p] = static_cast<int>(j);
    }
  }

  const Eigen::Index m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < p; ++q) {
      // Law of cosines in haversine form.
      const double half_dt = std::sin(0.5 * (t[p] - t[q]));
      double h = half_dt * half_dt;
      if (yi[p] >= 0 && yi[q] >= 0) {
        const double half_dy = std::sin(0.5 * base.dist(static_cast<std::size_t>(yi[p]), static_cast<std::size_t>(yi[q])));
        h += std::sin(t[p]) * std::sin(t[q]) * half_dy * half_dy;
      }
      const double v = 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
      dist(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
      dist(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = v;
    }
  }

  Eigen::VectorXd w(m);
  for (std::size_t p = 0; p < n; ++p) {
    const double wy = yi[p] >= 0 ? base.weight(static_cast<std::size_t>(yi[p])) : 0.0;
    w(static_cast<Eigen::Index>(p)) = std::pow(std::max(0.0, std::sin(t[p])), N - 1.0) * wy;
  }
  w /= w.sum();

  Eigen::MatrixXd labels;
  const Eigen::MatrixXd& bl = base.labels();
  if (bl.size() != 0) {
    labels.resize(m, bl.cols() + 1);
    for (std::size_t p = 0; p < n; ++p) {
      const auto r = static_cast<Eigen::Index>(p);
      if (yi[p] >= 0)
        labels.row(r).head(bl.cols()) = std::sin(t[p]) * bl.row(yi[p]);
      else
        labels.row(r).head(bl.cols()).setZero();
      labels(r, bl.cols()) = std::cos(t[p]);
    }
  } else {
    labels.resize(m, 1);
    for (std::size_t p = 0; p < n; ++p) labels(static_cast<Eigen::Index>(p), 0) = t[p];
  }

  MmsMetadata meta;
  meta.kind = "suspension";
  meta.K = N - 1.0;
  meta.N = N;
  meta.heights = std::move(t);
  meta.base_index = std::move(yi);
  return FiniteMMS(std::move(dist), std::move(w), std::move(labels), std::move(meta));
}

double measure(const FiniteMMS& X, const Subset& A) {
  if (A.size() != X.size()) throw DomainError("subset size does not match the space");
  double total = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A[i]) total += X.weight(i);
  return total;
}

namespace {

Subset neighbourhood(const FiniteMMS& X, const Subset& A, double eps, bool closed) {
  if (A.size() != X.size()) throw DomainError("subset size does not match the space");
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A[i]) members.push_back(i);
  Subset out(A.size(), 0);
  const double reach = eps * (1.0 + 1e-9);
  for (std::size_t x = 0; x < A.size(); ++x) {
    if (A[x]) {
      out[x] = 1;
      continue;
    }
    for (std::size_t y : members) {
      const double d = X.dist(x, y);
      if (closed ? d <= reach : d < eps) {
        out[x] = 1;
        break;
      }
    }
  }
  return out;
}

}  // namespace

Subset enlarge(const FiniteMMS& X, const Subset& A, double eps) { return neighbourhood(X, A, eps, false); }

double minkowski_discrete(const FiniteMMS& X, const Subset& A, double eps) {
  if (!(eps > 0.0)) throw DomainError("minkowski_discrete: eps must be positive");
  const Subset grown = neighbourhood(X, A, eps, true);
  return (measure(X, grown) - measure(X, A)) / eps;
}

double minkowski_fit(const FiniteMMS& X, const Subset& A, double eps_lo, double eps_hi, std::size_t samples) {
  if (!(eps_lo > 0.0 && eps_hi > eps_lo) || samples < 2) throw DomainError("minkowski_fit: need 0 < eps_lo < eps_hi");
  const std::size_t n = X.size();
  if (A.size() != n) throw DomainError("minkowski_fit: subset size does not match the space");
  // distance to A and weight of every outside point, sorted by distance
  std::vector<std::pair<double, double>> outside;
  for (std::size_t x = 0; x < n; ++x) {
    if (A[x]) continue;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < n; ++y)
      if (A[y]) d = std::min(d, X.dist(x, y));
    outside.emplace_back(d, X.weight(x));
  }
  std::sort(outside.begin(), outside.end());
  const double ramp = X.resolution() > 0.0 ? X.resolution() : eps_hi - eps_lo;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double eps = eps_lo + (eps_hi - eps_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    double grown = 0.0;
    for (const auto& [d, w] : outside) {
      if (d > eps + 0.5 * ramp) break;
      grown += w * std::clamp((eps - d) / ramp + 0.5, 0.0, 1.0);
    }
    sx += eps;
    sy += grown;
    sxx += eps * eps;
    sxy += eps * grown;
  }
  const double m = static_cast<double>(samples);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double minkowski_two_sided(const FiniteMMS& X, const Subset& A, double eps_lo, double eps_hi, std::size_t samples) {
  Subset complement(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) complement[i] = A[i] ? 0 : 1;
  return 0.5 * (minkowski_fit(X, A, eps_lo, eps_hi, samples) + minkowski_fit(X, complement, eps_lo, eps_hi, samples));
}

MinkowskiLadder minkowski_ladder(const FiniteMMS& X, const Subset& A, const std::vector<double>& factors) {
  if (factors.empty()) throw DomainError("minkowski_ladder: empty ladder");
  MinkowskiLadder out;
  out.minimum = std::numeric_limits<double>::infinity();
  for (double f : factors) {
    const double eps = f * X.resolution();
    const double value = minkowski_discrete(X, A, eps);
    out.rungs.push_back({eps, value});
    out.minimum = std::min(out.minimum, value);
  }
  return out;
}

Subset ball(const FiniteMMS& X, std::size_t center, double r) {
  Subset out(X.size(), 0);
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = X.dist(center, i) <= r ? 1 : 0;
  return out;
}

void write_space(const FiniteMMS& X, const std::string& prefix) {
  const std::size_t n = X.size();
  char buf[40];
  {
    std::ofstream out(prefix + ".dist.csv");
    if (!out) throw std::runtime_error("cannot write " + prefix + ".dist.csv");
    out << n << '\n';
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", X.dist(i, j));
        out << (j ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(prefix + ".weights.csv");
    if (!out) throw std::runtime_error("cannot write " + prefix + ".weights.csv");
    out << "w\n";
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", X.weight(i));
      out << buf << '\n';
    }
  }
  nlohmann::json meta;
  meta["kind"] = X.metadata().kind;
  meta["K"] = X.metadata().K;
  meta["N"] = X.metadata().N;
  meta["n"] = n;
  meta["diameter"] = X.diameter();
  meta["resolution"] = X.resolution();
  if (!X.metadata().heights.empty()) {
    meta["heights"] = X.metadata().heights;
    meta["base_index"] = X.metadata().base_index;
  }
  if (X.labels().size() != 0) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < X.labels().rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < X.labels().cols(); ++c) row.push_back(X.labels()(i, c));
      rows.push_back(row);
    }
    meta["labels"] = rows;
  }
  std::ofstream out(prefix + ".meta.json");
  if (!out) throw std::runtime_error("cannot write " + prefix + ".meta.json");
  out << meta.dump(2) << '\n';
}

FiniteMMS read_space(const std::string& prefix) {
  std::ifstream din(prefix + ".dist.csv");
  if (!din) throw DomainError("cannot read " + prefix + ".dist.csv");
  std::size_t n = 0;
  std::string line;
  if (!std::getline(din, line)) throw DomainError("distance file is empty");
  n = static_cast<std::size_t>(std::stoull(line));
  if (n == 0) throw DomainError("distance file declares zero points");
  const Eigen::Index m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 1; i < n; ++i) {
    if (!std::getline(din, line)) throw DomainError("distance file: missing row " + std::to_string(i));
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t j = 0; j < i; ++j) {
      if (!std::getline(ss, cell, ',')) throw DomainError("distance file: short row " + std::to_string(i));
      const double v = std::stod(cell);
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }

  std::ifstream win(prefix + ".weights.csv");
  if (!win) throw DomainError("cannot read " + prefix + ".weights.csv");
  Eigen::VectorXd w(m);
  std::size_t k = 0;
  while (std::getline(win, line)) {
    if (line.empty() || line == "w") continue;
    if (k >= n) throw DomainError("weights file has more rows than points");
    w(static_cast<Eigen::Index>(k++)) = std::stod(line);
  }
  if (k != n) throw DomainError("weights file has fewer rows than points");

  MmsMetadata meta;
  Eigen::MatrixXd labels;
  std::ifstream min(prefix + ".meta.json");
  if (min) {
    const nlohmann::json j = nlohmann::json::parse(min);
    meta.kind = j.value("kind", std::string("custom"));
    meta.K = j.value("K", 0.0);
    meta.N = j.value("N", 1.0);
    if (j.contains("heights")) {
      meta.heights = j["heights"].get<std::vector<double>>();
      meta.base_index = j["base_index"].get<std::vector<int>>();
    }
    if (j.contains("labels")) {
      const auto rows = j["labels"].get<std::vector<std::vector<double>>>();
      if (!rows.empty()) {
        labels.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
          for (std::size_t c = 0; c < rows[r].size(); ++c)
            labels(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
  }
  return FiniteMMS(std::move(dist), std::move(w), std::move(labels), std::move(meta));
}

}  // namespace cdiso
