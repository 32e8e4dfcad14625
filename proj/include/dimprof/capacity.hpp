#pragma once

// Capacities with respect to the kernel phi_r^s(x) = min{1, (r/|x|)^s}:
// energies of discrete measures, energy minimization over the probability
// simplex, and the box dimension profiles obtained from log C_r^s / -log r.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dimprof/core.hpp"
#include "dimprof/covering.hpp"
#include "dimprof/digitsets.hpp"

namespace dimprof {

inline double kernel_from_distance(double distance, double r, double s) {
  if (distance <= r) return 1.0;
  return std::pow(r / distance, s);
}

inline double kernel_phi(std::span<const double> x, double r, double s) {
  require(r > 0.0 && s > 0.0, "kernel_phi: r and s must be positive");
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  return kernel_from_distance(std::sqrt(norm2), r, s);
}

/// A probability measure with finite support.
class DiscreteMeasure {
 public:
  DiscreteMeasure(PointCloud support, std::vector<double> weights)
      : support_(std::move(support)), weights_(std::move(weights)) {
    require(weights_.size() == support_.size(), "measure: one weight per support point is required");
    require(!weights_.empty(), "measure: support must be non-empty");
    double total = 0.0;
    for (double w : weights_) {
      require(w >= 0.0, "measure: weights must be non-negative");
      total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "measure: weights must sum to 1");
  }

  static DiscreteMeasure uniform(PointCloud support) {
    const auto count = support.size();
    require(count > 0, "measure: support must be non-empty");
    return DiscreteMeasure(std::move(support), std::vector<double>(count, 1.0 / static_cast<double>(count)));
  }

  const PointCloud& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  PointCloud support_;
  std::vector<double> weights_;
};

namespace detail {

/// Kernel matrix of a support, cached when small enough and otherwise
/// evaluated column by column.
class KernelMatrix {
 public:
  KernelMatrix(const PointCloud& support, double r, double s, std::size_t cache_limit)
      : coords_(support.coordinates()), dim_(static_cast<std::size_t>(support.ambient_dim())),
        size_(support.size()), r_(r), s_(s) {
    if (size_ <= cache_limit) {
      cache_.resize(size_ * size_);
      for (std::size_t i = 0; i < size_; ++i) {
        cache_[i * size_ + i] = 1.0;
        for (std::size_t j = i + 1; j < size_; ++j) cache_[i * size_ + j] = cache_[j * size_ + i] = evaluate(i, j);
      }
    }
  }

  std::size_t size() const { return size_; }

  double operator()(std::size_t i, std::size_t j) const {
    return cache_.empty() ? evaluate(i, j) : cache_[i * size_ + j];
  }

  void column(std::size_t i, std::vector<double>& out) const {
    out.resize(size_);
    if (!cache_.empty()) {
      std::copy_n(cache_.begin() + static_cast<std::ptrdiff_t>(i * size_), size_, out.begin());
      return;
    }
    for (std::size_t j = 0; j < size_; ++j) out[j] = evaluate(i, j);
  }

  /// p = K w
  std::vector<double> potentials(const std::vector<double>& w) const {
    std::vector<double> p(size_, 0.0), col;
    for (std::size_t i = 0; i < size_; ++i) {
      if (w[i] == 0.0) continue;
      column(i, col);
      for (std::size_t j = 0; j < size_; ++j) p[j] += w[i] * col[j];
    }
    return p;
  }

 private:
  double evaluate(std::size_t i, std::size_t j) const {
    if (i == j) return 1.0;
    const double d2 = squared_distance({coords_.data() + i * dim_, dim_}, {coords_.data() + j * dim_, dim_});
    if (d2 <= r_ * r_) return 1.0;
    return std::exp(0.5 * s_ * (std::log(r_ * r_) - std::log(d2)));
  }

  std::vector<double> coords_;
  std::size_t dim_;
  std::size_t size_;
  double r_;
  double s_;
  std::vector<double> cache_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace detail

/// sum_i sum_j w_i w_j phi_r^s(x_i - x_j), diagonal terms included.
inline double energy(const DiscreteMeasure& mu, double r, double s) {
  require(r > 0.0 && s > 0.0, "energy: r and s must be positive");
  detail::KernelMatrix kernel(mu.support(), r, s, 0);
  return detail::dot(mu.weights(), kernel.potentials(mu.weights()));
}

struct EnergyOptions {
  double gap_tolerance = 1e-8;
  int iterations_per_point = 10;
  int min_iterations = 1000;
  std::size_t max_support = 4096;
  int restarts = 5;
  std::size_t always_restart_below = 16;
  std::size_t cache_limit = 2048;
};

struct EnergyMinimum {
  DiscreteMeasure measure;
  double energy = 0.0;
  double gap = 0.0;  // max potential on the active set minus min potential overall
  int iterations = 0;
  bool converged = false;
  int starts = 1;
};

namespace detail {

struct DescentRun {
  std::vector<double> weights;
  double energy;
  double gap;
  int iterations;
  bool converged;
};

/// Pairwise conditional-gradient descent on w^T K w over the simplex: mass
/// moves from the active vertex of largest potential to the vertex of
/// smallest potential, with an exact line search on the quadratic.
inline DescentRun pairwise_descent(const KernelMatrix& kernel, std::vector<double> w, const EnergyOptions& options) {
  const std::size_t count = kernel.size();
  auto p = kernel.potentials(w);
  double e = dot(w, p);
  const int cap = std::max(options.min_iterations, options.iterations_per_point * static_cast<int>(count));
  std::vector<double> col_i, col_j;

  DescentRun run{std::move(w), e, INFINITY, 0, false};
  for (; run.iterations < cap; ++run.iterations) {
    std::size_t toward = 0, away = count;
    for (std::size_t k = 0; k < count; ++k) {
      if (p[k] < p[toward]) toward = k;
      if (run.weights[k] > 0.0 && (away == count || p[k] > p[away])) away = k;
    }
    run.gap = p[away] - p[toward];
    if (run.gap < options.gap_tolerance) {
      run.converged = true;
      break;
    }
    const double curvature = 2.0 - 2.0 * kernel(toward, away);
    const double limit = run.weights[away];
    const double step = curvature > 0.0 ? std::min(limit, run.gap / curvature) : limit;
    kernel.column(toward, col_i);
    kernel.column(away, col_j);
    run.weights[toward] += step;
    run.weights[away] = step == limit ? 0.0 : run.weights[away] - step;
    for (std::size_t k = 0; k < count; ++k) p[k] += step * (col_i[k] - col_j[k]);
  }
  // Renormalize against round-off before the final energy evaluation.
  double total = 0.0;
  for (double v : run.weights) total += v;
  for (double& v : run.weights) v /= total;
  p = kernel.potentials(run.weights);
  run.energy = dot(run.weights, p);
  return run;
}

}  // namespace detail

/// Weights on `support` approximately minimizing the energy. Starts from the
/// uniform measure; when the gap stalls at the iteration cap (or the support
/// is tiny) it also runs seeded random restarts and keeps the best iterate.
inline EnergyMinimum min_energy(const PointCloud& support, double r, double s, const EnergyOptions& options = {}) {
  require(!support.empty(), "min_energy: support must be non-empty");
  require(r > 0.0 && s > 0.0, "min_energy: r and s must be positive");
  if (support.size() > options.max_support)
    throw SizeLimitError("min_energy: support of " + std::to_string(support.size()) + " points exceeds the cap of " +
                         std::to_string(options.max_support) + "; reduce it with separated_set(F, r/2)");

  const detail::KernelMatrix kernel(support, r, s, options.cache_limit);
  const std::size_t count = support.size();
  auto best = detail::pairwise_descent(kernel, std::vector<double>(count, 1.0 / static_cast<double>(count)), options);
  int starts = 1;

  if (!best.converged || count <= options.always_restart_below) {
    for (int seed = 1; seed <= options.restarts; ++seed) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
      std::exponential_distribution<double> draw(1.0);
      std::vector<double> w(count);
      double total = 0.0;
      for (double& v : w) total += (v = draw(rng));
      for (double& v : w) v /= total;
      auto run = detail::pairwise_descent(kernel, std::move(w), options);
      ++starts;
      if (run.energy < best.energy) best = std::move(run);
    }
  }

  EnergyMinimum out{DiscreteMeasure(support, std::move(best.weights)), best.energy, best.gap, best.iterations,
                    best.converged, starts};
  return out;
}

struct CapacityResult {
  double capacity = 0.0;          // 1 / (least energy found)
  double certified_lower = 0.0;   // 1 / energy of the uniform measure on a maximal r-separated subset
  double energy = 0.0;
  std::size_t support_size = 0;
  bool reduced = false;           // support replaced by separated_set(F, r/2)
};

/// C_r^s(F). Both measures tried are supported on F, so each gives a valid
/// lower bound for the capacity; the larger one is reported.
inline CapacityResult capacity(const PointCloud& cloud, double r, double s, const EnergyOptions& options = {}) {
  require(!cloud.empty(), "capacity: empty set");
  CapacityResult out;
  PointCloud support = cloud;
  if (support.size() > options.max_support) {
    support = separated_set(cloud, r / 2);
    out.reduced = true;
  }
  const auto minimum = min_energy(support, r, s, options);
  const double separated_energy = energy(DiscreteMeasure::uniform(separated_set(cloud, r)), r, s);
  out.energy = std::min(minimum.energy, separated_energy);
  out.capacity = 1.0 / out.energy;
  out.certified_lower = 1.0 / separated_energy;
  out.support_size = support.size();
  return out;
}

// ---------------------------------------------------------------------------
// Lower bound from the uniform measure on a separated set
// ---------------------------------------------------------------------------

struct ProofMeasureBound {
  std::size_t separated_count = 0;  // N_r(F) as a maximal r-separated set
  double diameter = 0.0;
  int ring_count = 0;               // D = ceil(log2(2|F|/r))
  int split = 0;                    // B = ceil((1-theta) log2(1/r))
  double bound = 0.0;               // N_r(F) min{1, r^(alpha-s), r^((beta-s)(1-theta))}
  double uniform_energy = 0.0;      // energy of the uniform measure on the separated set
  double ring_energy_bound = 0.0;   // mean over x_i of sum_k 2^(-(k-1)s) mu(B(x_i, 2^k r))
  double near_rings = 0.0;          // part of ring_energy_bound from k < B
  double far_rings = 0.0;           // part from k >= B
};

inline double cloud_diameter(const PointCloud& cloud) {
  const auto coords = cloud.coordinates();
  const auto n = static_cast<std::size_t>(cloud.ambient_dim());
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j)
      best = std::max(best, squared_distance({coords.data() + i * n, n}, {coords.data() + j * n, n}));
  return std::sqrt(best);
}

/// Places mass 1/N_r(F) on each point of a maximal r-separated set and
/// compares its energy with the capacity lower bound that follows from
/// spectrum exponent alpha and Assouad exponent beta (constant dropped).
inline ProofMeasureBound proof_measure_bound(const PointCloud& cloud, double r, double s, double theta, double alpha,
                                             double beta) {
  require(!cloud.empty(), "proof_measure_bound: empty set");
  require(r > 0.0 && r < 1.0 && s > 0.0, "proof_measure_bound: need 0 < r < 1 and s > 0");
  require(theta > 0.0 && theta < 1.0, "proof_measure_bound: theta must lie in (0, 1)");
  require(alpha >= 0.0 && beta >= alpha, "proof_measure_bound: need 0 <= alpha <= beta");

  const auto separated = separated_set(cloud, r);
  ProofMeasureBound out;
  out.separated_count = separated.size();
  out.diameter = cloud_diameter(cloud);
  out.ring_count = out.diameter > 0.0 ? std::max(0, static_cast<int>(std::ceil(std::log2(2.0 * out.diameter / r)))) : 0;
  out.split = static_cast<int>(std::ceil((1.0 - theta) * std::log2(1.0 / r)));
  const double count = static_cast<double>(out.separated_count);
  out.bound = count * std::min({1.0, std::pow(r, alpha - s), std::pow(r, (beta - s) * (1.0 - theta))});
  out.uniform_energy = energy(DiscreteMeasure::uniform(separated), r, s);

  const auto coords = separated.coordinates();
  const auto n = static_cast<std::size_t>(separated.ambient_dim());
  const int rings = out.ring_count;
  std::vector<double> within(static_cast<std::size_t>(rings) + 1);
  for (std::size_t i = 0; i < separated.size(); ++i) {
    std::fill(within.begin(), within.end(), 0.0);
    for (std::size_t j = 0; j < separated.size(); ++j) {
      const double d = std::sqrt(squared_distance({coords.data() + i * n, n}, {coords.data() + j * n, n}));
      int k = 0;
      while (k <= rings && d > std::ldexp(r, k)) ++k;
      if (k <= rings) within[static_cast<std::size_t>(k)] += 1.0 / count;
    }
    double mass = 0.0;
    for (int k = 0; k <= rings; ++k) {
      mass += within[static_cast<std::size_t>(k)];  // mu(B(x_i, 2^k r))
      const double term = std::pow(2.0, -(k - 1) * s) * mass;
      (k < out.split ? out.near_rings : out.far_rings) += term / count;
    }
  }
  out.ring_energy_bound = out.near_rings + out.far_rings;
  return out;
}

/// Same with the separated set taken as the left endpoints of the depth-k
/// cells of X_S^n, r = 2^-k, which are pairwise at least r apart.
inline ProofMeasureBound proof_measure_bound(const DigitProduct& product, int k, double s, double theta, double alpha,
                                             double beta) {
  return proof_measure_bound(enumerate_cloud(product.set, product.dim, k), std::ldexp(1.0, -k), s, theta, alpha, beta);
}

// ---------------------------------------------------------------------------
// Dimension profiles
// ---------------------------------------------------------------------------

struct ProfileEstimate {
  double s = 0.0;
  ScaleSchedule schedule;
  std::vector<double> capacities;
  SlopeFit lower;
  SlopeFit upper;
};

/// Capacities C_{2^-k}^s(F) along the schedule and their log-log fits.
inline ProfileEstimate profile_estimate(const PointCloud& cloud, double s, const ScaleSchedule& schedule,
                                        const EnergyOptions& options = {}) {
  require(s > 0.0, "profile_estimate: s must be positive");
  ProfileEstimate out;
  out.s = s;
  out.schedule = schedule;
  out.capacities.resize(schedule.size());
  parallel_for(schedule.size(), [&](std::size_t i) {
    out.capacities[i] = capacity(cloud, schedule.scale(i), s, options).capacity;
  });
  std::vector<XYPair> series;
  for (std::size_t i = 0; i < schedule.size(); ++i)
    series.push_back({static_cast<double>(schedule.exponents()[i]), std::log2(out.capacities[i])});
  const auto fits = fit_both(series);
  out.lower = fits.lower;
  out.upper = fits.upper;
  return out;
}

/// Profile of X_S^n truncated at the finest scale of the schedule.
inline ProfileEstimate profile_estimate(const DigitProduct& product, double s, const ScaleSchedule& schedule,
                                        const EnergyOptions& options = {}) {
  return profile_estimate(enumerate_cloud(product.set, product.dim, std::min(schedule.back(), product.set.depth())), s,
                          schedule, options);
}

}  // namespace dimprof
