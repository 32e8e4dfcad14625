#pragma once

// Covering numbers on dyadic grids: box counts, maximal r-separated subsets,
// localized counts N_r(B(x,R) ∩ F), and the box / Assouad-spectrum / Assouad
// estimators built on them. Every estimator accepts either a finite
// PointCloud or a DigitProduct, whose counts are exact combinatorics.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dimprof/core.hpp"
#include "dimprof/digitsets.hpp"

namespace dimprof {

/// k such that r = 2^-k; throws InvalidInput when r is not a dyadic scale.
inline int dyadic_exponent(double r) {
  require(r > 0.0 && std::isfinite(r), "scale must be positive");
  int e = 0;
  const double mantissa = std::frexp(r, &e);
  require(mantissa == 0.5, "scale " + format_number(r) + " is not of the form 2^-k");
  return 1 - e;
}

namespace detail {

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : key) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Number of distinct depth-`level` cells among the given points.
inline std::uint64_t count_cells(const PointCloud& cloud, const std::vector<std::size_t>& indices, int level) {
  const int n = cloud.ambient_dim();
  const int shift = cloud.resolution() - level;
  if (indices.empty()) return 0;
  std::uint64_t largest = 0;
  for (auto i : indices)
    for (auto c : cloud.cell(i)) largest = std::max(largest, c >> shift);
  const int bits = std::max(1, static_cast<int>(std::bit_width(largest)));
  if (n * bits <= 64) {
    std::vector<std::uint64_t> keys;
    keys.reserve(indices.size());
    for (auto i : indices) {
      std::uint64_t key = 0;
      for (auto c : cloud.cell(i)) key = (key << bits) | (c >> shift);
      keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
  std::vector<std::vector<std::uint64_t>> keys;
  keys.reserve(indices.size());
  for (auto i : indices) {
    std::vector<std::uint64_t> key;
    for (auto c : cloud.cell(i)) key.push_back(c >> shift);
    keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

/// Buckets of point indices on a cubic grid of side `side`, for radius queries.
class GridIndex {
 public:
  GridIndex(const std::vector<double>& coords, int dim, double side) : coords_(&coords), dim_(dim), side_(side) {}

  std::vector<std::int64_t> key_of(const double* p) const {
    std::vector<std::int64_t> key(static_cast<std::size_t>(dim_));
    for (int d = 0; d < dim_; ++d) key[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(std::floor(p[d] / side_));
    return key;
  }

  void insert(std::size_t index) { buckets_[key_of(point(index))].push_back(index); }

  /// Calls visit(j) for every inserted point j in the 3^n cells around p.
  template <class Visit>
  void for_neighbors(const double* p, Visit&& visit) const {
    const auto base = key_of(p);
    std::vector<std::int64_t> key(base.size());
    std::vector<int> offset(base.size(), -1);
    while (true) {
      for (std::size_t d = 0; d < base.size(); ++d) key[d] = base[d] + offset[d];
      if (auto it = buckets_.find(key); it != buckets_.end())
        for (auto j : it->second) visit(j);
      std::size_t d = 0;
      while (d < offset.size() && offset[d] == 1) offset[d++] = -1;
      if (d == offset.size()) break;
      ++offset[d];
    }
  }

  const double* point(std::size_t i) const { return coords_->data() + i * static_cast<std::size_t>(dim_); }

 private:
  const std::vector<double>* coords_;
  int dim_;
  double side_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash> buckets_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Box counting
// ---------------------------------------------------------------------------

/// Number of half-open dyadic cells of side 2^-k meeting the cloud.
inline std::uint64_t box_count(const PointCloud& cloud, int k) {
  require(k >= 0 && k <= cloud.resolution(), "box_count: scale 2^-" + std::to_string(k) +
                                                  " is finer than the cloud resolution 2^-" +
                                                  std::to_string(cloud.resolution()));
  std::vector<std::size_t> all(cloud.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return detail::count_cells(cloud, all, k);
}

inline std::uint64_t box_count(const PointCloud& cloud, double r) { return box_count(cloud, dyadic_exponent(r)); }

// ---------------------------------------------------------------------------
// Separated sets
// ---------------------------------------------------------------------------

/// Indices of the greedy maximal r-separated subset (pairwise distances >= r),
/// scanning points in lexicographic order.
inline std::vector<std::size_t> separated_indices(const PointCloud& cloud, double r) {
  require(r > 0.0, "separated_set: r must be positive");
  const auto coords = cloud.coordinates();
  const int n = cloud.ambient_dim();
  detail::GridIndex grid(coords, n, r);
  const double r2 = r * r;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* p = grid.point(i);
    bool separated = true;
    grid.for_neighbors(p, [&](std::size_t j) {
      if (separated && squared_distance({p, static_cast<std::size_t>(n)}, {grid.point(j), static_cast<std::size_t>(n)}) < r2)
        separated = false;
    });
    if (separated) {
      kept.push_back(i);
      grid.insert(i);
    }
  }
  return kept;
}

inline PointCloud separated_set(const PointCloud& cloud, double r) {
  const auto kept = separated_indices(cloud, r);
  return cloud.subset(kept);
}

// ---------------------------------------------------------------------------
// Local counts
// ---------------------------------------------------------------------------

struct LocalCountRecord {
  std::vector<double> center;
  double R = 0.0;
  double r = 0.0;
  std::uint64_t count = 0;
};

/// N_r(B(x,R) ∩ F) as a box count at the dyadic scale r. The ball is open:
/// points at distance exactly R are excluded.
inline LocalCountRecord local_count(const PointCloud& cloud, std::span<const double> x, double R, double r) {
  require(R > 0.0, "local_count: R must be positive");
  require(x.size() == static_cast<std::size_t>(cloud.ambient_dim()), "local_count: center has the wrong dimension");
  const int k = dyadic_exponent(r);
  require(k <= cloud.resolution(), "local_count: r is finer than the cloud resolution");

  std::vector<std::uint64_t> key(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double scaled = std::ldexp(x[d], cloud.resolution());
    require(scaled >= 0.0 && scaled == std::floor(scaled), "local_count: center is not a point of F");
    key[d] = static_cast<std::uint64_t>(scaled);
  }
  require(cloud.find(key) < cloud.size(), "local_count: center is not a point of F");

  const auto coords = cloud.coordinates();
  const auto n = static_cast<std::size_t>(cloud.ambient_dim());
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (squared_distance(x, {coords.data() + i * n, n}) < R * R) inside.push_back(i);
  return {std::vector<double>(x.begin(), x.end()), R, r, detail::count_cells(cloud, inside, k)};
}

// ---------------------------------------------------------------------------
// Box dimension
// ---------------------------------------------------------------------------

struct BoxDimensionEstimate {
  SlopeFit lower;
  SlopeFit upper;
  std::vector<XYPair> log2_counts;  // (k, log2 N_{2^-k})
};

inline BoxDimensionEstimate box_dim_from_counts(std::vector<XYPair> series) {
  const auto fits = fit_both(series);
  return {fits.lower, fits.upper, std::move(series)};
}

inline BoxDimensionEstimate box_dim_estimate(const PointCloud& cloud, const ScaleSchedule& schedule) {
  require(!cloud.empty(), "box_dim_estimate: empty cloud");
  require(schedule.back() <= cloud.resolution(), "box_dim_estimate: schedule exceeds the cloud resolution 2^-" +
                                                     std::to_string(cloud.resolution()));
  std::vector<XYPair> series;
  for (int k : schedule.exponents())
    series.push_back({static_cast<double>(k), std::log2(static_cast<double>(box_count(cloud, k)))});
  return box_dim_from_counts(std::move(series));
}

/// Exact counts 2^(n #(S ∩ {1..k})); the schedule may go as deep as the truncation.
inline BoxDimensionEstimate box_dim_estimate(const DigitProduct& product, const ScaleSchedule& schedule) {
  require(schedule.back() <= product.set.depth(), "box_dim_estimate: schedule exceeds the digit-set depth");
  std::vector<XYPair> series;
  for (int k : schedule.exponents())
    series.push_back({static_cast<double>(k), static_cast<double>(exact_count(product.set, product.dim, k).log2_count)});
  return box_dim_from_counts(std::move(series));
}

// ---------------------------------------------------------------------------
// Assouad-type estimators
// ---------------------------------------------------------------------------

/// Scale pairs (R, r) = (2^-a, 2^-b) drawn from the schedule: a < b, b in the
/// tail half, and b >= a/theta when theta is given (r <= R^(1/theta)).
inline std::vector<std::pair<int, int>> admissible_pairs(const ScaleSchedule& schedule, std::optional<double> theta) {
  std::vector<std::pair<int, int>> pairs;
  const auto& ks = schedule.exponents();
  for (std::size_t j = schedule.tail_begin(); j < ks.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (theta && static_cast<double>(ks[j]) * *theta < static_cast<double>(ks[i]) - 1e-12) continue;
      pairs.emplace_back(ks[i], ks[j]);
    }
  }
  return pairs;
}

struct AssouadOptions {
  std::size_t max_centers = 512;
};

namespace detail {

/// max over admissible (a, b) and centers x of log2(N_b(B) / N_a(B)) / (b - a)
/// with B = B(x, 2^-a) ∩ F. Normalizing by the scale-R count of the same ball
/// absorbs the constant of the defining inequality.
inline SlopeFit local_exponent(const PointCloud& cloud, const std::vector<std::pair<int, int>>& pairs,
                               const AssouadOptions& options) {
  require(!pairs.empty(), "no admissible (R, r) scale pairs in the schedule");
  for (const auto& [a, b] : pairs)
    require(b <= cloud.resolution(), "Assouad estimate: schedule exceeds the cloud resolution");

  std::map<int, std::vector<int>> by_outer;
  for (const auto& [a, b] : pairs) by_outer[a].push_back(b);

  const auto coords = cloud.coordinates();
  const int n = cloud.ambient_dim();
  const auto un = static_cast<std::size_t>(n);

  double best = -INFINITY;
  for (const auto& [a, inners] : by_outer) {
    const double R = std::ldexp(1.0, -a);
    auto centers = separated_indices(cloud, R);
    if (centers.size() > options.max_centers) {
      std::vector<std::size_t> strided;
      for (std::size_t c = 0; c < options.max_centers; ++c) strided.push_back(centers[c * centers.size() / options.max_centers]);
      centers = std::move(strided);
    }
    GridIndex grid(coords, n, R);
    for (std::size_t i = 0; i < cloud.size(); ++i) grid.insert(i);

    std::vector<double> exponents(centers.size(), -INFINITY);
    parallel_for(centers.size(), [&](std::size_t c) {
      const double* x = grid.point(centers[c]);
      std::vector<std::size_t> ball;
      grid.for_neighbors(x, [&](std::size_t j) {
        if (squared_distance({x, un}, {grid.point(j), un}) < R * R) ball.push_back(j);
      });
      const double base = std::log2(static_cast<double>(count_cells(cloud, ball, a)));
      for (int b : inners) {
        const double e = (std::log2(static_cast<double>(count_cells(cloud, ball, b))) - base) / (b - a);
        exponents[c] = std::max(exponents[c], e);
      }
    });
    for (double e : exponents) best = std::max(best, e);
  }

  SlopeFit fit;
  fit.slope = best;
  fit.mode = FitMode::limsup;
  fit.scale_count = static_cast<int>(pairs.size());
  return fit;
}

inline SlopeFit local_exponent(const DigitProduct& product, const std::vector<std::pair<int, int>>& pairs) {
  require(!pairs.empty(), "no admissible (R, r) scale pairs in the schedule");
  double best = -INFINITY;
  for (const auto& [a, b] : pairs) {
    require(b <= product.set.depth(), "Assouad estimate: schedule exceeds the digit-set depth");
    best = std::max(best, static_cast<double>(exact_local_log2_count(product.set, product.dim, a, b)) / (b - a));
  }
  SlopeFit fit;
  fit.slope = best;
  fit.mode = FitMode::limsup;
  fit.scale_count = static_cast<int>(pairs.size());
  return fit;
}

}  // namespace detail

/// Upper Assouad spectrum at theta: the largest local exponent over scale
/// pairs with r <= R^(1/theta).
inline SlopeFit assouad_spectrum_estimate(const PointCloud& cloud, double theta, const ScaleSchedule& schedule,
                                          const AssouadOptions& options = {}) {
  require(theta > 0.0 && theta < 1.0, "assouad_spectrum_estimate: theta must lie in (0, 1)");
  return detail::local_exponent(cloud, admissible_pairs(schedule, theta), options);
}

inline SlopeFit assouad_spectrum_estimate(const DigitProduct& product, double theta, const ScaleSchedule& schedule) {
  require(theta > 0.0 && theta < 1.0, "assouad_spectrum_estimate: theta must lie in (0, 1)");
  return detail::local_exponent(product, admissible_pairs(schedule, theta));
}

/// Assouad dimension: the same search over every scale pair r < R.
inline SlopeFit assouad_estimate(const PointCloud& cloud, const ScaleSchedule& schedule,
                                 const AssouadOptions& options = {}) {
  return detail::local_exponent(cloud, admissible_pairs(schedule, std::nullopt), options);
}

inline SlopeFit assouad_estimate(const DigitProduct& product, const ScaleSchedule& schedule) {
  return detail::local_exponent(product, admissible_pairs(schedule, std::nullopt));
}

struct QuasiAssouadEstimate {
  std::vector<std::pair<double, double>> spectrum;  // (theta, estimate)
  double assouad = 0.0;
  double value = 0.0;  // extrapolation toward theta = 1, clamped to [spectrum(max theta), assouad]
};

inline constexpr std::array<double, 4> kQuasiAssouadThetas{0.5, 0.75, 0.9, 0.95};

namespace detail {

template <class Set, class... Extra>
QuasiAssouadEstimate quasi_assouad(const Set& set, const ScaleSchedule& schedule, const Extra&... extra) {
  QuasiAssouadEstimate out;
  for (double theta : kQuasiAssouadThetas) {
    if (admissible_pairs(schedule, theta).empty()) continue;
    out.spectrum.emplace_back(theta, assouad_spectrum_estimate(set, theta, schedule, extra...).slope);
  }
  out.assouad = assouad_estimate(set, schedule, extra...).slope;
  require(!out.spectrum.empty(), "quasi_assouad_estimate: no theta in the grid has admissible pairs");
  double value = out.spectrum.back().second;
  if (out.spectrum.size() >= 2) {
    const auto [t0, v0] = out.spectrum[out.spectrum.size() - 2];
    const auto [t1, v1] = out.spectrum.back();
    value = v1 + (v1 - v0) / (t1 - t0) * (1.0 - t1);
  }
  out.value = std::clamp(value, out.spectrum.back().second, std::max(out.assouad, out.spectrum.back().second));
  return out;
}

}  // namespace detail

inline QuasiAssouadEstimate quasi_assouad_estimate(const PointCloud& cloud, const ScaleSchedule& schedule,
                                                   const AssouadOptions& options = {}) {
  return detail::quasi_assouad(cloud, schedule, options);
}

inline QuasiAssouadEstimate quasi_assouad_estimate(const DigitProduct& product, const ScaleSchedule& schedule) {
  return detail::quasi_assouad(product, schedule);
}

}  // namespace dimprof
