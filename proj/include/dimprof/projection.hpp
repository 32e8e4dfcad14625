#pragma once

// Random subspaces of R^n, orthogonal projections of point clouds, and
// covering numbers of projections of X_S^n computed from its sumset structure
// X_S^n = sum over j in S of {0, 2^-j}^n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dimprof/bounds.hpp"
#include "dimprof/core.hpp"
#include "dimprof/covering.hpp"
#include "dimprof/digitsets.hpp"

namespace dimprof {

/// Orthonormalized frame of m independent standard normal vectors in R^n.
/// The QR factor signs are fixed so that diag(R) > 0, which makes the law of
/// the frame rotation invariant.
inline Subspace sample_subspace(int n, int m, std::uint64_t seed) {
  require(m >= 1 && m <= n, "sample_subspace: need 1 <= m <= n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 32; ++attempt) {
    Eigen::MatrixXd draw(n, m);
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i) draw(i, a) = normal(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(draw);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
    bool degenerate = false;
    for (int a = 0; a < m; ++a) degenerate = degenerate || std::abs(r(a, a)) < 1e-10;
    if (degenerate) continue;
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    std::vector<double> frame(static_cast<std::size_t>(n * m));
    for (int a = 0; a < m; ++a) {
      const double sign = r(a, a) < 0 ? -1.0 : 1.0;
      for (int i = 0; i < n; ++i) frame[static_cast<std::size_t>(a * n + i)] = sign * q(i, a);
    }
    return Subspace(n, m, std::move(frame));
  }
  throw std::runtime_error("sample_subspace: repeated rank-deficient draws");
}

/// Raw coordinates <x, v_a> of every point, row-major (size() x m).
inline std::vector<double> project_coordinates(const PointCloud& cloud, const Subspace& v) {
  require(cloud.ambient_dim() == v.ambient_dim(), "project: ambient dimensions differ");
  const int n = v.ambient_dim(), m = v.dim();
  std::vector<double> out(cloud.size() * static_cast<std::size_t>(m), 0.0);
  for (std::size_t p = 0; p < cloud.size(); ++p)
    for (int a = 0; a < m; ++a) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += v(a, i) * cloud.coordinate(p, i);
      out[p * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)] = acc;
    }
  return out;
}

/// -sum_i min(v_ai, 0): translating by this moves the projection of [0,1]^n
/// into the non-negative orthant without changing any distance.
inline std::vector<double> projection_shift(const Subspace& v) {
  std::vector<double> shift(static_cast<std::size_t>(v.dim()), 0.0);
  for (int a = 0; a < v.dim(); ++a)
    for (int i = 0; i < v.ambient_dim(); ++i) shift[static_cast<std::size_t>(a)] -= std::min(v(a, i), 0.0);
  return shift;
}

/// pi_V F as an m-dimensional cloud: coordinates translated by
/// projection_shift(V) and rounded to the grid of side 2^-(K+2), K the input
/// resolution. Points that land on the same grid node are merged.
inline PointCloud project(const PointCloud& cloud, const Subspace& v) {
  require(cloud.resolution() <= 60, "project: input resolution must be <= 60");
  const auto raw = project_coordinates(cloud, v);
  const auto shift = projection_shift(v);
  const int level = cloud.resolution() + 2;
  const auto m = static_cast<std::size_t>(v.dim());
  std::vector<std::uint64_t> cells(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double shifted = std::max(0.0, raw[i] + shift[i % m]);
    cells[i] = static_cast<std::uint64_t>(std::llround(std::ldexp(shifted, level)));
  }
  return PointCloud::deduplicated(v.dim(), level, std::move(cells));
}

// ---------------------------------------------------------------------------
// Sumset counting
// ---------------------------------------------------------------------------

struct ProjectionCountOptions {
  int guard_bits = 6;                         // working grid is 2^-(max k + guard_bits)
  std::size_t max_points = std::size_t{1} << 24;
};

/// Occupied 2^-k cells of the (translated) projection. `count` uses the
/// computed point positions; every cell in [lo, hi] bounds holds for the exact
/// projection and for project() followed by box_count.
struct ProjectionCount {
  int k = 0;
  std::uint64_t count = 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

namespace detail {

/// Sorted-row union of `rows` and `rows + shift` (rows of width m).
inline std::vector<std::int64_t> fold_generator(const std::vector<std::int64_t>& rows, std::span<const std::int64_t> g,
                                                std::size_t m) {
  std::vector<std::int64_t> out;
  out.reserve(rows.size() * 2);
  const std::size_t count = rows.size() / m;
  std::vector<std::int64_t> moved(m);
  std::size_t i = 0, j = 0;
  auto less = [&](const std::int64_t* a, const std::int64_t* b) {
    return std::lexicographical_compare(a, a + m, b, b + m);
  };
  auto push = [&](const std::int64_t* row) {
    const std::size_t size = out.size();
    if (size >= m && std::equal(row, row + m, out.data() + size - m)) return;
    out.insert(out.end(), row, row + m);
  };
  while (i < count || j < count) {
    if (j < count)
      for (std::size_t a = 0; a < m; ++a) moved[a] = rows[j * m + a] + g[a];
    if (j >= count || (i < count && !less(moved.data(), rows.data() + i * m))) {
      push(rows.data() + i * m);
      ++i;
    } else {
      push(moved.data());
      ++j;
    }
  }
  return out;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

inline std::uint64_t distinct_rows(std::vector<std::int64_t> rows, std::size_t m) {
  if (rows.empty()) return 0;
  const std::size_t count = rows.size() / m;
  if (m == 1) {
    std::sort(rows.begin(), rows.end());
    return static_cast<std::uint64_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t r) { return rows.data() + r * m; };
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(row(x), row(x) + m, row(y), row(y) + m);
  });
  std::uint64_t distinct = 0;
  for (std::size_t i = 0; i < count; ++i)
    if (i == 0 || !std::equal(row(order[i]), row(order[i]) + m, row(order[i - 1]))) ++distinct;
  return distinct;
}

}  // namespace detail

/// Covering numbers of pi_V(X_S^n truncated at depth K) at every 2^-k, k in
/// `ks`. The set is built by folding the generators 2^-j pi_V(e_i) on an
/// integer grid of side delta = 2^-(max k + guard_bits); rounding errors are
/// summed exactly into a per-axis radius that yields the [lo, hi] interval.
inline std::vector<ProjectionCount> project_counts(const DigitSet& set, int n, int depth, const Subspace& subspace,
                                                   const std::vector<int>& ks, const ProjectionCountOptions& opts = {}) {
  require(n >= 1, "project_count: dimension must be >= 1");
  require(depth >= 0 && depth <= set.depth(), "project_count: depth exceeds the truncation depth");
  require(!ks.empty(), "project_count: no scales requested");
  require(opts.guard_bits >= 1, "project_count: guard_bits must be >= 1");
  const Subspace v = subspace.dim() == n ? Subspace::coordinate(n, n) : subspace;
  require(v.ambient_dim() == n, "project_count: subspace lives in the wrong ambient space");
  const int kmax = *std::max_element(ks.begin(), ks.end());
  for (int k : ks) require(k >= 0 && k <= depth + 2, "project_count: need 0 <= k <= depth + 2");
  const int grid = kmax + opts.guard_bits;
  require(grid <= 56, "project_count: scale too fine for 64-bit grid arithmetic");

  const auto m = static_cast<std::size_t>(v.dim());
  std::vector<double> radius(m, 0.0);  // in grid units
  std::vector<std::vector<std::int64_t>> generators;
  for (int j = depth; j >= 1; --j) {
    if (!set.contains(j)) continue;
    for (int i = 0; i < n; ++i) {
      std::vector<std::int64_t> g(m);
      bool nonzero = false;
      for (std::size_t a = 0; a < m; ++a) {
        const double exact = std::ldexp(v(static_cast<int>(a), i), grid - j);
        g[a] = std::llround(exact);
        radius[a] += std::abs(exact - static_cast<double>(g[a]));
        nonzero = nonzero || g[a] != 0;
      }
      if (nonzero) generators.push_back(std::move(g));
    }
  }

  std::vector<std::int64_t> points(m, 0);
  for (const auto& g : generators) {
    points = detail::fold_generator(points, g, m);
    if (points.size() / m > opts.max_points) {
      const double excess = std::log2(static_cast<double>(points.size() / m) / static_cast<double>(opts.max_points));
      throw SizeLimitError("project_count: more than " + std::to_string(opts.max_points) +
                           " working points; try k <= " +
                           std::to_string(kmax - static_cast<int>(std::ceil(excess / static_cast<double>(m)))) +
                           " or fewer guard bits");
    }
  }

  const auto shift = projection_shift(v);
  std::vector<std::int64_t> offset(m);
  std::vector<std::int64_t> slack(m);
  for (std::size_t a = 0; a < m; ++a) {
    const double exact = std::ldexp(shift[a], grid);
    offset[a] = std::llround(exact);
    // Rounding of the shift, half a step of the 2^-(depth+2) grid used by
    // project(), and a margin for floating-point summation.
    const double total = radius[a] + std::abs(exact - static_cast<double>(offset[a])) +
                         std::ldexp(1.0, grid - depth - 3) + 1e-6 * (radius[a] + 1.0);
    slack[a] = static_cast<std::int64_t>(std::ceil(total)) + 1;
  }

  const std::size_t count = points.size() / m;
  std::vector<ProjectionCount> out;
  for (int k : ks) {
    const std::int64_t side = std::int64_t{1} << (grid - k);
    std::vector<std::int64_t> centre, certain, touched;
    centre.reserve(points.size());
    std::vector<std::int64_t> low(m), high(m), cursor(m);
    for (std::size_t p = 0; p < count; ++p) {
      bool sure = true;
      for (std::size_t a = 0; a < m; ++a) {
        const std::int64_t z = points[p * m + a] + offset[a];
        centre.push_back(detail::floor_div(z, side));
        low[a] = detail::floor_div(z - slack[a], side);
        high[a] = detail::floor_div(z + slack[a], side);
        sure = sure && low[a] == high[a];
      }
      if (sure) certain.insert(certain.end(), low.begin(), low.end());
      cursor = low;
      for (;;) {
        touched.insert(touched.end(), cursor.begin(), cursor.end());
        std::size_t a = 0;
        while (a < m && cursor[a] == high[a]) cursor[a] = low[a], ++a;
        if (a == m) break;
        ++cursor[a];
      }
    }
    ProjectionCount result;
    result.k = k;
    result.count = detail::distinct_rows(std::move(centre), m);
    result.lo = detail::distinct_rows(std::move(certain), m);
    result.hi = detail::distinct_rows(std::move(touched), m);
    out.push_back(result);
  }
  return out;
}

inline ProjectionCount project_count(const DigitSet& set, int n, int depth, const Subspace& v, int k,
                                     const ProjectionCountOptions& opts = {}) {
  return project_counts(set, n, depth, v, {k}, opts).front();
}

// ---------------------------------------------------------------------------
// Experiments over random subspaces
// ---------------------------------------------------------------------------

struct ProjectionTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  Subspace subspace;
  std::vector<ProjectionCount> counts;
  SlopeFit upper;  // limsup fit of log2 count against k
  SlopeFit lower;
};

struct ProjectionExperiment {
  int n = 0;
  int m = 0;
  int depth = 0;
  ScaleSchedule schedule;
  std::vector<ProjectionTrial> trials;
  double min_upper = 0.0;
  double median_upper = 0.0;
  double max_upper = 0.0;
  BoxDimensionEstimate source;   // exact-count estimate for X_S^n on the same schedule
  AnalyticDimensions analytic;
  std::optional<BoundReport<double>> bounds;  // absent when m = n
  std::optional<double> sharpness;            // d for block constructions
};

/// Sharpness value d for sets built by sharpness_set, else nullopt.
inline std::optional<double> sharpness_of(const DigitSet& set, int m) {
  if (const auto* rule = std::get_if<BlockRule>(&set.rule())) return sharpness_value(m, rule->s, rule->t);
  return std::nullopt;
}

/// One trial per seed base_seed, base_seed + 1, ...; trials run concurrently
/// and are merged in trial order, so the report depends only on the inputs.
inline ProjectionExperiment projection_experiment(const DigitSet& set, int n, int m, int trials,
                                                  const ScaleSchedule& schedule, std::uint64_t base_seed,
                                                  const ProjectionCountOptions& opts = {}) {
  require(trials >= 1, "projection_experiment: need at least one trial");
  require(m >= 1 && m <= n, "projection_experiment: need 1 <= m <= n");
  ProjectionExperiment out;
  out.n = n;
  out.m = m;
  out.depth = std::min(set.depth(), 60);
  out.schedule = schedule;
  out.trials.resize(static_cast<std::size_t>(trials));
  parallel_for(out.trials.size(), [&](std::size_t t) {
    auto& trial = out.trials[t];
    trial.trial = static_cast<int>(t);
    trial.seed = base_seed + t;
    trial.subspace = m == n ? Subspace::coordinate(n, n) : sample_subspace(n, m, trial.seed);
    trial.counts = project_counts(set, n, out.depth, trial.subspace, schedule.exponents(), opts);
    std::vector<XYPair> series;
    for (const auto& c : trial.counts)
      series.push_back({static_cast<double>(c.k), std::log2(static_cast<double>(c.count))});
    const auto fits = fit_both(series);
    trial.upper = fits.upper;
    trial.lower = fits.lower;
  });

  std::vector<double> uppers;
  for (const auto& trial : out.trials) uppers.push_back(trial.upper.slope);
  std::sort(uppers.begin(), uppers.end());
  out.min_upper = uppers.front();
  out.max_upper = uppers.back();
  const std::size_t mid = uppers.size() / 2;
  out.median_upper = uppers.size() % 2 ? uppers[mid] : 0.5 * (uppers[mid - 1] + uppers[mid]);

  out.source = box_dim_estimate(DigitProduct{set, n}, schedule);
  out.analytic = analytic_dims(set, n);
  if (m < n) {
    BoundInputs<double> in;
    in.ubd = out.analytic.box;
    in.ad = out.analytic.assouad;
    in.m = m;
    in.n = n;
    out.bounds = bound_formulas(in);
  }
  out.sharpness = sharpness_of(set, m);
  return out;
}

}  // namespace dimprof
