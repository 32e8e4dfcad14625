#pragma once

// Shared value types for the dimension-profile toolkit: dyadic point clouds,
// subspace frames, scale schedules and log-log slope fits.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dimprof {

/// Raised when an operation's preconditions are violated (CLI exit code 2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation would exceed a configured size cap (CLI exit code 3).
class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// PointCloud
// ---------------------------------------------------------------------------

/// A finite set of distinct points whose coordinates are non-negative integer
/// multiples of 2^-resolution. Points are kept in lexicographic order, which
/// fixes every greedy tie-break downstream.
class PointCloud {
 public:
  PointCloud() = default;

  /// `cells` holds size()*ambient_dim integer coordinates, row-major.
  /// Throws InvalidInput on duplicate points.
  PointCloud(int ambient_dim, int resolution, std::vector<std::uint64_t> cells)
      : dim_(ambient_dim), resolution_(resolution) {
    require(ambient_dim >= 1, "point cloud: ambient dimension must be >= 1");
    require(resolution >= 0 && resolution <= 62, "point cloud: resolution must lie in [0, 62]");
    require(cells.size() % static_cast<std::size_t>(ambient_dim) == 0,
            "point cloud: coordinate count is not a multiple of the dimension");
    cells_ = sort_rows(std::move(cells), static_cast<std::size_t>(ambient_dim));
    for (std::size_t i = 1; i < size(); ++i) {
      require(!std::equal(row_begin(i - 1), row_begin(i), row_begin(i)),
              "point cloud: points must be pairwise distinct");
    }
  }

  /// Same as the constructor but silently merges duplicate points.
  static PointCloud deduplicated(int ambient_dim, int resolution, std::vector<std::uint64_t> cells) {
    const auto n = static_cast<std::size_t>(ambient_dim);
    require(ambient_dim >= 1 && cells.size() % n == 0, "point cloud: malformed coordinates");
    auto sorted = sort_rows(std::move(cells), n);
    std::vector<std::uint64_t> unique;
    unique.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); i += n) {
      if (i > 0 && std::equal(sorted.begin() + static_cast<std::ptrdiff_t>(i - n),
                              sorted.begin() + static_cast<std::ptrdiff_t>(i),
                              sorted.begin() + static_cast<std::ptrdiff_t>(i)))
        continue;
      unique.insert(unique.end(), sorted.begin() + static_cast<std::ptrdiff_t>(i),
                    sorted.begin() + static_cast<std::ptrdiff_t>(i + n));
    }
    return PointCloud(ambient_dim, resolution, std::move(unique));
  }

  int ambient_dim() const { return dim_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return dim_ == 0 ? 0 : cells_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return cells_.empty(); }

  std::span<const std::uint64_t> cell(std::size_t i) const {
    return {cells_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<std::uint64_t>& cells() const { return cells_; }

  double coordinate(std::size_t i, int axis) const {
    return std::ldexp(static_cast<double>(cells_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)]),
                      -resolution_);
  }

  std::vector<double> point(std::size_t i) const {
    std::vector<double> p(static_cast<std::size_t>(dim_));
    for (int d = 0; d < dim_; ++d) p[static_cast<std::size_t>(d)] = coordinate(i, d);
    return p;
  }

  /// All coordinates as doubles, row-major.
  std::vector<double> coordinates() const {
    std::vector<double> out(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = std::ldexp(static_cast<double>(cells_[i]), -resolution_);
    return out;
  }

  /// True when every coordinate lies in [0, 1].
  bool in_unit_cube() const {
    const std::uint64_t one = std::uint64_t{1} << resolution_;
    return std::all_of(cells_.begin(), cells_.end(), [one](std::uint64_t c) { return c <= one; });
  }

  /// Index of the point equal to `cell`, or size() if absent.
  std::size_t find(std::span<const std::uint64_t> target) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      auto c = cell(mid);
      if (std::lexicographical_compare(c.begin(), c.end(), target.begin(), target.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < size() && std::equal(target.begin(), target.end(), cell(lo).begin())) return lo;
    return size();
  }

  /// Subcloud made of the points at the given indices.
  PointCloud subset(std::span<const std::size_t> indices) const {
    std::vector<std::uint64_t> out;
    out.reserve(indices.size() * static_cast<std::size_t>(dim_));
    for (auto i : indices) {
      auto c = cell(i);
      out.insert(out.end(), c.begin(), c.end());
    }
    return PointCloud(dim_, resolution_, std::move(out));
  }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  const std::uint64_t* row_begin(std::size_t i) const { return cells_.data() + i * static_cast<std::size_t>(dim_); }

  static std::vector<std::uint64_t> sort_rows(std::vector<std::uint64_t> cells, std::size_t n) {
    const std::size_t rows = cells.size() / n;
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(cells.begin() + static_cast<std::ptrdiff_t>(a * n),
                                          cells.begin() + static_cast<std::ptrdiff_t>(a * n + n),
                                          cells.begin() + static_cast<std::ptrdiff_t>(b * n),
                                          cells.begin() + static_cast<std::ptrdiff_t>(b * n + n));
    });
    std::vector<std::uint64_t> out;
    out.reserve(cells.size());
    for (auto r : order)
      out.insert(out.end(), cells.begin() + static_cast<std::ptrdiff_t>(r * n),
                 cells.begin() + static_cast<std::ptrdiff_t>(r * n + n));
    return out;
  }

  int dim_ = 0;
  int resolution_ = 0;
  std::vector<std::uint64_t> cells_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Subspace
// ---------------------------------------------------------------------------

/// An m-dimensional subspace of R^n, stored as m orthonormal n-vectors.
class Subspace {
 public:
  Subspace() = default;

  Subspace(int ambient_dim, int dim, std::vector<double> frame)
      : n_(ambient_dim), m_(dim), frame_(std::move(frame)) {
    require(ambient_dim >= 1 && dim >= 1 && dim <= ambient_dim, "subspace: need 1 <= m <= n");
    require(frame_.size() == static_cast<std::size_t>(n_ * m_), "subspace: frame has wrong size");
    for (int a = 0; a < m_; ++a) {
      for (int b = a; b < m_; ++b) {
        double dot = 0.0;
        for (int i = 0; i < n_; ++i) dot += (*this)(a, i) * (*this)(b, i);
        require(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-12, "subspace: frame is not orthonormal");
      }
    }
  }

  /// span{e_0, ..., e_{m-1}}
  static Subspace coordinate(int ambient_dim, int dim) {
    std::vector<double> frame(static_cast<std::size_t>(ambient_dim * dim), 0.0);
    for (int a = 0; a < dim; ++a) frame[static_cast<std::size_t>(a * ambient_dim + a)] = 1.0;
    return Subspace(ambient_dim, dim, std::move(frame));
  }

  int ambient_dim() const { return n_; }
  int dim() const { return m_; }
  const std::vector<double>& frame() const { return frame_; }

  /// Component `i` of frame vector `a`.
  double operator()(int a, int i) const { return frame_[static_cast<std::size_t>(a * n_ + i)]; }

  friend bool operator==(const Subspace&, const Subspace&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> frame_;
};

// ---------------------------------------------------------------------------
// ScaleSchedule
// ---------------------------------------------------------------------------

/// Decreasing dyadic scales r_i = 2^-k_i, stored by their exponents.
class ScaleSchedule {
 public:
  ScaleSchedule() : ScaleSchedule(range(8, 40, 2)) {}

  explicit ScaleSchedule(std::vector<int> exponents) : exponents_(std::move(exponents)) {
    require(exponents_.size() >= 3, "schedule: at least 3 scales are required");
    require(exponents_.front() >= 1, "schedule: all scales must lie in (0, 1)");
    for (std::size_t i = 1; i < exponents_.size(); ++i)
      require(exponents_[i] > exponents_[i - 1], "schedule: exponents must be strictly increasing");
  }

  static std::vector<int> range(int first, int last, int step) {
    require(step >= 1, "schedule: step must be positive");
    std::vector<int> ks;
    for (int k = first; k <= last; k += step) ks.push_back(k);
    return ks;
  }

  /// Parses "8:40:2" (first:last:step), "8:40" (step 1) or "8,10,12".
  static ScaleSchedule parse(const std::string& text) {
    auto to_int = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw InvalidInput("");
        return v;
      } catch (const std::exception&) {
        throw InvalidInput("schedule: cannot parse '" + text + "'");
      }
    };
    std::vector<std::string> parts;
    const char sep = text.find(':') != std::string::npos ? ':' : ',';
    std::size_t start = 0;
    while (true) {
      auto pos = text.find(sep, start);
      parts.push_back(text.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (sep == ':') {
      require(parts.size() == 2 || parts.size() == 3, "schedule: expected first:last[:step]");
      return ScaleSchedule(range(to_int(parts[0]), to_int(parts[1]), parts.size() == 3 ? to_int(parts[2]) : 1));
    }
    std::vector<int> ks;
    for (const auto& p : parts) ks.push_back(to_int(p));
    return ScaleSchedule(std::move(ks));
  }

  const std::vector<int>& exponents() const { return exponents_; }
  std::size_t size() const { return exponents_.size(); }
  int front() const { return exponents_.front(); }
  int back() const { return exponents_.back(); }
  double scale(std::size_t i) const { return std::ldexp(1.0, -exponents_[i]); }

  /// Index of the first entry of the tail half used by the limsup/liminf fits.
  std::size_t tail_begin() const { return std::max<std::size_t>(1, exponents_.size() / 2); }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < exponents_.size(); ++i) out += (i ? "," : "") + std::to_string(exponents_[i]);
    return out;
  }

 private:
  std::vector<int> exponents_;
};

// ---------------------------------------------------------------------------
// Slope fitting
// ---------------------------------------------------------------------------

enum class FitMode { limsup, liminf, least_squares };

inline const char* to_string(FitMode mode) {
  switch (mode) {
    case FitMode::limsup: return "limsup";
    case FitMode::liminf: return "liminf";
    case FitMode::least_squares: return "least_squares";
  }
  return "?";
}

/// A dimension estimate: the slope of log-count against -log r.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  int scale_count = 0;
  FitMode mode = FitMode::least_squares;
};

struct XYPair {
  double x;
  double y;
};

/// Fits `pairs` (x strictly increasing, at least 3 entries).
///
/// least_squares is ordinary least squares. limsup/liminf shift the first pair
/// to the origin and return the largest/smallest secant slope y_i/x_i over the
/// tail half of the pairs, the finite-scale stand-in for the ratio
/// log N_r / -log r.
inline SlopeFit fit_slope(std::span<const XYPair> pairs, FitMode mode) {
  require(pairs.size() >= 3, "fit_slope: at least 3 pairs are required");
  for (std::size_t i = 1; i < pairs.size(); ++i)
    require(pairs[i].x > pairs[i - 1].x, "fit_slope: x values must be strictly increasing");

  SlopeFit fit;
  fit.mode = mode;
  fit.scale_count = static_cast<int>(pairs.size());

  if (mode == FitMode::least_squares) {
    const double count = static_cast<double>(pairs.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : pairs) {
      mx += p.x;
      my += p.y;
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : pairs) {
      sxx += (p.x - mx) * (p.x - mx);
      sxy += (p.x - mx) * (p.y - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (const auto& p : pairs)
      fit.max_residual = std::max(fit.max_residual, std::abs(p.y - (fit.intercept + fit.slope * p.x)));
    return fit;
  }

  const XYPair anchor = pairs.front();
  const std::size_t tail = std::max<std::size_t>(1, pairs.size() / 2);
  bool first = true;
  for (std::size_t i = tail; i < pairs.size(); ++i) {
    const double secant = (pairs[i].y - anchor.y) / (pairs[i].x - anchor.x);
    if (first || (mode == FitMode::limsup ? secant > fit.slope : secant < fit.slope)) fit.slope = secant;
    first = false;
  }
  fit.intercept = anchor.y - fit.slope * anchor.x;
  for (std::size_t i = tail; i < pairs.size(); ++i)
    fit.max_residual = std::max(fit.max_residual, std::abs(pairs[i].y - (fit.intercept + fit.slope * pairs[i].x)));
  return fit;
}

inline SlopeFit fit_slope(const std::vector<XYPair>& pairs, FitMode mode) {
  return fit_slope(std::span<const XYPair>(pairs), mode);
}

/// Lower/upper pair of fits produced by every dimension estimator.
struct DimensionFits {
  SlopeFit lower;
  SlopeFit upper;
};

inline DimensionFits fit_both(const std::vector<XYPair>& pairs) {
  return {fit_slope(pairs, FitMode::liminf), fit_slope(pairs, FitMode::limsup)};
}

// ---------------------------------------------------------------------------
// Parallelism
// ---------------------------------------------------------------------------

/// Worker count: hardware concurrency capped by DIMPROFILES_THREADS.
inline unsigned worker_count() {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("DIMPROFILES_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) workers = std::min(workers, static_cast<unsigned>(v));
  }
  return workers;
}

/// Runs body(i) for i in [0, count). Tasks must be independent; any exception
/// from a task is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dimprof
