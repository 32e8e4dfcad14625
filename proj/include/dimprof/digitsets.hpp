#pragma once

// Digit-restriction sets S ⊆ N and the product sets X_S^n ⊆ [0,1]^n whose
// points have binary digits supported on S. Covering numbers of X_S^n are
// exact combinatorics: a depth-k dyadic cell is identified by its left
// endpoint, i.e. by a digit vector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dimprof/core.hpp"

namespace dimprof {

/// k ∈ S iff k mod period ∈ residues (k >= 1). For a shifted copy A + k_j the
/// test is applied to k - k_j.
struct PeriodicRule {
  int period = 1;
  std::vector<int> residues{0};

  bool contains(long offset) const {
    const long r = ((offset % period) + period) % period;
    return std::binary_search(residues.begin(), residues.end(), static_cast<int>(r));
  }
  double density() const { return static_cast<double>(residues.size()) / period; }

  friend bool operator==(const PeriodicRule&, const PeriodicRule&) = default;
};

struct ExplicitRule {
  std::vector<int> members;
  friend bool operator==(const ExplicitRule&, const ExplicitRule&) = default;
};

/// S = ⋃_j (A + k_j) ∩ {k_j, ..., floor(s/(s-t) k_j)}.
struct BlockRule {
  double s = 2.0;
  double t = 1.0;
  int ambient_dim = 2;
  PeriodicRule base;
  std::vector<int> starts;

  int block_end(int start) const { return static_cast<int>(std::floor(s * start / (s - t) + 1e-9)); }

  friend bool operator==(const BlockRule&, const BlockRule&) = default;
};

using DigitRule = std::variant<PeriodicRule, ExplicitRule, BlockRule>;

/// A digit set S truncated at depth K, with optional analytic density targets
/// recorded by the generator that built it.
class DigitSet {
 public:
  DigitSet(DigitRule rule, int depth) : rule_(std::move(rule)), depth_(depth) {
    require(depth >= 1, "digit set: depth must be >= 1");
    member_.assign(static_cast<std::size_t>(depth) + 1, 0);
    std::visit([this](const auto& r) { materialize(r); }, rule_);
    prefix_.assign(member_.size(), 0);
    for (std::size_t k = 1; k < member_.size(); ++k) prefix_[k] = prefix_[k - 1] + member_[k];
  }

  const DigitRule& rule() const { return rule_; }
  int depth() const { return depth_; }

  bool contains(int k) const { return k >= 1 && k <= depth_ && member_[static_cast<std::size_t>(k)]; }

  /// #(S ∩ {1..k}); k is clamped to [0, depth].
  int count_upto(int k) const { return prefix_[static_cast<std::size_t>(std::clamp(k, 0, depth_))]; }

  /// #(S ∩ {lo..hi}), clamped to {1..depth}.
  int count_between(int lo, int hi) const {
    if (hi < lo) return 0;
    return count_upto(hi) - count_upto(lo - 1);
  }

  int size() const { return prefix_.back(); }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int k = 1; k <= depth_; ++k)
      if (contains(k)) out.push_back(k);
    return out;
  }

  std::optional<double> target_upper_density;
  std::optional<double> target_banach_density;
  std::vector<std::string> warnings;

 private:
  void materialize(const PeriodicRule& r) {
    for (int k = 1; k <= depth_; ++k) member_[static_cast<std::size_t>(k)] = r.contains(k);
  }
  void materialize(const ExplicitRule& r) {
    for (int k : r.members) {
      require(k >= 1 && k <= depth_, "digit set: member " + std::to_string(k) + " outside {1.." +
                                         std::to_string(depth_) + "}");
      member_[static_cast<std::size_t>(k)] = 1;
    }
  }
  void materialize(const BlockRule& r) {
    for (int start : r.starts) {
      const int end = std::min(r.block_end(start), depth_);
      for (int k = start; k <= end; ++k) member_[static_cast<std::size_t>(k)] = r.base.contains(k - start);
    }
  }

  DigitRule rule_;
  int depth_;
  std::vector<std::uint8_t> member_;
  std::vector<int> prefix_;
};

/// X_S^n: the n-fold product of the digit-restriction set.
struct DigitProduct {
  DigitSet set;
  int dim = 1;
};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline DigitSet periodic_set(int period, std::vector<int> residues, int depth) {
  require(period >= 1, "periodic_set: period must be >= 1");
  require(depth >= period, "periodic_set: depth must be at least the period");
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  for (int r : residues) require(r >= 0 && r < period, "periodic_set: residues must lie in {0..q-1}");
  PeriodicRule rule{period, residues};
  DigitSet set(rule, depth);
  set.target_upper_density = rule.density();
  set.target_banach_density = rule.density();
  return set;
}

inline DigitSet explicit_set(std::vector<int> members, int depth) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return DigitSet(ExplicitRule{std::move(members)}, depth);
}

/// Periodic rule of density p/q with residues spread as evenly as possible, so
/// that every window of any length holds within one member of its share.
inline PeriodicRule evenly_spread_rule(int members, int period) {
  require(period >= 1 && members >= 0 && members <= period, "evenly_spread_rule: need 0 <= p <= q");
  PeriodicRule rule{period, {}};
  for (int r = 0; r < period; ++r) {
    if ((static_cast<long>(r) + 1) * members / period > static_cast<long>(r) * members / period)
      rule.residues.push_back(r);
  }
  return rule;
}

/// Best rational approximation p/q of x ∈ [0,1] with q <= max_den.
inline std::pair<int, int> rational_approximation(double x, int max_den = 1024) {
  int best_p = 0, best_q = 1;
  double best_err = std::abs(x);
  for (int q = 1; q <= max_den; ++q) {
    const int p = static_cast<int>(std::lround(x * q));
    const double err = std::abs(x - static_cast<double>(p) / q);
    if (err < best_err - 1e-15) {
      best_err = err;
      best_p = p;
      best_q = q;
    }
    if (best_err < 1e-12) break;
  }
  return {best_p, best_q};
}

/// Digit set of the sharpness construction: blocks (A + k_j) ∩ {k_j..floor(s k_j/(s-t))}
/// for 0 < t < s <= n. The base set A defaults to N when s = n and to an evenly
/// spread periodic set of density s/n otherwise.
inline DigitSet sharpness_set(double s, double t, int ambient_dim, std::vector<int> starts, int depth,
                              std::optional<PeriodicRule> base = std::nullopt) {
  require(ambient_dim >= 1, "sharpness_set: ambient dimension must be >= 1");
  require(t > 0.0 && t < s && s <= ambient_dim, "sharpness_set: need 0 < t < s <= n");
  require(!starts.empty(), "sharpness_set: at least one block start is required");
  require(starts.front() >= 1, "sharpness_set: block starts must be positive");

  BlockRule rule;
  rule.s = s;
  rule.t = t;
  rule.ambient_dim = ambient_dim;
  rule.starts = starts;

  std::vector<std::string> warnings;
  if (base) {
    rule.base = *base;
  } else if (std::abs(s - ambient_dim) < 1e-12) {
    rule.base = PeriodicRule{1, {0}};
  } else {
    auto [p, q] = rational_approximation(s / ambient_dim);
    rule.base = evenly_spread_rule(p, q);
    if (std::abs(static_cast<double>(p) / q - s / ambient_dim) > 1e-12)
      warnings.push_back("base density s/n approximated by " + std::to_string(p) + "/" + std::to_string(q));
  }

  for (std::size_t j = 1; j < starts.size(); ++j) {
    require(starts[j] > starts[j - 1], "sharpness_set: block starts must be strictly increasing");
    require(starts[j] > rule.block_end(starts[j - 1]),
            "sharpness_set: blocks overlap (k_" + std::to_string(j + 1) + " = " + std::to_string(starts[j]) +
                " <= floor(s/(s-t) k_" + std::to_string(j) + ") = " + std::to_string(rule.block_end(starts[j - 1])) +
                ")");
  }

  // The growth condition (k_1...k_{j-1})/k_j -> 0 is asymptotic; a finite list
  // can only be checked for strictly decreasing ratios.
  double product = 1.0, previous_ratio = INFINITY;
  for (std::size_t j = 1; j < starts.size(); ++j) {
    product *= starts[j - 1];
    const double ratio = product / starts[j];
    if (!(ratio < previous_ratio)) {
      warnings.push_back("growth ratio (k_1...k_" + std::to_string(j) + ")/k_" + std::to_string(j + 1) + " = " +
                         format_number(ratio) + " does not decrease");
    }
    previous_ratio = ratio;
  }
  warnings.push_back("finite block list: realized densities are biased away from the limit targets");

  const double base_density = rule.base.density();
  DigitSet set(rule, depth);
  set.target_upper_density = base_density * t / s;
  set.target_banach_density = base_density;
  set.warnings = std::move(warnings);
  return set;
}

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

struct DensityReport {
  double upper_density = 0.0;
  double banach_density = 0.0;
  int realizing_prefix = 0;
  int window_start = 0;
  int window_length = 0;
};

/// Window lengths used by the finite-depth density estimates: powers of two in
/// [ceil(K/8), K] together with K itself, or every length 1..K when `full`.
inline std::vector<int> density_lengths(int depth, bool full) {
  std::vector<int> lengths;
  if (full) {
    for (int w = 1; w <= depth; ++w) lengths.push_back(w);
    return lengths;
  }
  const int shortest = (depth + 7) / 8;
  for (long w = 1; w <= depth; w *= 2)
    if (w >= shortest) lengths.push_back(static_cast<int>(w));
  if (lengths.empty() || lengths.back() != depth) lengths.push_back(depth);
  return lengths;
}

/// Finite-depth upper density (best prefix ratio) and Banach density (best
/// window ratio) over the length grid of density_lengths. Ties keep the
/// shortest length and earliest start.
inline DensityReport densities(const DigitSet& set, bool full_window_scan = false) {
  require(set.depth() >= 8, "densities: depth must be >= 8");
  DensityReport report;
  for (int w : density_lengths(set.depth(), full_window_scan)) {
    const double prefix = static_cast<double>(set.count_upto(w)) / w;
    if (prefix > report.upper_density) {
      report.upper_density = prefix;
      report.realizing_prefix = w;
    }
    int best = -1, best_start = 1;
    for (int start = 1; start + w - 1 <= set.depth(); ++start) {
      const int c = set.count_between(start, start + w - 1);
      if (c > best) {
        best = c;
        best_start = start;
      }
    }
    const double window = static_cast<double>(best) / w;
    if (window > report.banach_density) {
      report.banach_density = window;
      report.window_start = best_start;
      report.window_length = w;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact covering counts
// ---------------------------------------------------------------------------

/// Number of depth-k dyadic cells meeting X_S^n: 2^(n #(S ∩ {1..k})).
struct ExactCount {
  long log2_count = 0;
  std::optional<std::uint64_t> value;  // empty when the count overflows 64 bits

  std::string to_string() const {
    return value ? std::to_string(*value) : "2^" + std::to_string(log2_count);
  }
};

inline ExactCount exact_count(const DigitSet& set, int dim, int k) {
  require(dim >= 1, "exact_count: dimension must be >= 1");
  require(k >= 0 && k <= set.depth(), "exact_count: k must lie in [0, truncation depth]");
  ExactCount out;
  out.log2_count = static_cast<long>(dim) * set.count_upto(k);
  if (out.log2_count < 64) out.value = std::uint64_t{1} << out.log2_count;
  return out;
}

/// log2 of the number of depth-b cells of X_S^n inside one occupied depth-a cell.
inline long exact_local_log2_count(const DigitSet& set, int dim, int a, int b) {
  require(0 <= a && a <= b && b <= set.depth(), "exact_local_log2_count: need 0 <= a <= b <= depth");
  return static_cast<long>(dim) * set.count_between(a + 1, b);
}

/// Every point of X_S^n whose digits are supported on S ∩ {1..depth}.
/// Throws SizeLimitError when n #(S ∩ {1..depth}) exceeds `max_log2_size`.
inline PointCloud enumerate_cloud(const DigitSet& set, int dim, int depth, int max_log2_size = 26) {
  require(dim >= 1, "enumerate_cloud: dimension must be >= 1");
  require(depth >= 0 && depth <= set.depth(), "enumerate_cloud: depth exceeds the truncation depth");
  require(depth <= 62, "enumerate_cloud: depth must be <= 62");
  const long bits = static_cast<long>(dim) * set.count_upto(depth);
  if (bits > max_log2_size) {
    int admissible = 0;
    while (admissible < depth && static_cast<long>(dim) * set.count_upto(admissible + 1) <= max_log2_size)
      ++admissible;
    throw SizeLimitError("enumerate_cloud: 2^" + std::to_string(bits) + " points exceed the cap 2^" +
                         std::to_string(max_log2_size) + "; largest admissible depth is " +
                         std::to_string(admissible));
  }

  std::vector<int> digits;
  for (int k = 1; k <= depth; ++k)
    if (set.contains(k)) digits.push_back(k);

  // Coordinate values: every subset sum of {2^(depth-k) : k in digits}.
  std::vector<std::uint64_t> values{0};
  for (int k : digits) {
    const std::uint64_t step = std::uint64_t{1} << (depth - k);
    const std::size_t count = values.size();
    for (std::size_t i = 0; i < count; ++i) values.push_back(values[i] + step);
  }
  std::sort(values.begin(), values.end());

  const std::size_t per_axis = values.size();
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= per_axis;
  std::vector<std::uint64_t> cells(total * static_cast<std::size_t>(dim));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int d = dim - 1; d >= 0; --d) {
      cells[idx * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)] = values[rest % per_axis];
      rest /= per_axis;
    }
  }
  return PointCloud(dim, depth, std::move(cells));
}

// ---------------------------------------------------------------------------
// Analytic dimensions
// ---------------------------------------------------------------------------

struct AnalyticDimensions {
  double box = 0.0;
  double packing = 0.0;
  double assouad = 0.0;
  bool from_targets = false;  // false when finite-depth density estimates were used
};

/// pd X_S^n = ubd X_S^n = d(S) n and ad X_S^n = d_B(S) n, with generator
/// targets when available and finite-depth densities otherwise.
inline AnalyticDimensions analytic_dims(const DigitSet& set, int dim) {
  require(dim >= 1, "analytic_dims: dimension must be >= 1");
  AnalyticDimensions out;
  if (set.size() == 0) {
    out.from_targets = set.target_upper_density.has_value();
    return out;
  }
  double upper = 0.0, banach = 0.0;
  if (set.target_upper_density && set.target_banach_density) {
    upper = *set.target_upper_density;
    banach = *set.target_banach_density;
    out.from_targets = true;
  } else {
    const auto report = densities(set);
    upper = report.upper_density;
    banach = report.banach_density;
  }
  out.box = out.packing = upper * dim;
  out.assouad = banach * dim;
  return out;
}

// ---------------------------------------------------------------------------
// Text serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

inline std::vector<int> split_ints(const std::string& text, const std::string& key) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw InvalidInput("");
    } catch (const std::exception&) {
      throw InvalidInput("digit set: bad integer '" + item + "' in " + key);
    }
  }
  return out;
}

inline double parse_real(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw InvalidInput("");
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("digit set: bad number '" + text + "' for " + key);
  }
}

}  // namespace detail

/// One-line text form, e.g. `type=periodic q=5 residues=0,1 depth=40`.
inline std::string to_text(const DigitSet& set) {
  std::string out;
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, PeriodicRule>) {
          out = "type=periodic q=" + std::to_string(r.period) + " residues=" + detail::join_ints(r.residues);
        } else if constexpr (std::is_same_v<R, ExplicitRule>) {
          out = "type=explicit members=" + detail::join_ints(r.members);
        } else {
          out = "type=blocks s=" + format_number(r.s) + " t=" + format_number(r.t) + " k=" +
                detail::join_ints(r.starts) + " n=" + std::to_string(r.ambient_dim) +
                " aq=" + std::to_string(r.base.period) + " aresidues=" + detail::join_ints(r.base.residues);
        }
      },
      set.rule());
  return out + " depth=" + std::to_string(set.depth());
}

/// Inverse of to_text. A bare `members=..` line is read as an explicit set,
/// with depth defaulting to the largest member.
inline DigitSet parse_digit_set(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> fields;
  std::stringstream ss(line);
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    require(eq != std::string::npos, "digit set: expected key=value, got '" + token + "'");
    fields.emplace_back(token.substr(0, eq), token.substr(eq + 1));
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    return std::nullopt;
  };
  auto need = [&](const std::string& key) {
    auto v = get(key);
    require(v.has_value(), "digit set: missing field '" + key + "'");
    return *v;
  };
  auto depth_or = [&](int fallback) {
    auto d = get("depth");
    return d ? detail::split_ints(*d, "depth").at(0) : fallback;
  };

  std::string type = get("type").value_or(get("members") ? "explicit" : "");
  if (type == "periodic") {
    const int q = detail::split_ints(need("q"), "q").at(0);
    return periodic_set(q, detail::split_ints(get("residues").value_or(""), "residues"), depth_or(40));
  }
  if (type == "explicit") {
    auto members = detail::split_ints(get("members").value_or(""), "members");
    const int largest = members.empty() ? 1 : *std::max_element(members.begin(), members.end());
    return explicit_set(std::move(members), depth_or(std::max(largest, 1)));
  }
  if (type == "blocks") {
    const double s = detail::parse_real(need("s"), "s");
    const double t = detail::parse_real(need("t"), "t");
    const int n = get("n") ? detail::split_ints(*get("n"), "n").at(0) : static_cast<int>(std::ceil(s - 1e-12));
    std::optional<PeriodicRule> base;
    if (auto aq = get("aq")) {
      PeriodicRule rule{detail::split_ints(*aq, "aq").at(0), detail::split_ints(get("aresidues").value_or("0"), "aresidues")};
      std::sort(rule.residues.begin(), rule.residues.end());
      base = rule;
    }
    return sharpness_set(s, t, n, detail::split_ints(need("k"), "k"), depth_or(8192), base);
  }
  throw InvalidInput("digit set: unknown type '" + type + "'");
}

}  // namespace dimprof
