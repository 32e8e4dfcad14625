#pragma once

// Closed-form bounds for box dimensions of orthogonal projections in terms of
// box, (quasi-)Assouad and Assouad spectrum values. Every formula is a
// template so it can run on double or on exact Rational inputs.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dimprof/core.hpp"
#include "dimprof/rational.hpp"

namespace dimprof {

template <class T>
T max_of(T a, T b) {
  return a < b ? b : a;
}
template <class T>
T min_of(T a, T b) {
  return b < a ? b : a;
}

/// x / (1 + (1/m - 1/n) x): almost-sure lower bound valid for every bounded set.
template <class T>
T general_lower_bound(T x, int m, int n) {
  return x / (T(1) + (T(1) / T(m) - T(1) / T(n)) * x);
}

/// min{m, x}: the trivial upper bound.
template <class T>
T general_upper_bound(T x, int m) {
  return min_of(T(m), x);
}

/// x - max{0, spectrum - s, (ad - s)(1 - theta)}; s = m gives the almost-sure
/// bound, s < m the bound outside an exceptional set of subspaces.
template <class T>
T spectrum_bound(T x, T spectrum, T ad, T s, T theta) {
  return x - max_of(max_of(T(0), spectrum - s), (ad - s) * (T(1) - theta));
}

/// m(n-m) - (m-s): Hausdorff dimension bound for the exceptional subspaces.
template <class T>
T exceptional_dimension_bound(int m, int n, T s) {
  return T(m * (n - m)) - (T(m) - s);
}

/// Upper end of the Assouad-dimension window in which the theta-choice bound
/// improves on the general lower bound: (mn + 2x(n-m))m / (mn + x(n-m)).
template <class T>
T threshold_curve(T x, int m, int n) {
  const T mn = T(m * n);
  const T gap = T(n - m);
  return (mn + T(2) * x * gap) * T(m) / (mn + x * gap);
}

/// theta = 1 - x/m, the largest theta with x/(1-theta) <= m.
template <class T>
T theta_choice(T x, int m) {
  return T(1) - x / T(m);
}

/// x - (ad - m) x / m: the bound at theta = 1 - x/m.
template <class T>
T theta_choice_bound(T x, T ad, int m) {
  return x - (ad - T(m)) * x / T(m);
}

/// d = mst / (m(s-t) + st): upper bound on every projection of the block
/// construction with Assouad dimension s and upper box dimension t.
template <class T>
T sharpness_value(int m, T s, T t) {
  require(T(0) < t && t < s, "sharpness_value: need 0 < t < s");
  return T(m) * s * t / (T(m) * (s - t) + s * t);
}

template <class T>
struct BoundInputs {
  T ubd{};
  std::optional<T> lbd;
  T ad{};
  std::optional<T> qad;                     // defaults to ad
  std::function<T(T)> spectrum;             // upper Assouad spectrum; defaults to min{ubd/(1-theta), ad}
  int m = 1;
  int n = 2;
  std::optional<T> s;                       // exceptional-set exponent in (0, m)
  std::optional<T> theta;                   // a specific theta in (0, 1)
  std::optional<T> sharp_s;                 // block construction parameters
  std::optional<T> sharp_t;
};

template <class T>
struct ThetaBound {
  T theta{};
  T spectrum{};
  T bound{};
};

template <class T>
struct BoundReport {
  int m = 1;
  int n = 2;
  T ubd{};
  T ad{};
  T qad{};
  T general_lower{};
  T general_upper{};
  std::optional<T> general_lower_lbd;
  std::optional<ThetaBound<T>> at_theta;             // bound at the requested theta
  std::optional<ThetaBound<T>> at_theta_lbd;
  ThetaBound<T> best;                                // best over theta = i/20
  std::vector<ThetaBound<T>> grid;
  // Preservation: applies when qad <= max{m, ubd}.
  bool preservation_applies = false;
  T preserved_value{};                               // min{m, ubd}
  T drop_bound{};                                    // ubd - max{0, qad - m}
  // Exceptional set when qad < m.
  bool exceptional_applies = false;
  T exceptional_dimension{};                         // m(n-m) - (m - qad)
  std::optional<T> exceptional_bound;                // spectrum_bound with the given s and theta
  std::optional<T> exceptional_dimension_at_s;       // m(n-m) - (m - s)
  // Theta-choice improvement window.
  T threshold{};
  bool improvement_applies = false;
  T improvement_theta{};
  T improvement_bound{};
  std::optional<T> sharpness;
};

namespace detail {

template <class T>
void check_dimension(const T& v, int n, const char* name) {
  require(!(v < T(0)) && !(T(n) < v), std::string("bounds: ") + name + " must lie in [0, n]");
}

template <class T>
void check_theta(const T& theta) {
  require(T(0) < theta && theta < T(1), "bounds: theta must lie in (0, 1)");
}

}  // namespace detail

template <class T>
BoundReport<T> bound_formulas(const BoundInputs<T>& in) {
  require(in.m >= 1 && in.m < in.n, "bounds: need 1 <= m < n");
  detail::check_dimension(in.ubd, in.n, "ubd");
  detail::check_dimension(in.ad, in.n, "ad");
  require(!(in.ad < in.ubd), "bounds: ad must be at least ubd");
  if (in.lbd) {
    detail::check_dimension(*in.lbd, in.n, "lbd");
    require(!(in.ubd < *in.lbd), "bounds: lbd must not exceed ubd");
  }
  const T qad = in.qad.value_or(in.ad);
  detail::check_dimension(qad, in.n, "qad");
  require(!(qad < in.ubd) && !(in.ad < qad), "bounds: need ubd <= qad <= ad");
  if (in.theta) detail::check_theta(*in.theta);

  const T ubd = in.ubd;
  const T ad = in.ad;
  const int m = in.m;
  const int n = in.n;
  const auto spectrum = [&](T theta) {
    if (in.spectrum) return in.spectrum(theta);
    return min_of(ubd / (T(1) - theta), ad);
  };

  BoundReport<T> r;
  r.m = m;
  r.n = n;
  r.ubd = ubd;
  r.ad = ad;
  r.qad = qad;
  r.general_lower = general_lower_bound(ubd, m, n);
  r.general_upper = general_upper_bound(ubd, m);
  if (in.lbd) r.general_lower_lbd = general_lower_bound(*in.lbd, m, n);

  if (in.theta) {
    const T sp = spectrum(*in.theta);
    r.at_theta = ThetaBound<T>{*in.theta, sp, spectrum_bound(ubd, sp, ad, T(m), *in.theta)};
    if (in.lbd) r.at_theta_lbd = ThetaBound<T>{*in.theta, sp, spectrum_bound(*in.lbd, sp, ad, T(m), *in.theta)};
  }
  for (int i = 1; i < 20; ++i) {
    const T theta = T(i) / T(20);
    const T sp = spectrum(theta);
    r.grid.push_back({theta, sp, spectrum_bound(ubd, sp, ad, T(m), theta)});
    if (i == 1 || r.best.bound < r.grid.back().bound) r.best = r.grid.back();
  }

  r.preservation_applies = !(max_of(T(m), ubd) < qad);
  r.preserved_value = min_of(T(m), ubd);
  r.drop_bound = ubd - max_of(T(0), qad - T(m));

  r.exceptional_applies = qad < T(m);
  r.exceptional_dimension = exceptional_dimension_bound(m, n, qad);
  if (in.s) {
    require(T(0) < *in.s && *in.s < T(m), "bounds: s must lie in (0, m)");
    r.exceptional_dimension_at_s = exceptional_dimension_bound(m, n, *in.s);
    if (in.theta) r.exceptional_bound = spectrum_bound(ubd, spectrum(*in.theta), ad, *in.s, *in.theta);
  }

  r.threshold = threshold_curve(ubd, m, n);
  r.improvement_applies = !(T(m) < ubd) && !(ad < max_of(T(m), ubd)) && ad < r.threshold;
  r.improvement_theta = theta_choice(ubd, m);
  r.improvement_bound = theta_choice_bound(ubd, ad, m);

  if (in.sharp_s && in.sharp_t) r.sharpness = sharpness_value(m, *in.sharp_s, *in.sharp_t);
  return r;
}

}  // namespace dimprof
