#ifndef DIVLAB_ORDER_HPP
#define DIVLAB_ORDER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "divlab/common.hpp"
#include "divlab/divergence.hpp"

namespace divlab {

// Growth-order comparison of sampled functions under the relation
//
//   f preceq_C g   iff   f(x) <= C * g(C*x + C) + C*x + C   for all x >= 1,
//
// with f and g known only at finitely many scales, possibly as intervals
// (an exact value, a certified lower bound, or certified infinity).  Every
// verdict is conservative: "holds" and "fails" are only reported when the
// sampled intervals certify them; anything else stays undetermined.

struct OrderSample {
  int64_t x = 0;
  double lo = 0.0;  // certified lower bound on f(x)
  double hi = 0.0;  // certified upper bound (infinity when unbounded)
};

inline OrderSample order_exact(int64_t x, double v) { return {x, v, v}; }
inline OrderSample order_at_least(int64_t x, double lower) {
  return {x, lower, std::numeric_limits<double>::infinity()};
}
inline OrderSample order_infinite(int64_t x) {
  double inf = std::numeric_limits<double>::infinity();
  return {x, inf, inf};
}
inline OrderSample order_sample(int64_t x, const ExtendedLength& v) {
  switch (v.status) {
    case ExtendedLength::Status::Finite: return order_exact(x, (double)v.value);
    case ExtendedLength::Status::Censored: return order_at_least(x, (double)v.value);
    default: return order_infinite(x);
  }
}

enum class OrderVerdict { Holds, Fails, Undetermined };

inline const char* to_string(OrderVerdict v) {
  switch (v) {
    case OrderVerdict::Holds: return "holds";
    case OrderVerdict::Fails: return "fails";
    default: return "undetermined";
  }
}

struct OrderPolicy {
  // Strict mode certifies "holds" only when every sample point was
  // verifiable; the relaxed mode (used by the lower-bound audits) drops
  // unverifiable points and instead demands a minimum amount of evidence,
  // both as an absolute count and as a fraction of the sampled scales.
  // The fraction guards against vacuous passes at large constants, where
  // only the smallest scales remain verifiable.
  bool require_all_verifiable = true;
  uint32_t min_checked = 1;
  double min_checked_fraction = 0.0;
};

struct OrderDecision {
  double C = 1.0;
  OrderVerdict verdict = OrderVerdict::Undetermined;
  uint32_t checked = 0;   // points with a certified pass or fail
  uint32_t skipped = 0;   // points outside g's domain or indeterminate
  int64_t witness_x = -1;  // first certified violation, if any
};

namespace detail {

inline void validate_samples(const std::vector<OrderSample>& s, const char* who) {
  if (s.empty()) throw ValidationError(std::string(who) + ": no samples");
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i].x < 1) throw ValidationError(std::string(who) + ": scales must be >= 1");
    if (i && s[i].x <= s[i - 1].x)
      throw ValidationError(std::string(who) + ": scales must be strictly increasing");
    if (!(s[i].lo <= s[i].hi)) throw ValidationError(std::string(who) + ": empty interval");
    if (s[i].lo < 0) throw ValidationError(std::string(who) + ": negative value");
  }
}

// Interval estimate of g(u) by linear interpolation between samples;
// returns false when u falls outside the sampled domain.  Infinite
// endpoints propagate conservatively: the upper bound becomes infinite if
// either bracket is, the lower bound stays at the finite bracket.
inline bool eval_interval(const std::vector<OrderSample>& g, double u, double& lo, double& hi) {
  if (u < (double)g.front().x || u > (double)g.back().x) return false;
  auto it = std::lower_bound(g.begin(), g.end(), u,
                             [](const OrderSample& s, double v) { return (double)s.x < v; });
  if (it != g.end() && (double)it->x == u) {
    lo = it->lo;
    hi = it->hi;
    return true;
  }
  const OrderSample& s2 = *it;
  const OrderSample& s1 = *(it - 1);
  double t = (u - (double)s1.x) / (double)(s2.x - s1.x);
  auto lerp_lo = [&](double a, double b) {
    if (std::isinf(a) && std::isinf(b)) return a;
    if (std::isinf(a)) return b;
    if (std::isinf(b)) return a;
    return a + t * (b - a);
  };
  lo = lerp_lo(s1.lo, s2.lo);
  hi = (std::isinf(s1.hi) || std::isinf(s2.hi)) ? std::numeric_limits<double>::infinity()
                                                : s1.hi + t * (s2.hi - s1.hi);
  return true;
}

inline double order_eps(double bound) { return 1e-9 * std::max(1.0, std::fabs(bound)); }

}  // namespace detail

// One comparison f preceq_C g at a fixed constant.
inline OrderDecision preceq_at(const std::vector<OrderSample>& f,
                               const std::vector<OrderSample>& g, double C,
                               const OrderPolicy& policy = {}) {
  detail::validate_samples(f, "left function");
  detail::validate_samples(g, "right function");
  if (C < 1.0) throw ValidationError("comparison constant must be at least 1");
  OrderDecision d;
  d.C = C;
  for (const OrderSample& s : f) {
    double glo, ghi;
    if (!detail::eval_interval(g, C * (double)s.x + C, glo, ghi)) {
      ++d.skipped;
      continue;
    }
    double linear = C * (double)s.x + C;
    double bound_lo = std::isinf(glo) ? glo : C * glo + linear;
    double bound_hi = std::isinf(ghi) ? ghi : C * ghi + linear;
    if (s.hi <= bound_lo + detail::order_eps(bound_lo)) {
      ++d.checked;  // certified pass: even the largest f against the smallest bound
    } else if (s.lo > bound_hi + detail::order_eps(bound_hi)) {
      ++d.checked;  // certified violation
      if (d.witness_x < 0) d.witness_x = s.x;
    } else {
      ++d.skipped;  // intervals overlap: indeterminate
    }
  }
  if (d.witness_x >= 0)
    d.verdict = OrderVerdict::Fails;
  else if (policy.require_all_verifiable)
    d.verdict = d.skipped == 0 ? OrderVerdict::Holds : OrderVerdict::Undetermined;
  else {
    uint32_t need = std::max<uint32_t>(
        std::max(policy.min_checked, 1u),
        (uint32_t)std::ceil(policy.min_checked_fraction * (double)f.size()));
    d.verdict = d.checked >= need ? OrderVerdict::Holds : OrderVerdict::Undetermined;
  }
  return d;
}

inline std::vector<double> default_constant_ladder() { return {1, 2, 4, 8, 16, 32, 64}; }

struct OrderSearch {
  OrderVerdict verdict = OrderVerdict::Undetermined;
  double C = 0.0;  // least constant that certifies "holds" (when it does)
  std::vector<OrderDecision> ladder;
};

// Ascending search over the constant ladder; stops at the first constant
// that certifies the relation.  When none does, the overall verdict is
// "fails" only if every tested constant was certified to fail.
inline OrderSearch preceq_search(const std::vector<OrderSample>& f,
                                 const std::vector<OrderSample>& g,
                                 std::vector<double> ladder = default_constant_ladder(),
                                 const OrderPolicy& policy = {}) {
  if (ladder.empty()) throw ValidationError("constant ladder must be nonempty");
  std::sort(ladder.begin(), ladder.end());
  OrderSearch out;
  for (double C : ladder) {
    OrderDecision d = preceq_at(f, g, C, policy);
    out.ladder.push_back(d);
    if (d.verdict == OrderVerdict::Holds) {
      out.verdict = OrderVerdict::Holds;
      out.C = C;
      return out;
    }
  }
  bool all_fail = std::all_of(out.ladder.begin(), out.ladder.end(), [](const OrderDecision& d) {
    return d.verdict == OrderVerdict::Fails;
  });
  out.verdict = all_fail ? OrderVerdict::Fails : OrderVerdict::Undetermined;
  return out;
}

struct EquivalenceCheck {
  OrderSearch forward;   // f preceq g
  OrderSearch backward;  // g preceq f
  OrderVerdict verdict = OrderVerdict::Undetermined;
  double C = 0.0;  // max of the two certified constants (when equivalent)
};

inline EquivalenceCheck order_equivalent(const std::vector<OrderSample>& f,
                                         const std::vector<OrderSample>& g,
                                         std::vector<double> ladder = default_constant_ladder(),
                                         const OrderPolicy& policy = {}) {
  EquivalenceCheck out;
  out.forward = preceq_search(f, g, ladder, policy);
  out.backward = preceq_search(g, f, std::move(ladder), policy);
  if (out.forward.verdict == OrderVerdict::Holds && out.backward.verdict == OrderVerdict::Holds) {
    out.verdict = OrderVerdict::Holds;
    out.C = std::max(out.forward.C, out.backward.C);
  } else if (out.forward.verdict == OrderVerdict::Fails ||
             out.backward.verdict == OrderVerdict::Fails) {
    out.verdict = OrderVerdict::Fails;
  }
  return out;
}

// Reference curve x -> x^exponent on the given scales.
inline std::vector<OrderSample> power_curve(const std::vector<int64_t>& xs, double exponent) {
  std::vector<OrderSample> out;
  out.reserve(xs.size());
  for (int64_t x : xs) out.push_back(order_exact(x, std::pow((double)x, exponent)));
  detail::validate_samples(out, "power curve");
  return out;
}

// Evidence that f grows at least like x^exponent: the power curve preceq f
// under the relaxed policy (unverifiable scales dropped; at least
// min_checked points and half of the grid must certify).  Relaxation is
// unavoidable here: the comparison consults f at C*x + C, beyond any
// finite sample grid for the largest scales.  The half-grid floor keeps a
// large constant from passing on the few smallest scales alone, where any
// function dominates any other.
inline OrderSearch power_lower_audit(const std::vector<OrderSample>& f, double exponent,
                                     std::vector<double> ladder = default_constant_ladder(),
                                     uint32_t min_checked = 3,
                                     double min_checked_fraction = 0.5) {
  detail::validate_samples(f, "audited function");
  std::vector<int64_t> xs;
  for (const OrderSample& s : f) xs.push_back(s.x);
  OrderPolicy relaxed;
  relaxed.require_all_verifiable = false;
  relaxed.min_checked = min_checked;
  relaxed.min_checked_fraction = min_checked_fraction;
  return preceq_search(power_curve(xs, exponent), f, std::move(ladder), relaxed);
}

inline OrderSearch quadratic_lower_audit(const std::vector<OrderSample>& f,
                                         std::vector<double> ladder = default_constant_ladder(),
                                         uint32_t min_checked = 3) {
  return power_lower_audit(f, 2.0, std::move(ladder), min_checked);
}

// Certified two-sided comparison against the linear function x.  Upward,
// f preceq x is checked strictly against a synthetic linear reference wide
// enough to cover C*x + C for every ladder constant (interpolation on a
// linear function is exact, so two endpoints suffice).  Downward,
// x preceq f uses the relaxed lower audit, since f is only sampled on its
// own grid.
inline EquivalenceCheck linear_equivalence_check(const std::vector<OrderSample>& f,
                                                 std::vector<double> ladder = default_constant_ladder(),
                                                 uint32_t min_checked = 3) {
  detail::validate_samples(f, "compared function");
  if (ladder.empty()) throw ValidationError("constant ladder must be nonempty");
  double cmax = *std::max_element(ladder.begin(), ladder.end());
  int64_t reach = (int64_t)std::ceil(cmax * (double)f.back().x + cmax) + 1;
  std::vector<OrderSample> line = {order_exact(1, 1.0), order_exact(reach, (double)reach)};
  EquivalenceCheck out;
  out.forward = preceq_search(f, line, ladder);
  out.backward = power_lower_audit(f, 1.0, std::move(ladder), min_checked);
  if (out.forward.verdict == OrderVerdict::Holds && out.backward.verdict == OrderVerdict::Holds) {
    out.verdict = OrderVerdict::Holds;
    out.C = std::max(out.forward.C, out.backward.C);
  } else if (out.forward.verdict == OrderVerdict::Fails ||
             out.backward.verdict == OrderVerdict::Fails) {
    out.verdict = OrderVerdict::Fails;
  }
  return out;
}

struct OrderEstimate {
  double exponent = 0.0;  // least-squares slope of log y against log x
  double residual = 0.0;  // root-mean-square misfit in log space
  uint32_t points = 0;    // samples in the tail window
};

// Diagnostic growth exponent from the tail of the sample grid: fit
// log y = e * log x + c over the last `window` fraction of the samples.
// Purely descriptive; mixed regimes land between their exponents.
inline OrderEstimate estimate_order(const std::vector<OrderSample>& f, double window = 0.5) {
  detail::validate_samples(f, "estimated function");
  if (f.size() < 4) throw ValidationError("order estimate needs at least 4 samples");
  if (!(window > 0.0) || window > 1.0)
    throw ValidationError("tail window must lie in (0, 1]");
  size_t k = std::max<size_t>(2, (size_t)std::ceil(window * (double)f.size()));
  k = std::min(k, f.size());
  OrderEstimate est;
  est.points = (uint32_t)k;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> logs;
  for (size_t i = f.size() - k; i < f.size(); ++i) {
    if (std::isinf(f[i].hi) || !(f[i].lo > 0.0))
      throw ValidationError("order estimate requires finite positive values in the window");
    double lx = std::log((double)f[i].x), ly = std::log(f[i].lo);
    logs.emplace_back(lx, ly);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = (double)k;
  double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw ValidationError("order estimate window has no scale spread");
  est.exponent = (n * sxy - sx * sy) / denom;
  double intercept = (sy - est.exponent * sx) / n;
  double sse = 0;
  for (auto [lx, ly] : logs) {
    double e = ly - (est.exponent * lx + intercept);
    sse += e * e;
  }
  est.residual = std::sqrt(sse / n);
  return est;
}

struct SlopeAudit {
  OrderVerdict verdict = OrderVerdict::Undetermined;
  uint32_t points = 0;          // samples that entered the audit
  std::vector<double> slopes;   // successive divided differences
};

// Superlinearity evidence from discrete convexity: successive slopes
// (y_{i+1} - y_i) / (x_{i+1} - x_i) must strictly increase.  A linear
// function with any additive offset plateaus and fails; any certified
// infinity at a finite scale passes outright.  Censored values enter
// through their lower bounds and can only make the audit harder to pass
// when they appear on the left of a gap, so the verdict stays sound
// evidence rather than proof.
inline SlopeAudit superlinear_slope_audit(const std::vector<OrderSample>& f,
                                          uint32_t min_points = 3) {
  detail::validate_samples(f, "audited function");
  SlopeAudit out;
  for (const OrderSample& s : f)
    if (std::isinf(s.lo)) {
      out.verdict = OrderVerdict::Holds;
      out.points = (uint32_t)f.size();
      return out;
    }
  out.points = (uint32_t)f.size();
  if (f.size() < min_points || f.size() < 3) {
    out.verdict = OrderVerdict::Undetermined;
    return out;
  }
  for (size_t i = 0; i + 1 < f.size(); ++i)
    out.slopes.push_back((f[i + 1].lo - f[i].lo) / (double)(f[i + 1].x - f[i].x));
  bool strict = true;
  for (size_t i = 0; i + 1 < out.slopes.size(); ++i)
    if (!(out.slopes[i + 1] > out.slopes[i])) strict = false;
  out.verdict = strict ? OrderVerdict::Holds : OrderVerdict::Fails;
  return out;
}

}  // namespace divlab

#endif  // DIVLAB_ORDER_HPP
