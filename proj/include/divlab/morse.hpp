#ifndef DIVLAB_MORSE_HPP
#define DIVLAB_MORSE_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "divlab/cayley.hpp"
#include "divlab/common.hpp"
#include "divlab/divergence.hpp"
#include "divlab/group_models.hpp"
#include "divlab/order.hpp"

namespace divlab {

// Contraction and stability diagnostics along the cyclic axis of a single
// element: how far balls disjoint from the axis project onto it, and how
// far bounded-detour quasi-geodesics between axis points stray from it.
// Everything here is finite-scale evidence measured inside an ambient ball.

// ---------------------------------------------------------------------------
// Axis construction
// ---------------------------------------------------------------------------

struct AxisSpec {
  Word g;                        // defining word
  int span = 0;                  // powers -span..span are materialized
  std::vector<uint32_t> points;  // ball entry of g^m at index m + span
  std::vector<int64_t> dists;    // |g^m| for the same indices

  uint32_t point(int m) const { return points[(size_t)(m + span)]; }
};

// Materializes the powers g^m inside the ball, m = -span..span.  span = 0
// asks for every power the ball holds.  All materialized powers must be
// pairwise distinct; a collision means g has finite order (or the model
// violated cancellation), for which no axis exists.
inline AxisSpec make_axis(const GroupModel& G, const Ball& ball, const Word& g, int span = 0) {
  if (g.empty()) throw ValidationError("axis element must be a nonempty word");
  Element ge = evaluate(G, g);
  if (G.is_identity(ge)) throw ValidationError("axis element must not be the identity");
  if (span < 0) throw ValidationError("axis span must be nonnegative");

  std::vector<uint32_t> forward;  // g^1, g^2, ...
  Element cur = G.identity();
  for (int m = 1; span == 0 || m <= span; ++m) {
    cur = model_mul(G, cur, ge);
    int64_t idx = ball.find(G, cur);
    if (idx < 0) {
      if (span != 0)
        throw ResourceError(
            "axis power exits the ambient ball at exponent " + std::to_string(m), m - 1);
      break;
    }
    forward.push_back((uint32_t)idx);
  }
  if (forward.empty())
    throw ResourceError("ambient ball does not even hold the axis element", 0);

  Element gi = G.inverse(ge);
  std::vector<uint32_t> backward;  // g^-1, g^-2, ...
  cur = G.identity();
  for (size_t m = 1; m <= forward.size(); ++m) {
    cur = model_mul(G, cur, gi);
    int64_t idx = ball.find(G, cur);
    if (idx < 0)
      throw ResourceError(
          "inverse axis power exits the ambient ball at exponent " + std::to_string(m), m - 1);
    backward.push_back((uint32_t)idx);
  }

  AxisSpec axis;
  axis.g = g;
  axis.span = (int)forward.size();
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) axis.points.push_back(*it);
  axis.points.push_back(0);  // g^0 = identity, entry 0
  for (uint32_t i : forward) axis.points.push_back(i);
  std::set<uint32_t> distinct(axis.points.begin(), axis.points.end());
  if (distinct.size() != axis.points.size())
    throw ValidationError("axis powers collide: the element has finite order");
  axis.dists.reserve(axis.points.size());
  for (uint32_t i : axis.points) axis.dists.push_back(ball.dist(i));
  return axis;
}

namespace detail {

// Distance fields used by both diagnostics: one BFS per axis point (for
// nearest-point projections and pairwise axis distances) plus the pointwise
// minimum (distance to the axis as a set).
struct AxisFields {
  std::vector<std::vector<int32_t>> from_point;
  std::vector<int32_t> to_axis;
};

inline AxisFields axis_distance_fields(const Ball& ball, const AxisSpec& axis) {
  AxisFields f;
  f.from_point.resize(axis.points.size());
  for (size_t k = 0; k < axis.points.size(); ++k)
    ball_bfs(ball, {axis.points[k]}, f.from_point[k]);
  f.to_axis.assign(ball.size(), -1);
  for (uint32_t i = 0; i < ball.size(); ++i) {
    int32_t best = -1;
    for (const auto& row : f.from_point) {
      int32_t d = row[i];
      if (d >= 0 && (best < 0 || d < best)) best = d;
    }
    f.to_axis[i] = best;
  }
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Contraction profile
// ---------------------------------------------------------------------------

struct ContractionParams {
  std::vector<std::string> centers;  // explicit center words
  uint32_t sample_count = 0;         // additional seeded off-axis centers
  int64_t min_center_dist = 2;       // sampled centers at least this far from the axis
  uint64_t element_budget = 4096;    // projected elements per ball
  uint64_t seed = 0x5eed;
};

struct ContractionSample {
  std::string center;
  int64_t axis_dist = 0;      // dist(center, axis)
  int64_t ball_radius = 0;    // axis_dist - 1: disjoint from the axis by construction
  int64_t proj_diameter = 0;  // diameter of the nearest-point projection set
  uint64_t projected = 0;     // ball elements that were projected
  bool exhaustive = true;     // all elements of the ball were projected
  bool clipped = false;       // the ball pokes beyond the ambient radius
};

struct ContractionReport {
  std::vector<ContractionSample> samples;
  int64_t D_estimate = 0;  // max projection diameter over the sampled balls
};

// For each center x, projects (a deterministic sample of) the ball
// B(x, dist(x, axis) - 1) onto the axis by nearest-point projection and
// records the diameter of the projection set in the group metric.  The
// radius makes every examined ball disjoint from the axis in the integer
// metric; centers on the axis are rejected.
inline ContractionReport contraction_profile(const GroupModel& G, const Ball& ball,
                                             const AxisSpec& axis,
                                             const ContractionParams& cp) {
  detail::AxisFields fields = detail::axis_distance_fields(ball, axis);

  std::vector<uint32_t> centers;
  for (const std::string& w : cp.centers) {
    Element e = evaluate(G, parse_word(G.generators(), w));
    int64_t idx = ball.find(G, e);
    if (idx < 0) throw ValidationError("center outside the ambient ball: " + w);
    if (fields.to_axis[idx] == 0)
      throw ValidationError("center lies on the axis: " + w);
    centers.push_back((uint32_t)idx);
  }
  if (cp.sample_count > 0) {
    std::set<uint32_t> seen(centers.begin(), centers.end());
    uint64_t overdraw = std::min<uint64_t>(ball.size(), 8ull * cp.sample_count + 64);
    uint32_t taken = 0;
    for (uint64_t id : sample_distinct(ball.size(), overdraw, cp.seed)) {
      if (taken >= cp.sample_count) break;
      uint32_t i = (uint32_t)id;
      if (fields.to_axis[i] < cp.min_center_dist) continue;
      if (!seen.insert(i).second) continue;
      centers.push_back(i);
      ++taken;
    }
  }
  if (centers.empty())
    throw ValidationError("no usable centers: give explicit words or a sample count");

  ContractionReport report;
  std::vector<int32_t> from_center;
  for (uint32_t x : centers) {
    ContractionSample s;
    s.center = format_word(G.generators(), ball.word_to(x));
    s.axis_dist = fields.to_axis[x];
    s.ball_radius = s.axis_dist - 1;
    s.clipped = ball.dist(x) + s.ball_radius > ball.radius();

    ball_bfs(ball, {x}, from_center);
    std::vector<uint32_t> members;
    for (uint32_t i = 0; i < ball.size(); ++i)
      if (from_center[i] >= 0 && from_center[i] <= s.ball_radius) members.push_back(i);
    if ((uint64_t)members.size() > cp.element_budget) {
      std::vector<uint32_t> picked;
      picked.reserve(cp.element_budget);
      for (uint64_t id : sample_distinct(members.size(), cp.element_budget, cp.seed ^ x))
        picked.push_back(members[(size_t)id]);
      members.swap(picked);
      s.exhaustive = false;
    }
    s.projected = members.size();

    // Union of nearest-point projections over the (sampled) ball.
    std::set<size_t> proj;
    for (uint32_t y : members) {
      int32_t best = fields.to_axis[y];
      for (size_t k = 0; k < fields.from_point.size(); ++k)
        if (fields.from_point[k][y] == best) proj.insert(k);
    }
    int64_t diam = 0;
    for (size_t a : proj)
      for (size_t b : proj) {
        int32_t d = fields.from_point[a][axis.points[b]];
        if (d > diam) diam = d;
      }
    s.proj_diameter = diam;
    report.D_estimate = std::max(report.D_estimate, diam);
    report.samples.push_back(std::move(s));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Quasi-geodesic deviation witnesses
// ---------------------------------------------------------------------------

struct WitnessParams {
  double L = 1.0;                // multiplicative quasi-geodesic constant
  double C = 0.0;                // additive quasi-geodesic constant
  int endpoint_span = 0;         // endpoints g^{±span}; 0 = the full axis span
  uint32_t max_detours = 256;    // sampled detour vertices
  uint64_t seed = 0x5eed;
  std::vector<std::string> probes;  // detour vertices that are always tried
};

struct WitnessSample {
  std::string via;
  int64_t length = 0;
  int64_t deviation = 0;
};

struct MorseWitnessReport {
  int64_t endpoint_distance = 0;
  uint64_t candidates = 0;       // detour vertices meeting the length bound
  int64_t max_deviation = 0;
  bool scale_limited = true;     // finite-ball evidence, never a certificate
  std::vector<WitnessSample> paths;
};

namespace detail {

// Walks the ShortLex geodesic from `from` to `to` through the ball and
// appends the visited entries (excluding `from`).  Fails when the relative
// element or an intermediate vertex falls outside the ambient ball.
inline bool trace_geodesic(const GroupModel& G, const Ball& ball, uint32_t from, uint32_t to,
                           std::vector<uint32_t>& out) {
  Element rel = model_mul(G, G.inverse(ball.element_at(G, from)), ball.element_at(G, to));
  int64_t rel_idx = ball.find(G, rel);
  if (rel_idx < 0) return false;
  Word w = ball.word_to((uint32_t)rel_idx);
  uint32_t cur = from;
  for (int s : w) {
    cur = ball.adj_row(cur)[s];
    if (cur == kNoEntry) return false;
    out.push_back(cur);
  }
  return cur == to;
}

}  // namespace detail

// Samples bounded-detour perturbations of the geodesic between two axis
// points: for a detour vertex w, the path geodesic(x,w) + geodesic(w,y)
// qualifies as an (L,C)-quasi-geodesic when its length is at most
// L*d(x,y) + C.  Reports how far the qualifying paths stray from the axis.
// A large growing deviation is evidence against axis stability; a small one
// at the examined scale proves nothing, hence the scale-limited marker.
inline MorseWitnessReport morse_witness(const GroupModel& G, const Ball& ball,
                                        const AxisSpec& axis, const WitnessParams& wp) {
  if (wp.L < 1.0 || wp.C < 0.0)
    throw ValidationError("quasi-geodesic constants need L >= 1 and C >= 0");
  int span = wp.endpoint_span == 0 ? axis.span : wp.endpoint_span;
  if (span < 1 || span > axis.span)
    throw ValidationError("endpoint span must lie within the axis span");

  detail::AxisFields fields = detail::axis_distance_fields(ball, axis);
  const uint32_t x = axis.point(-span), y = axis.point(span);
  std::vector<int32_t> from_x, from_y;
  ball_bfs(ball, {x}, from_x);
  ball_bfs(ball, {y}, from_y);

  MorseWitnessReport report;
  report.endpoint_distance = from_x[y];
  if (report.endpoint_distance < 0)
    throw ResourceError("axis endpoints are not connected inside the ambient ball",
                        ball.radius());
  const double budget = wp.L * (double)report.endpoint_distance + wp.C;

  std::vector<uint32_t> detours;
  {
    std::set<uint32_t> seen;
    // The route along the axis itself (through the identity, midway between
    // the endpoints) is always offered, so the report is never starved of
    // candidates just because the random detours all overshot the budget.
    seen.insert(axis.point(0));
    detours.push_back(axis.point(0));
    for (const std::string& w : wp.probes) {
      Element e = evaluate(G, parse_word(G.generators(), w));
      int64_t idx = ball.find(G, e);
      if (idx < 0) throw ValidationError("detour probe outside the ambient ball: " + w);
      if (seen.insert((uint32_t)idx).second) detours.push_back((uint32_t)idx);
    }
    for (uint64_t id : sample_distinct(ball.size(), wp.max_detours, wp.seed))
      if (seen.insert((uint32_t)id).second) detours.push_back((uint32_t)id);
  }

  std::vector<uint32_t> verts;
  for (uint32_t w : detours) {
    // In-ball distances bound the true path length from above, so this
    // pre-filter never admits a path that breaks the budget.
    if (from_x[w] < 0 || from_y[w] < 0) continue;
    if ((double)from_x[w] + (double)from_y[w] > budget) continue;
    verts.clear();
    verts.push_back(x);
    if (!detail::trace_geodesic(G, ball, x, w, verts)) continue;
    if (!detail::trace_geodesic(G, ball, w, y, verts)) continue;
    ++report.candidates;
    int64_t len = (int64_t)verts.size() - 1;  // edges of the traced path
    int64_t deviation = 0;
    for (uint32_t v : verts) deviation = std::max<int64_t>(deviation, fields.to_axis[v]);
    report.max_deviation = std::max(report.max_deviation, deviation);
    report.paths.push_back(
        {format_word(G.generators(), ball.word_to(w)), len, deviation});
  }
  if (report.candidates == 0)
    throw ResourceError("no detour candidate met the length bound inside the ball",
                        ball.radius());
  return report;
}

// ---------------------------------------------------------------------------
// Quadratic growth audit for axis divergence tables
// ---------------------------------------------------------------------------

struct AxisAuditResult {
  OrderVerdict verdict = OrderVerdict::Undetermined;
  double C = 0.0;
  std::string note;
  OrderSearch search;
};

// Lower-bound audit: does the axis divergence table grow at least
// quadratically?  Requires finite values at >= 4 grid points; certified
// infinities or censored entries make the audit meaningless at this scale
// and yield Undetermined with an explanation instead of a verdict.
inline AxisAuditResult axis_quadratic_audit(const std::vector<AxisPoint>& table,
                                            std::vector<double> ladder = default_constant_ladder()) {
  AxisAuditResult out;
  uint32_t finite = 0, infinite = 0, censored = 0;
  for (const AxisPoint& ap : table) {
    switch (ap.len.status) {
      case ExtendedLength::Status::Finite: ++finite; break;
      case ExtendedLength::Status::Infinite: ++infinite; break;
      default: ++censored; break;
    }
  }
  if (infinite + censored > 0) {
    out.note = "table not fully finite: " + std::to_string(infinite) +
               " certified-infinite and " + std::to_string(censored) +
               " censored entries; widen the ambient ball or lower the scales";
    return out;
  }
  if (finite < 4) {
    out.note = "need finite values at >= 4 scales, have " + std::to_string(finite);
    return out;
  }
  std::vector<OrderSample> f;
  for (const AxisPoint& ap : table) f.push_back(order_sample(ap.r, ap.len));
  out.search = quadratic_lower_audit(f, std::move(ladder));
  out.verdict = out.search.verdict;
  if (out.search.verdict == OrderVerdict::Holds) {
    out.C = out.search.C;
    out.note = "quadratic lower bound certified";
  } else {
    out.note = "no ladder constant certified a quadratic lower bound";
  }
  return out;
}

}  // namespace divlab

#endif  // DIVLAB_MORSE_HPP
