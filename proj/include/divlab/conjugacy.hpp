#ifndef DIVLAB_CONJUGACY_HPP
#define DIVLAB_CONJUGACY_HPP

// Bounded-radius conjugator search on a materialized ball, shortest-conjugator
// tables with a linear-ratio audit, and the acylindricity profile of a cyclic
// amalgam: how wide the intersection of one factor with a neighborhood of a
// translated factor can get.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "divlab/cayley.hpp"
#include "divlab/common.hpp"
#include "divlab/group_models.hpp"
#include "divlab/words.hpp"

namespace divlab {

// ---------------------------------------------------------------------------
// Conjugator search
// ---------------------------------------------------------------------------

struct ConjugacyResult {
  bool found = false;
  // First witness in ball order: lowest layer, lexicographically least
  // breadth-first word within it.
  std::string conjugator;
  int length = 0;
  // When nothing is found, the search certifies that no conjugator of length
  // up to this radius exists (the requested radius clamped to the ball).
  int searched_radius = 0;
  uint64_t checked = 0;
};

inline ConjugacyResult find_conjugator(const GroupModel& G, const Ball& ball, const Element& u,
                                       const Element& v, int r_max) {
  if (r_max < 0) throw ValidationError("conjugator search radius must be nonnegative");
  ConjugacyResult res;
  res.searched_radius = std::min(r_max, ball.radius());
  const bool fast = G.exact_keys();
  std::string v_key;
  if (fast) G.append_key(v, v_key);
  for (uint32_t i = 0; i < ball.size(); ++i) {
    if (ball.dist(i) > res.searched_radius) break;
    Element g = ball.element_at(G, i);
    Element w = model_mul(G, model_mul(G, g, u), G.inverse(g));
    ++res.checked;
    if (fast) {
      std::string w_key;
      G.append_key(w, w_key);
      if (w_key != v_key) continue;
    }
    // The witness must survive full canonical equality regardless of how the
    // candidate was screened.
    if (!G.equal(w, v)) continue;
    res.found = true;
    res.length = ball.dist(i);
    res.conjugator = format_word(G.generators(), ball.word_to(i));
    return res;
  }
  return res;
}

inline ConjugacyResult find_conjugator(const GroupModel& G, const Ball& ball,
                                       const std::string& u, const std::string& v, int r_max) {
  return find_conjugator(G, ball, evaluate(G, parse_word(G.generators(), u)),
                         evaluate(G, parse_word(G.generators(), v)), r_max);
}

// ---------------------------------------------------------------------------
// Shortest-conjugator table
// ---------------------------------------------------------------------------

struct ConjugatorRow {
  std::string u, v;
  int u_len = 0, v_len = 0;
  bool found = false;
  int shortest = -1;  // -1 when no conjugator was found within the radius
  uint64_t checked = 0;
};

struct ConjugatorTable {
  std::vector<ConjugatorRow> rows;
  int searched_radius = 0;
  // Largest shortest/( |u| + |v| ) over the found rows: the linear-bound
  // audit reports whether this stays bounded across the sample.
  double max_ratio = 0.0;
};

// Word length of an element: its ball layer when inside the ball, otherwise
// the canonical-word length (exact for the lattice, free, and graph-group
// models; an upper bound for the bucketed ones).
inline int element_length(const GroupModel& G, const Ball& ball, const Element& e) {
  int64_t idx = ball.find(G, e);
  if (idx >= 0) return ball.dist((uint32_t)idx);
  return (int)G.canonical_word(e).size();
}

inline ConjugatorTable shortest_conjugator_table(
    const GroupModel& G, const Ball& ball,
    const std::vector<std::pair<std::string, std::string>>& pairs, int r_max) {
  ConjugatorTable table;
  table.searched_radius = std::min(r_max, ball.radius());
  for (const auto& [uw, vw] : pairs) {
    Element ue = evaluate(G, parse_word(G.generators(), uw));
    Element ve = evaluate(G, parse_word(G.generators(), vw));
    ConjugatorRow row;
    row.u = uw;
    row.v = vw;
    row.u_len = element_length(G, ball, ue);
    row.v_len = element_length(G, ball, ve);
    ConjugacyResult r = find_conjugator(G, ball, ue, ve, r_max);
    row.found = r.found;
    row.shortest = r.found ? r.length : -1;
    row.checked = r.checked;
    if (r.found && row.u_len + row.v_len > 0)
      table.max_ratio =
          std::max(table.max_ratio, (double)r.length / (double)(row.u_len + row.v_len));
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Acylindricity profile of a cyclic amalgam
// ---------------------------------------------------------------------------

struct FactorIntersection {
  uint64_t size = 0;       // members of A within r of the translated B, in-ball
  int64_t diameter = 0;    // double-sweep estimate through the ambient ball
  uint64_t censored = 0;   // lookups that left the ball (under-counts the set)
};

namespace detail {

struct AmalgamScan {
  std::vector<uint32_t> a_members;
  std::vector<Element> a_elements;
  std::vector<int32_t> dist_to_b;  // in-ball distance to the image of B
};

inline const AmalgamModel& require_amalgam(const GroupModel& G) {
  const auto* amal = dynamic_cast<const AmalgamModel*>(&G);
  if (!amal)
    throw ValidationError("the acylindricity profile is defined for the cyclic amalgam model");
  return *amal;
}

inline AmalgamScan amalgam_scan(const AmalgamModel& G, const Ball& ball) {
  AmalgamScan scan;
  std::vector<uint32_t> b_members;
  for (uint32_t i = 0; i < ball.size(); ++i) {
    Element e = ball.element_at(G, i);
    if (G.in_factor(e, 0)) {
      scan.a_members.push_back(i);
      scan.a_elements.push_back(e);
    }
    if (G.in_factor(e, 1)) b_members.push_back(i);
  }
  ball_bfs(ball, b_members, scan.dist_to_b);
  return scan;
}

// A ∩ N_r(g·B) inside the ball.  Left-invariance turns the neighborhood test
// into one lookup: d(x, gB) = d(g^{-1} x, B).
inline FactorIntersection factor_intersection(const GroupModel& G, const Ball& ball,
                                              const AmalgamScan& scan, const Element& g, int r) {
  FactorIntersection out;
  Element ginv = G.inverse(g);
  std::vector<uint32_t> hits;
  for (size_t k = 0; k < scan.a_members.size(); ++k) {
    int64_t j = ball.find(G, model_mul(G, ginv, scan.a_elements[k]));
    if (j < 0) {
      ++out.censored;
      continue;
    }
    int32_t d = scan.dist_to_b[(size_t)j];
    if (d >= 0 && d <= r) hits.push_back(scan.a_members[k]);
  }
  out.size = hits.size();
  if (hits.size() < 2) return out;
  std::vector<int32_t> dist;
  ball_bfs(ball, {hits.front()}, dist);
  uint32_t far = hits.front();
  for (uint32_t h : hits)
    if (dist[h] > dist[far]) far = h;
  ball_bfs(ball, {far}, dist);
  for (uint32_t h : hits) out.diameter = std::max<int64_t>(out.diameter, dist[h]);
  return out;
}

}  // namespace detail

inline FactorIntersection factor_intersection_diameter(const GroupModel& G, const Ball& ball,
                                                       const Element& g, int r) {
  const AmalgamModel& amal = detail::require_amalgam(G);
  if (r < 0) throw ValidationError("neighborhood radius must be nonnegative");
  return detail::factor_intersection(G, ball, detail::amalgam_scan(amal, ball), g, r);
}

inline FactorIntersection factor_intersection_diameter(const GroupModel& G, const Ball& ball,
                                                       const std::string& g, int r) {
  return factor_intersection_diameter(G, ball, evaluate(G, parse_word(G.generators(), g)), r);
}

struct AcylindricityPoint {
  int r = 0;
  int64_t f_estimate = 0;  // max diameter over all translates g in B(1, r)
  std::string witness;     // a g realizing the max
  uint64_t translates = 0;
  uint64_t censored = 0;
};

struct AcylindricityProfile {
  std::vector<AcylindricityPoint> points;  // one per r = 0..r_max
  int censoring_radius = 0;                // everything is relative to this ball
  bool scale_limited = true;
};

inline AcylindricityProfile acylindricity_profile(const GroupModel& G, const Ball& ball,
                                                  int r_max) {
  const AmalgamModel& amal = detail::require_amalgam(G);
  if (r_max < 0) throw ValidationError("profile radius must be nonnegative");
  detail::AmalgamScan scan = detail::amalgam_scan(amal, ball);
  AcylindricityProfile profile;
  profile.censoring_radius = ball.radius();
  for (int r = 0; r <= std::min(r_max, ball.radius()); ++r) {
    AcylindricityPoint point;
    point.r = r;
    for (uint32_t i = 0; i < ball.size(); ++i) {
      if (ball.dist(i) > r) break;
      Element g = ball.element_at(G, i);
      FactorIntersection fi = detail::factor_intersection(G, ball, scan, g, r);
      point.censored += fi.censored;
      ++point.translates;
      if (fi.diameter > point.f_estimate) {
        point.f_estimate = fi.diameter;
        point.witness = format_word(G.generators(), ball.word_to(i));
      }
    }
    profile.points.push_back(std::move(point));
  }
  return profile;
}

}  // namespace divlab

#endif  // DIVLAB_CONJUGACY_HPP
