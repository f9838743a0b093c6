#include "divlab/divergence.hpp"

#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "divlab/cayley.hpp"
#include "divlab/group_models.hpp"
#include "oracles.hpp"

namespace {

using namespace divlab;

std::pair<int64_t, int64_t> coords(const GroupModel& G, const Ball& b, uint32_t i) {
  Element e = b.element_at(G, i);
  return {e.ints[0], e.ints[1]};
}

uint32_t grid_entry(const GroupModel& G, const Ball& b, int64_t x, int64_t y) {
  Element e;
  e.ints = {x, y};
  int64_t idx = b.find(G, e);
  EXPECT_GE(idx, 0) << "(" << x << "," << y << ")";
  return (uint32_t)idx;
}

// ---------------------------------------------------------------------------
// Single triples against the plane oracle
// ---------------------------------------------------------------------------

TEST(DivTriple, MatchesGridOracleAcrossParameters) {
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 9);
  const std::vector<std::pair<int64_t, int64_t>> as = {{4, 0}, {3, 2}, {0, -5}, {2, 2}};
  const std::vector<std::pair<int64_t, int64_t>> bs = {{-4, 0}, {-3, -2}, {0, 5}, {-2, 3}};
  const std::vector<std::pair<int64_t, int64_t>> cs = {{0, 0}, {1, 0}, {-1, 2}};
  for (double delta : {0.5, 0.9})
    for (double gamma : {0.0, 2.0})
      for (auto ca : as)
        for (auto cb : bs)
          for (auto cc : cs) {
            if (ca == cc || cb == cc) continue;
            uint32_t a = grid_entry(*G, ball, ca.first, ca.second);
            uint32_t b = grid_entry(*G, ball, cb.first, cb.second);
            uint32_t c = grid_entry(*G, ball, cc.first, cc.second);
            TripleResult t = div_triple(*G, ball, a, b, c, delta, gamma);
            int64_t r = std::min(oracle::grid_distance(ca, cc), oracle::grid_distance(cb, cc));
            ASSERT_EQ(t.r, r);
            int64_t want =
                oracle::grid_avoidant_distance(ca, cb, cc, delta * (double)r - gamma, 9);
            if (want >= 0) {
              EXPECT_EQ(t.length.status, ExtendedLength::Status::Finite);
              EXPECT_EQ(t.length.value, want);
            } else {
              EXPECT_NE(t.length.status, ExtendedLength::Status::Finite);
            }
          }
}

TEST(DivTriple, PlaneNeverCertifiesInfinite) {
  // An L1 obstacle ball cannot enclose an allowed pocket: from any allowed
  // vertex, stepping away from the obstacle stays allowed until the ambient
  // boundary.  A non-finite verdict must therefore be censored, not certified.
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 6);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    uint32_t a = (uint32_t)rng.below(ball.size());
    uint32_t b = (uint32_t)rng.below(ball.size());
    uint32_t c = (uint32_t)rng.below(ball.size());
    if (a == c || b == c) continue;
    TripleResult t = div_triple(*G, ball, a, b, c, 0.95, 0.0);
    EXPECT_NE(t.length.status, ExtendedLength::Status::Infinite);
  }
}

TEST(DivTriple, CensoredCarriesBoundaryRoundTripBound) {
  // Endpoints on the outermost sphere with the whole interior forbidden:
  // the only conceivable paths leave the ambient ball, so the result is
  // censored with the round-trip lower bound (R+1-|a|) + (R+1-|b|) = 2.
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 6);
  uint32_t a = grid_entry(*G, ball, 6, 0);
  uint32_t b = grid_entry(*G, ball, -6, 0);
  TripleResult t = div_triple(*G, ball, a, b, 0, 0.95, 0.0);
  EXPECT_EQ(t.r, 6);
  EXPECT_EQ(t.length.status, ExtendedLength::Status::Censored);
  EXPECT_EQ(t.length.value, 2);
  EXPECT_TRUE(t.boundary_touched);
}

TEST(DivTriple, TreeSeparationIsCertified) {
  auto G = make_free(2);
  Ball ball = build_ball(*G, 8);
  Element a4 = evaluate(*G, parse_word(G->generators(), "a a a a"));
  Element b4 = evaluate(*G, parse_word(G->generators(), "b b b b"));
  uint32_t a = (uint32_t)ball.find(*G, a4);
  uint32_t b = (uint32_t)ball.find(*G, b4);
  // The unique a->b arc passes the identity, inside the forbidden ball.
  TripleResult t = div_triple(*G, ball, a, b, 0, 0.9, 0.0);
  EXPECT_EQ(t.length.status, ExtendedLength::Status::Infinite);
  // With no effective obstacle the same pair is plainly connected.
  TripleResult open = div_triple(*G, ball, a, b, 0, 0.5, 2.0);
  EXPECT_EQ(open.length.status, ExtendedLength::Status::Finite);
  EXPECT_EQ(open.length.value, 8);
}

TEST(DivTriple, ValueIsMonotoneInObstacleRadius) {
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 9);
  uint32_t a = grid_entry(*G, ball, 5, 0);
  uint32_t b = grid_entry(*G, ball, -5, 0);
  int64_t prev = -1;
  for (double delta : {0.2, 0.4, 0.6, 0.8, 0.95}) {
    TripleResult t = div_triple(*G, ball, a, b, 0, delta, 0.0);
    ASSERT_EQ(t.length.status, ExtendedLength::Status::Finite);
    EXPECT_GE(t.length.value, prev);
    prev = t.length.value;
  }
}

TEST(DivTriple, RejectsCoincidingCenter) {
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 4);
  uint32_t a = grid_entry(*G, ball, 2, 0);
  uint32_t b = grid_entry(*G, ball, -2, 0);
  EXPECT_THROW(div_triple(*G, ball, a, b, a, 0.5, 0.0), ValidationError);
  EXPECT_THROW(div_triple(*G, ball, a, b, b, 1.5, 0.0), ValidationError);  // delta out of range
  EXPECT_THROW(div_triple(*G, ball, a, b, b, 1.0, 0.0), ValidationError);  // interval is open
}

// ---------------------------------------------------------------------------
// Divergence as a function of n
// ---------------------------------------------------------------------------

TEST(DivFunction, PlaneMidpointMatchesHandValues) {
  // delta=1/2, gamma=2: the forbidden radius at scale n is n/4 - 2, and a
  // worst antipodal pair must climb to |y| = ceil(n/4-2) while crossing,
  // adding twice that to the straight distance n.
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 16);
  DivergenceParams p;
  p.max_scans = 2000;  // spheres up to radius 6: exhaustive
  auto pts = div_function(*G, ball, DivMode::Midpoint, {4, 8, 12}, p);
  std::map<int, int64_t> want = {{4, 4}, {8, 8}, {12, 14}};
  for (const DivPoint& pt : pts) {
    ASSERT_TRUE(pt.any) << pt.n;
    ASSERT_EQ(pt.len.status, ExtendedLength::Status::Finite) << pt.n;
    EXPECT_EQ(pt.len.value, want[pt.n]) << pt.n;
    EXPECT_TRUE(pt.exhaustive);
  }
}

TEST(DivFunction, PlaneMidpointMatchesBruteForceSup) {
  auto G = make_zn(2);
  const int R = 8, n = 6;
  Ball ball = build_ball(*G, R);
  const double delta = 0.95, gamma = 0.0;

  int64_t best = -1;
  uint64_t pairs = 0;
  auto [lo, hi] = ball.sphere(n / 2);
  for (uint32_t i = lo; i < hi; ++i)
    for (uint32_t j = i + 1; j < hi; ++j) {
      auto ci = coords(*G, ball, i), cj = coords(*G, ball, j);
      if (oracle::grid_distance(ci, cj) != n) continue;
      ++pairs;
      int64_t v = oracle::grid_avoidant_distance(ci, cj, {0, 0}, delta * (n / 2) - gamma, R);
      ASSERT_GE(v, 0);
      best = std::max(best, v);
    }

  DivergenceParams p;
  p.delta = delta;
  p.gamma = gamma;
  auto pts = div_function(*G, ball, DivMode::Midpoint, {n}, p);
  ASSERT_EQ(pts.size(), 1u);
  ASSERT_TRUE(pts[0].any);
  EXPECT_TRUE(pts[0].exhaustive);
  ASSERT_EQ(pts[0].len.status, ExtendedLength::Status::Finite);
  EXPECT_EQ(pts[0].len.value, best);
  EXPECT_EQ(pts[0].pairs, pairs);
  // The recorded witness pair reproduces the reported value.
  uint32_t wa = (uint32_t)ball.find(*G, evaluate(*G, parse_word(G->generators(), pts[0].witness_a)));
  uint32_t wb = (uint32_t)ball.find(*G, evaluate(*G, parse_word(G->generators(), pts[0].witness_b)));
  TripleResult t = div_triple(*G, ball, wa, wb, 0, delta, gamma);
  EXPECT_EQ(t.length, pts[0].len);
}

TEST(DivFunction, PlaneBetweenMatchesBruteForceSup) {
  auto G = make_zn(2);
  const int R = 6, n = 6;
  Ball ball = build_ball(*G, R);
  const double delta = 0.95, gamma = 0.0;

  int64_t best = -1;
  bool censored = false;
  for (uint32_t i = 0; i < ball.size(); ++i)
    for (uint32_t j = i; j < ball.size(); ++j) {
      auto ci = coords(*G, ball, i), cj = coords(*G, ball, j);
      int64_t la = ball.dist(i), lb = ball.dist(j);
      if (la < 1 || lb < 1 || la + lb > n) continue;
      if (oracle::grid_distance(ci, cj) != la + lb) continue;
      int64_t r = std::min(la, lb);
      int64_t v = oracle::grid_avoidant_distance(ci, cj, {0, 0}, delta * (double)r - gamma, R);
      if (v < 0)
        censored = true;
      else
        best = std::max(best, v);
    }

  DivergenceParams p;
  p.delta = delta;
  p.gamma = gamma;
  p.max_scans = 500;
  auto pts = div_function(*G, ball, DivMode::Between, {n}, p);
  ASSERT_EQ(pts.size(), 1u);
  ASSERT_TRUE(pts[0].any);
  EXPECT_TRUE(pts[0].exhaustive);
  if (censored) {
    EXPECT_EQ(pts[0].len.status, ExtendedLength::Status::Censored);
    EXPECT_GE(pts[0].len.value, best);
  } else {
    EXPECT_EQ(pts[0].len.status, ExtendedLength::Status::Finite);
    EXPECT_EQ(pts[0].len.value, best);
  }
}

TEST(DivFunction, ModeSupsAreOrdered) {
  // Midpoint pairs are between-pairs, and the identity is a valid free
  // center, so the three suprema are pointwise nondecreasing.
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 8);
  DivergenceParams p;
  p.delta = 0.5;
  p.gamma = 0.0;
  p.max_scans = 50000;  // keep the free-center enumeration exhaustive
  for (int n : {4, 6}) {
    auto mid = div_function(*G, ball, DivMode::Midpoint, {n}, p);
    auto bet = div_function(*G, ball, DivMode::Between, {n}, p);
    auto fre = div_function(*G, ball, DivMode::FreeCenter, {n}, p);
    ASSERT_TRUE(mid[0].any && bet[0].any && fre[0].any);
    ASSERT_TRUE(mid[0].exhaustive && bet[0].exhaustive && fre[0].exhaustive);
    EXPECT_FALSE(sup_better(mid[0].len, bet[0].len)) << n;
    EXPECT_FALSE(sup_better(bet[0].len, fre[0].len)) << n;
  }
}

TEST(DivFunction, FreeGroupMidpointIsCertifiedInfinite) {
  // Every pair at distance n on opposite spheres meets at the identity, so
  // any forbidden ball there separates them for good.
  auto G = make_free(2);
  Ball ball = build_ball(*G, 7);
  DivergenceParams p;
  p.delta = 0.9;
  p.gamma = 0.0;
  p.max_scans = 10;  // sampled: certification must not depend on coverage
  auto pts = div_function(*G, ball, DivMode::Midpoint, {6}, p);
  ASSERT_TRUE(pts[0].any);
  EXPECT_FALSE(pts[0].exhaustive);
  EXPECT_EQ(pts[0].len.status, ExtendedLength::Status::Infinite);
}

TEST(DivFunction, PaddedSchemeSitsBetweenPinnedAndFreeCenters) {
  // Every between-pair satisfies lambda*r >= 2r >= d(a,b), and the identity
  // is one of the free centers, so the padded supremum is sandwiched.
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 8);
  DivergenceParams p;
  p.delta = 0.5;
  p.gamma = 0.0;
  p.max_scans = 60000;
  for (int n : {4, 6}) {
    auto mid = div_function(*G, ball, DivMode::Midpoint, {n}, p);
    auto bet = div_function(*G, ball, DivMode::Between, {n}, p);
    auto fre = div_function(*G, ball, DivMode::FreeCenter, {n}, p);
    DivPoint sml = small_div(*G, ball, n, p);
    ASSERT_TRUE(bet[0].any && sml.any && fre[0].any);
    ASSERT_TRUE(bet[0].exhaustive && sml.exhaustive && fre[0].exhaustive);
    EXPECT_EQ(sml.lambda, 2.0);
    EXPECT_FALSE(sup_better(mid[0].len, sml.len)) << n;   // midpoint pairs admissible
    EXPECT_FALSE(sup_better(bet[0].len, sml.len)) << n;   // between-pairs admissible
    EXPECT_FALSE(sup_better(sml.len, fre[0].len)) << n;   // a sub-domain of free centers
  }

  // A looser padding factor only widens the pair domain.
  DivergenceParams loose = p;
  loose.lambda = 4.0;
  auto tight = div_function(*G, ball, DivMode::Small, {6}, [&] {
    DivergenceParams q = p;
    q.lambda = 2.0;
    return q;
  }());
  auto wide = div_function(*G, ball, DivMode::Small, {6}, loose);
  EXPECT_LE(tight[0].pairs, wide[0].pairs);
  EXPECT_FALSE(sup_better(tight[0].len, wide[0].len));

  // The empty supremum at n = 0 and the mandatory padding factor.
  DivPoint zero = small_div(*G, ball, 0, p);
  EXPECT_EQ(zero.len, (ExtendedLength{ExtendedLength::Status::Finite, 0}));
  DivergenceParams bad = p;
  bad.lambda = 1.9;
  EXPECT_THROW(div_function(*G, ball, DivMode::Small, {6}, bad), ValidationError);
  EXPECT_THROW(div_function(*G, ball, DivMode::Small, {6}, p), ValidationError);  // lambda unset
}

TEST(DivFunction, SamplingIsDeterministicAndProbesOnlyAdd) {
  auto G = make_raag(path_graph(3));
  Ball ball = build_ball(*G, 6);
  DivergenceParams p;
  p.max_scans = 4;  // force sampling
  p.sample_scans = 12;
  p.seed = 99;
  auto run1 = div_function(*G, ball, DivMode::Midpoint, {6}, p);
  auto run2 = div_function(*G, ball, DivMode::Midpoint, {6}, p);
  ASSERT_TRUE(run1[0].any);
  EXPECT_FALSE(run1[0].exhaustive);
  EXPECT_EQ(run1[0].len, run2[0].len);
  EXPECT_EQ(run1[0].witness_a, run2[0].witness_a);
  EXPECT_EQ(run1[0].witness_b, run2[0].witness_b);
  EXPECT_EQ(run1[0].pairs, run2[0].pairs);

  DivergenceParams with_probe = p;
  with_probe.probes.push_back({"a a a", ""});
  auto run3 = div_function(*G, ball, DivMode::Midpoint, {6}, with_probe);
  ASSERT_TRUE(run3[0].any);
  EXPECT_GE(run3[0].pairs, run1[0].pairs);
  EXPECT_FALSE(sup_better(run1[0].len, run3[0].len));  // superset of scans

  DivergenceParams bad = p;
  bad.probes.push_back({"a a a a a a a a a a", ""});
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {6}, bad), ValidationError);
}

TEST(DivFunction, ThreadCountDoesNotChangeResults) {
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 10);
  DivergenceParams p1;
  p1.max_scans = 5000;
  DivergenceParams p4 = p1;
  p4.threads = 4;
  auto a = div_function(*G, ball, DivMode::Midpoint, {6, 8, 10}, p1);
  auto b = div_function(*G, ball, DivMode::Midpoint, {6, 8, 10}, p4);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].len, b[i].len);
    EXPECT_EQ(a[i].pairs, b[i].pairs);
    EXPECT_EQ(a[i].witness_a, b[i].witness_a);
    EXPECT_EQ(a[i].witness_b, b[i].witness_b);
  }
}

TEST(DivFunction, ValidatesParameters) {
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 4);
  DivergenceParams p;
  p.delta = 0.0;
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {4}, p), ValidationError);
  p.delta = 1.5;
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {4}, p), ValidationError);
  p.delta = 1.0;
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {4}, p), ValidationError);
  p.delta = 0.5;
  p.gamma = -1.0;
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {4}, p), ValidationError);
  p.gamma = 0.0;
  p.lambda = 1.0;
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {4}, p), ValidationError);
  p.lambda = 0.0;
  EXPECT_THROW(div_function(*G, ball, DivMode::Midpoint, {0}, p), ValidationError);
}

// ---------------------------------------------------------------------------
// Axis divergence
// ---------------------------------------------------------------------------

TEST(AxisDivergence, PlaneAxisMatchesOracle) {
  auto G = make_zn(2);
  Ball ball = build_ball(*G, 9);
  Word g = parse_word(G->generators(), "e1");
  auto pts = axis_divergence(*G, ball, g, {2, 4}, 0.95, 0.0);
  ASSERT_EQ(pts.size(), 2u);
  for (const AxisPoint& ap : pts) {
    EXPECT_EQ(ap.m, ap.r);  // |e1^m| = m
    EXPECT_EQ(ap.r_actual, ap.r);
    int64_t want = oracle::grid_avoidant_distance({ap.m, 0}, {-ap.m, 0}, {0, 0},
                                                  0.95 * (double)ap.r_actual, 9);
    ASSERT_GE(want, 0);
    ASSERT_EQ(ap.len.status, ExtendedLength::Status::Finite);
    EXPECT_EQ(ap.len.value, want);
  }
}

TEST(AxisDivergence, FreeGroupAxisIsInfinite) {
  auto G = make_free(2);
  Ball ball = build_ball(*G, 8);
  Word g = parse_word(G->generators(), "a");
  auto pts = axis_divergence(*G, ball, g, {3}, 0.9, 0.0);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].m, 3);
  EXPECT_EQ(pts[0].len.status, ExtendedLength::Status::Infinite);
}

TEST(AxisDivergence, ScaleBeyondBallRaisesResourceError) {
  auto G = make_free(2);
  Ball ball = build_ball(*G, 5);
  Word g = parse_word(G->generators(), "a");
  EXPECT_THROW(axis_divergence(*G, ball, g, {9}, 0.5, 0.0), ResourceError);
  EXPECT_THROW(axis_divergence(*G, ball, Word{}, {2}, 0.5, 0.0), ValidationError);
}

TEST(AxisDivergence, TwistedAxisStaysFiniteOrCensored) {
  // One-ended geometry: separation can only be censored, never certified,
  // and any finite value is at least the straight-line distance 2m.
  auto G = make_gersten();
  Ball ball = build_ball(*G, 8);
  Word g = parse_word(G->generators(), "t");
  auto pts = axis_divergence(*G, ball, g, {2, 3}, 0.9, 0.0);
  for (const AxisPoint& ap : pts) {
    EXPECT_NE(ap.len.status, ExtendedLength::Status::Infinite) << ap.r;
    if (ap.len.status == ExtendedLength::Status::Finite) EXPECT_GE(ap.len.value, 2 * ap.m);
  }
}

}  // namespace
