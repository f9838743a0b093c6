#ifndef DIVLAB_DIVERGENCE_HPP
#define DIVLAB_DIVERGENCE_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "divlab/cayley.hpp"
#include "divlab/common.hpp"
#include "divlab/group_models.hpp"
#include "divlab/words.hpp"

namespace divlab {

inline constexpr double kDefaultDelta = 0.5;
inline constexpr double kDefaultGamma = 2.0;

// Length of a shortest obstacle-avoiding path, which may be exactly known,
// certified nonexistent, or cut off by the ambient ball.  A censored result
// carries a sound lower bound: every avoiding path must leave the ambient
// ball, so its length is at least the round trip to the boundary.
struct ExtendedLength {
  enum class Status { Finite, Infinite, Censored };
  Status status = Status::Finite;
  int64_t value = 0;

  static ExtendedLength finite(int64_t v) { return {Status::Finite, v}; }
  static ExtendedLength infinite() { return {Status::Infinite, 0}; }
  static ExtendedLength censored(int64_t lower) { return {Status::Censored, lower}; }
  bool operator==(const ExtendedLength&) const = default;
};

inline const char* to_string(ExtendedLength::Status s) {
  switch (s) {
    case ExtendedLength::Status::Finite: return "finite";
    case ExtendedLength::Status::Infinite: return "infinite";
    default: return "censored";
  }
}

// Strict weak "prefer as supremum witness" order: certified infinity beats
// everything; otherwise larger value; on ties a censored bound (true value
// possibly larger) beats an exact one.
inline bool sup_better(const ExtendedLength& x, const ExtendedLength& y) {
  auto rank = [](const ExtendedLength& e) {
    return e.status == ExtendedLength::Status::Infinite ? 2 : 1;
  };
  if (rank(x) != rank(y)) return rank(x) > rank(y);
  if (x.status == ExtendedLength::Status::Infinite) return false;
  if (x.value != y.value) return x.value > y.value;
  return x.status == ExtendedLength::Status::Censored &&
         y.status == ExtendedLength::Status::Finite;
}

enum class DivMode { Midpoint, Between, FreeCenter, Small };

inline const char* to_string(DivMode m) {
  switch (m) {
    case DivMode::Midpoint: return "midpoint";
    case DivMode::Between: return "between";
    case DivMode::FreeCenter: return "freecenter";
    default: return "small";
  }
}

// Ambient ball sizing: radius = core * multiplier + slack, clamped to at
// least core and (when cap > 0) at most cap.  `core` is the largest element
// length the query itself mentions; everything beyond it is wander room for
// avoiding paths.
struct AmbientPolicy {
  int multiplier = 3;
  int slack = 2;
  int cap = 0;

  int radius_for(int core) const {
    int64_t r = (int64_t)core * multiplier + slack;
    if (cap > 0) r = std::min<int64_t>(r, cap);
    return (int)std::max<int64_t>(r, core);
  }
};

struct ProbeSpec {
  std::string a;  // word for the scan endpoint
  std::string c;  // word for the obstacle center (empty = identity)
};

struct DivergenceParams {
  double delta = kDefaultDelta;
  double gamma = kDefaultGamma;
  // Admissibility filter lambda * r >= d(a,b) of the padded ("small")
  // variant; 0 disables it (plain divergence).
  double lambda = 0.0;
  // Enumeration is exhaustive while the scan count stays within max_scans;
  // beyond that, sample_scans scans are drawn deterministically from seed.
  uint64_t max_scans = 20000;
  uint32_t sample_scans = 48;
  uint32_t min_scans = 16;
  uint64_t seed = 0x5eed;
  int threads = 1;
  AmbientPolicy ambient;  // how drivers size the ball for a given n-grid
  std::vector<ProbeSpec> probes;
};

struct DivPoint {
  DivMode mode = DivMode::Midpoint;
  int n = 0;
  double delta = kDefaultDelta, gamma = kDefaultGamma, lambda = 0.0;
  ExtendedLength len;
  uint64_t pairs = 0;   // admissible pairs aggregated into this point
  bool exhaustive = true;
  bool any = false;     // false = no admissible pair (len meaningless)
  std::string witness_a, witness_b, witness_c;
  int64_t witness_m = 0;  // d(a,b) of the witness pair
};

// ---------------------------------------------------------------------------
// Core per-scan machinery
// ---------------------------------------------------------------------------

namespace detail {

struct ScanTask {
  uint32_t c = 0;  // obstacle center entry (0 = identity)
  uint32_t a = 0;  // path endpoint entry
};

struct Bucket {
  uint64_t pairs = 0;
  bool any = false;
  ExtendedLength best;
  uint32_t witness_b = kNoEntry;
};

struct ScanOutcome {
  ScanTask task;
  std::map<int, Bucket> buckets;  // keyed by the pair-distance class d(a,b)
};

struct ScanScratch {
  std::vector<int32_t> dist_c;   // from the obstacle center
  std::vector<int32_t> dist_a;   // plain, from the endpoint
  std::vector<int32_t> avoid_a;  // avoiding the forbidden ball, from the endpoint
  bool boundary_touched = false;
  uint32_t dist_c_for = kNoEntry;
};

// Runs fn(i) for i in [0, count), possibly on several threads.  Each i gets
// a stable slot, so results are deterministic regardless of thread count.
template <class Fn>
void run_indexed(size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  size_t T = std::min<size_t>((size_t)threads, count);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(T);
  for (size_t t = 0; t < T; ++t)
    pool.emplace_back([&, t] {
      for (size_t i; (i = next.fetch_add(1)) < count;) fn(i, t);
    });
  for (auto& th : pool) th.join();
}

inline void validate_divergence_inputs(double delta, double gamma, double lambda) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw ValidationError("delta must lie in the open interval (0, 1)");
  if (gamma < 0.0) throw ValidationError("gamma must be nonnegative");
  if (lambda != 0.0 && lambda < 2.0)
    throw ValidationError("lambda must be 0 (disabled) or at least 2");
}

// Avoiding-path BFS for one scan: distances from `a` through entries whose
// distance from the obstacle center is at least rho.  Tracks whether the
// explored component touches the ambient boundary (needed to certify
// nonexistence) .
inline void avoidant_scan(const Ball& ball, uint32_t a, const std::vector<int32_t>& dist_c,
                          double rho, ScanScratch& s) {
  s.boundary_touched = false;
  if (rho <= 0.0) {
    ball_bfs(ball, {a}, s.avoid_a);
    return;
  }
  const int R = ball.radius();
  auto allowed = [&](uint32_t i) { return (double)dist_c[i] >= rho; };
  ball_bfs_if(ball, {a}, allowed, s.avoid_a);
  for (uint32_t i = ball.sphere(R).first; i < ball.sphere(R).second; ++i)
    if (s.avoid_a[i] >= 0) {
      s.boundary_touched = true;
      break;
    }
}

// Value of one admissible pair after the scan: exact when the avoiding BFS
// reached b; otherwise certified-infinite (tree geometry, or the explored
// component is enclosed strictly inside the ambient ball) or censored with
// the boundary round-trip bound.
inline ExtendedLength pair_value(const Ball& ball, bool tree, const ScanScratch& s, uint32_t a,
                                 uint32_t b) {
  if (s.avoid_a[b] >= 0) return ExtendedLength::finite(s.avoid_a[b]);
  if (tree || !s.boundary_touched) return ExtendedLength::infinite();
  int64_t exit_bound = (int64_t)(ball.radius() + 1 - ball.dist(a)) +
                       (int64_t)(ball.radius() + 1 - ball.dist(b));
  return ExtendedLength::censored(std::max<int64_t>(exit_bound, 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single triples
// ---------------------------------------------------------------------------

struct TripleResult {
  ExtendedLength length;
  int64_t r = 0;                 // d(c, {a,b})
  double forbidden_radius = 0;   // delta * r - gamma
  int64_t plain_distance = -1;   // d(a,b) within the ambient ball
  bool boundary_touched = false;
};

// div(a, b; c) at one triple of ball entries: length of a shortest a->b path
// avoiding the open ball of radius delta*r - gamma around c, where
// r = d(c, {a,b}) must be positive.  All paths run inside the ambient ball.
inline TripleResult div_triple(const GroupModel& G, const Ball& ball, uint32_t a, uint32_t b,
                               uint32_t c, double delta, double gamma) {
  detail::validate_divergence_inputs(delta, gamma, 0.0);
  TripleResult out;
  detail::ScanScratch s;
  ball_bfs(ball, {c}, s.dist_c);
  if (s.dist_c[a] < 0 || s.dist_c[b] < 0)
    throw ValidationError("triple endpoints unreachable from center inside ambient ball");
  out.r = std::min(s.dist_c[a], s.dist_c[b]);
  if (out.r == 0) throw ValidationError("divergence center must differ from both endpoints");
  out.forbidden_radius = delta * (double)out.r - gamma;

  ball_bfs(ball, {a}, s.dist_a);
  out.plain_distance = s.dist_a[b];

  if (out.forbidden_radius > 0.0 && ((double)s.dist_c[a] < out.forbidden_radius ||
                                     (double)s.dist_c[b] < out.forbidden_radius)) {
    // An endpoint lies inside the forbidden ball: no path can avoid it.
    out.length = ExtendedLength::infinite();
    return out;
  }
  detail::avoidant_scan(ball, a, s.dist_c, out.forbidden_radius, s);
  out.boundary_touched = s.boundary_touched;
  out.length = detail::pair_value(ball, G.tree_graph(), s, a, b);
  return out;
}

// ---------------------------------------------------------------------------
// Divergence as a function of n
// ---------------------------------------------------------------------------

// Pair schemes, all with obstacle-center distance r = d(c, a) <= d(c, b):
//   Midpoint:   c = 1, |a| = floor(n/2), |b| = ceil(n/2), d(a,b) = n exactly.
//   Between:    c = 1, d(a,b) = |a| + |b| <= n (c lies on a geodesic), |a| <= |b|.
//   FreeCenter: any c with r >= 1, any pair with d(a,b) <= n, d(c,a) <= d(c,b).
//   Small:      c = 1, any pair with d(a,b) <= n and lambda * r >= d(a,b).
// Each scan fixes (c, a), runs one plain and one avoiding BFS, and buckets
// every admissible partner b by its distance class m = d(a,b); a point at n
// then aggregates bucket n (Midpoint) or buckets <= n (the sup over smaller
// pairs is part of the definition for the other modes).
inline std::vector<DivPoint> div_function(const GroupModel& G, const Ball& ball, DivMode mode,
                                          std::vector<int> ns, const DivergenceParams& p) {
  detail::validate_divergence_inputs(p.delta, p.gamma, p.lambda);
  if (mode == DivMode::Small && p.lambda < 2.0)
    throw ValidationError("the padded scheme requires lambda >= 2");
  if (ns.empty()) return {};
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.front() < 1) throw ValidationError("divergence scale n must be at least 1");
  const int n_max = ns.back();
  const int R = ball.radius();
  const bool tree = G.tree_graph();

  // --- enumerate candidate scans -------------------------------------------
  // Midpoint/Between tasks have c = identity and a drawn from spheres;
  // FreeCenter tasks range over (c, a) with c in the obstacle scope.
  std::vector<uint32_t> a_candidates;
  std::vector<uint32_t> c_candidates = {0};
  if (mode == DivMode::Midpoint) {
    std::set<int> radii;
    for (int n : ns)
      if (n / 2 >= 1) radii.insert(n / 2);
    for (int j : radii) {
      auto [lo, hi] = ball.sphere(j);
      for (uint32_t i = lo; i < hi; ++i) a_candidates.push_back(i);
    }
  } else if (mode == DivMode::Between) {
    for (int j = 1; j <= n_max / 2 && j <= R; ++j) {
      auto [lo, hi] = ball.sphere(j);
      for (uint32_t i = lo; i < hi; ++i) a_candidates.push_back(i);
    }
  } else {
    // Beyond this radius the forbidden ball stays farther than n_max from
    // any pair it could obstruct, so such scans only reproduce baseline
    // values already covered by closer ones.
    double scope = (double)(n_max - p.gamma) / (1.0 - p.delta);
    int far = (int)std::min<double>(R, std::max(1.0, std::ceil(scope)));
    if (mode == DivMode::FreeCenter) {
      c_candidates.clear();
      for (uint32_t i = ball.sphere(1).first; i < ball.sphere(far).second; ++i)
        c_candidates.push_back(i);
      a_candidates.resize(ball.size());
      for (uint32_t i = 0; i < ball.size(); ++i) a_candidates[i] = i;
    } else {
      // Small: the center is the identity and r = |a|, so the same scope
      // bound applies to the scanning endpoint instead.
      for (uint32_t i = ball.sphere(1).first; i < ball.sphere(far).second; ++i)
        a_candidates.push_back(i);
    }
  }

  const uint64_t total_scans = (uint64_t)c_candidates.size() * a_candidates.size();
  std::vector<detail::ScanTask> tasks;
  const bool exhaustive = total_scans <= p.max_scans;
  auto task_of = [&](uint64_t id) -> detail::ScanTask {
    return {c_candidates[id / a_candidates.size()], a_candidates[id % a_candidates.size()]};
  };
  if (exhaustive) {
    tasks.reserve(total_scans);
    for (uint64_t id = 0; id < total_scans; ++id) tasks.push_back(task_of(id));
  } else {
    uint32_t want = std::max(p.min_scans, p.sample_scans);
    for (uint64_t id : sample_distinct(total_scans, want, p.seed)) tasks.push_back(task_of(id));
  }
  // Probe scans are always included (deduplicated).
  {
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (const auto& t : tasks) seen.insert({t.c, t.a});
    for (const ProbeSpec& probe : p.probes) {
      Element ea = evaluate(G, parse_word(G.generators(), probe.a));
      int64_t ia = ball.find(G, ea);
      if (ia < 0) throw ValidationError("probe endpoint outside ambient ball: " + probe.a);
      uint32_t ic = 0;
      if (!probe.c.empty()) {
        if (mode != DivMode::FreeCenter)
          throw ValidationError("obstacle-center probes only apply to freecenter mode");
        Element ec = evaluate(G, parse_word(G.generators(), probe.c));
        int64_t found = ball.find(G, ec);
        if (found < 0) throw ValidationError("probe center outside ambient ball: " + probe.c);
        ic = (uint32_t)found;
      }
      if (seen.insert({ic, (uint32_t)ia}).second) tasks.push_back({ic, (uint32_t)ia});
    }
  }

  // --- run scans -------------------------------------------------------------
  std::vector<detail::ScanOutcome> outcomes(tasks.size());
  int T = std::max(1, p.threads);
  std::vector<detail::ScanScratch> scratch((size_t)T);
  detail::run_indexed(tasks.size(), T, [&](size_t i, size_t tid) {
    detail::ScanScratch& s = scratch[tid];
    detail::ScanOutcome& out = outcomes[i];
    out.task = tasks[i];
    const uint32_t c = tasks[i].c, a = tasks[i].a;
    if (s.dist_c_for != c) {
      ball_bfs(ball, {c}, s.dist_c);
      s.dist_c_for = c;
    }
    const auto& dc = s.dist_c;
    const int64_t r = dc[a];
    if (r < 1) return;  // a == c (or unreachable): no admissible pair
    const double rho = p.delta * (double)r - p.gamma;

    ball_bfs(ball, {a}, s.dist_a);
    detail::avoidant_scan(ball, a, s.dist_c, rho, s);

    auto consider = [&](uint32_t b) {
      int32_t m = s.dist_a[b];
      if (m < 0) return;
      if (p.lambda > 0.0 && p.lambda * (double)r < (double)m) return;
      detail::Bucket& bucket = out.buckets[m];
      ++bucket.pairs;
      ExtendedLength v = detail::pair_value(ball, tree, s, a, b);
      if (!bucket.any || sup_better(v, bucket.best)) {
        bucket.any = true;
        bucket.best = v;
        bucket.witness_b = b;
      }
    };

    // When both endpoints sit in the same distance class the pair would be
    // scanned twice; in exhaustive mode, keep only the scan from the
    // smaller-index endpoint (sampled scans keep full coverage instead).
    auto duplicate_pair = [&](uint32_t b, bool same_class) {
      return exhaustive && same_class && b < a;
    };
    if (mode == DivMode::Midpoint) {
      int j = (int)r;
      for (int partner : {j, j + 1}) {
        if (partner > R) continue;
        int n = j + partner;
        auto [lo, hi] = ball.sphere(partner);
        for (uint32_t b = lo; b < hi; ++b)
          if (s.dist_a[b] == n && !duplicate_pair(b, partner == j)) consider(b);
      }
    } else if (mode == DivMode::Between) {
      for (int partner = (int)r; partner + (int)r <= n_max && partner <= R; ++partner) {
        auto [lo, hi] = ball.sphere(partner);
        for (uint32_t b = lo; b < hi; ++b)
          if (s.dist_a[b] == (int32_t)r + partner && !duplicate_pair(b, partner == (int)r))
            consider(b);
      }
    } else {
      for (uint32_t b = 0; b < ball.size(); ++b) {
        if (b == a || dc[b] < (int32_t)r) continue;  // covered from the other endpoint
        if (s.dist_a[b] >= 0 && s.dist_a[b] <= n_max && !duplicate_pair(b, dc[b] == (int32_t)r))
          consider(b);
      }
    }
  });

  // --- aggregate ---------------------------------------------------------------
  struct Agg {
    detail::Bucket bucket;
    uint32_t witness_a = kNoEntry, witness_c = kNoEntry;
  };
  std::map<int, Agg> agg;
  for (const auto& out : outcomes)
    for (const auto& [m, bucket] : out.buckets) {
      Agg& g = agg[m];
      g.bucket.pairs += bucket.pairs;
      if (bucket.any && (!g.bucket.any || sup_better(bucket.best, g.bucket.best))) {
        g.bucket.any = true;
        g.bucket.best = bucket.best;
        g.bucket.witness_b = bucket.witness_b;
        g.witness_a = out.task.a;
        g.witness_c = out.task.c;
      }
    }

  std::vector<DivPoint> points;
  for (int n : ns) {
    DivPoint pt;
    pt.mode = mode;
    pt.n = n;
    pt.delta = p.delta;
    pt.gamma = p.gamma;
    pt.lambda = p.lambda;
    pt.exhaustive = exhaustive;
    const Agg* chosen = nullptr;
    int chosen_m = 0;
    for (const auto& [m, g] : agg) {
      bool in_range = mode == DivMode::Midpoint ? m == n : m <= n;
      if (!in_range) continue;
      pt.pairs += g.bucket.pairs;
      if (g.bucket.any && (!pt.any || sup_better(g.bucket.best, pt.len))) {
        pt.any = true;
        pt.len = g.bucket.best;
        chosen = &g;
        chosen_m = m;
      }
    }
    if (chosen) {
      pt.witness_a = format_word(G.generators(), ball.word_to(chosen->witness_a));
      pt.witness_b = format_word(G.generators(), ball.word_to(chosen->bucket.witness_b));
      if (chosen->witness_c != 0)
        pt.witness_c = format_word(G.generators(), ball.word_to(chosen->witness_c));
      pt.witness_m = chosen_m;
    }
    points.push_back(std::move(pt));
  }
  return points;
}

// The padded variant at a single scale: the obstacle sits at the identity
// and only pairs with lambda * r >= d(a,b) are admissible.  n = 0 is the
// empty supremum, reported as 0.
inline DivPoint small_div(const GroupModel& G, const Ball& ball, int n, DivergenceParams p) {
  if (p.lambda == 0.0) p.lambda = 2.0;
  if (n < 0) throw ValidationError("divergence scale n must be nonnegative");
  if (n == 0) {
    detail::validate_divergence_inputs(p.delta, p.gamma, p.lambda);
    DivPoint pt;
    pt.mode = DivMode::Small;
    pt.delta = p.delta;
    pt.gamma = p.gamma;
    pt.lambda = p.lambda;
    pt.any = true;
    pt.len = ExtendedLength{ExtendedLength::Status::Finite, 0};
    return pt;
  }
  return div_function(G, ball, DivMode::Small, {n}, p).front();
}

// ---------------------------------------------------------------------------
// Divergence along the axis of one element
// ---------------------------------------------------------------------------

struct AxisPoint {
  int r = 0;           // requested scale
  int64_t m = 0;       // least power with |g^m| >= r
  int64_t r_actual = 0;  // d(1, {g^m, g^-m})
  ExtendedLength len;
  std::string witness_a, witness_b;
};

// div(g^m, g^-m; 1) with m minimal such that |g^m| >= r, for each r in the
// grid.  Throws ResourceError when the needed power falls outside the ball.
inline std::vector<AxisPoint> axis_divergence(const GroupModel& G, const Ball& ball,
                                              const Word& g, std::vector<int> rs, double delta,
                                              double gamma) {
  detail::validate_divergence_inputs(delta, gamma, 0.0);
  if (g.empty()) throw ValidationError("axis element must be a nonempty word");
  Element ge = evaluate(G, g);
  if (G.is_identity(ge)) throw ValidationError("axis element must not be the identity");
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  if (!rs.empty() && rs.front() < 1) throw ValidationError("axis scale must be at least 1");

  std::vector<AxisPoint> out;
  Element pow = G.identity();
  int64_t m = 0;
  for (int r : rs) {
    // Advance m until |g^m| >= r.
    int64_t a_idx = -1;
    while (true) {
      int64_t idx = ball.find(G, pow);
      if (m > 0 && idx >= 0 && ball.dist((uint32_t)idx) >= r) {
        a_idx = idx;
        break;
      }
      if (idx < 0)
        throw ResourceError("axis power left the ambient ball before reaching scale " +
                                std::to_string(r),
                            ball.radius());
      pow = model_mul(G, pow, ge);
      ++m;
    }
    int64_t b_idx = ball.find(G, G.inverse(pow));
    if (b_idx < 0)
      throw ResourceError("axis inverse power outside the ambient ball", ball.radius());
    TripleResult t = div_triple(G, ball, (uint32_t)a_idx, (uint32_t)b_idx, 0, delta, gamma);
    AxisPoint ap;
    ap.r = r;
    ap.m = m;
    ap.r_actual = t.r;
    ap.len = t.length;
    ap.witness_a = format_word(G.generators(), ball.word_to((uint32_t)a_idx));
    ap.witness_b = format_word(G.generators(), ball.word_to((uint32_t)b_idx));
    out.push_back(std::move(ap));
  }
  return out;
}

}  // namespace divlab

#endif  // DIVLAB_DIVERGENCE_HPP
