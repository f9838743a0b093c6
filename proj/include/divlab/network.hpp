#ifndef DIVLAB_NETWORK_HPP
#define DIVLAB_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "divlab/cayley.hpp"
#include "divlab/common.hpp"
#include "divlab/divergence.hpp"
#include "divlab/group_models.hpp"
#include "divlab/order.hpp"
#include "divlab/words.hpp"

// Coset networks: exact coset patches inside a ball, quasi-convexity audits,
// chain audits over the coset-intersection graph, greedy geodesic covers, and
// the network upper bound  Div(n) <= C-comparable to n * max over the
// collection of the subgroups' own divergence.

namespace divlab {

// A finitely generated subgroup of the ambient model, given by generating
// words.  Membership is decided exactly in one of two modes:
//   - standard: every generator is a single ambient letter and the family's
//     canonical forms carry a letter-support invariant (lattices, free
//     factors, graph-group standard subgroups, and their direct/free
//     products); membership = canonical support inside the letter set.
//   - cyclic: one generating word; membership by enumerating its powers.
struct SubgroupSpec {
  std::vector<std::string> generators;
  std::string label;
};

namespace detail {

// Does the family's canonical form expose membership in letter-generated
// subgroups through its letter support?  True for lattices, free groups,
// graph groups, and products of such; false e.g. for the fiber-and-stable
// letters of a mapping torus, where canonical support can shrink under
// conjugation.
inline bool support_family(const nlohmann::json& d) {
  const std::string fam = d.at("family").get<std::string>();
  if (fam == "zn" || fam == "free" || fam == "raag") return true;
  if (fam == "direct" || fam == "freeprod")
    return support_family(d.at("a")) && support_family(d.at("b"));
  return false;
}

// Number of plain generators a family description contributes.  Used to
// split a global letter set across product factors.
inline int plain_generator_count(const nlohmann::json& d) {
  const std::string fam = d.at("family").get<std::string>();
  if (fam == "zn") return d.at("n").get<int>();
  if (fam == "free") return d.at("k").get<int>();
  if (fam == "raag") return (int)d.at("graph").at("vertices").get<int>();
  if (fam == "direct" || fam == "freeprod")
    return plain_generator_count(d.at("a")) + plain_generator_count(d.at("b"));
  if (fam == "gersten") return 3;
  if (fam == "amalgam")
    return plain_generator_count(d.at("a")) + plain_generator_count(d.at("b"));
  throw ValidationError("unknown family in model description: " + fam);
}

}  // namespace detail

// Exact membership test for one subgroup.  Build once per (model, spec,
// reach) and reuse; `reach` caps the element length the test must answer
// for (powers of a cyclic generator are enumerated out to that length,
// which suffices because |u^k| >= |k| in every supported family).
class SubgroupMembership {
 public:
  enum class Mode { Standard, Cyclic };

  SubgroupMembership(const GroupModel& G, const SubgroupSpec& spec, int reach)
      : label_(spec.label) {
    if (spec.generators.empty())
      throw ValidationError("subgroup needs at least one generating word");
    std::vector<Word> words;
    for (const std::string& text : spec.generators) {
      Word w = parse_word(G.generators(), text);
      if (G.is_identity(evaluate(G, w)))
        throw ValidationError("subgroup generator evaluates to the identity: '" + text + "'");
      words.push_back(std::move(w));
    }
    bool all_letters = true;
    for (const Word& w : words) all_letters = all_letters && w.size() == 1;

    if (all_letters && detail::support_family(G.describe())) {
      mode_ = Mode::Standard;
      allowed_.assign(G.num_symbols(), 0);
      for (const Word& w : words) {
        allowed_[(size_t)w[0]] = 1;
        allowed_[(size_t)inverse_symbol(w[0])] = 1;
      }
      return;
    }
    if (words.size() == 1) {
      mode_ = Mode::Cyclic;
      Element u = evaluate(G, words[0]);
      Element ui = G.inverse(u);
      for (Element cur : {u, ui}) {
        Element step = cur;
        for (int k = 1; k <= reach; ++k) {
          if (G.is_identity(cur))
            throw ValidationError("cyclic subgroup generator has finite order");
          powers_.insert(G.canonical_word(cur));
          cur = model_mul(G, cur, step);
        }
      }
      return;
    }
    throw ValidationError(
        "membership is undecidable for this subgroup: use single standard letters "
        "(in a lattice/free/graph-group family) or a single cyclic generator");
  }

  Mode mode() const { return mode_; }
  const std::string& label() const { return label_; }

  bool contains(const GroupModel& G, const Element& e) const {
    if (G.is_identity(e)) return true;
    if (mode_ == Mode::Standard) {
      for (int s : G.canonical_word(e))
        if (!allowed_[(size_t)s]) return false;
      return true;
    }
    return powers_.count(G.canonical_word(e)) > 0;
  }

  // Are g1 and g2 representatives of the same left coset?
  bool same_coset(const GroupModel& G, const Element& g1, const Element& g2) const {
    return contains(G, model_mul(G, G.inverse(g1), g2));
  }

 private:
  std::string label_;
  Mode mode_ = Mode::Standard;
  std::vector<char> allowed_;  // standard: per-symbol admission
  std::set<Word> powers_;      // cyclic: canonical words of u^k, k != 0
};

// ---------------------------------------------------------------------------
// Coset patches
// ---------------------------------------------------------------------------

// The exact trace of one left coset g*H inside the ball: every ball entry
// whose translate g^-1 * x lies in H.  `rep` is the length-lex least member
// (the ball's entry order), the canonical representative of the coset at
// this scale.
struct CosetPatch {
  std::string label;
  std::string rep_word;
  uint32_t rep = 0;
  std::vector<uint32_t> members;  // ascending ball entries
};

inline CosetPatch coset_patch(const GroupModel& G, const Ball& ball,
                              const SubgroupMembership& H, const Element& g) {
  CosetPatch patch;
  patch.label = H.label();
  const bool translated = !G.is_identity(g);
  const Element gi = translated ? G.inverse(g) : g;
  for (uint32_t i = 0; i < ball.size(); ++i) {
    Element e = ball.element_at(G, i);
    if (translated) e = model_mul(G, gi, e);
    if (H.contains(G, e)) patch.members.push_back(i);
  }
  if (patch.members.empty())
    throw ValidationError("coset has no member inside the ambient ball");
  patch.rep = patch.members.front();
  patch.rep_word = format_word(G.generators(), ball.word_to(patch.rep));
  return patch;
}

inline CosetPatch coset_patch(const GroupModel& G, const Ball& ball, const SubgroupSpec& spec,
                              const std::string& g_word = "") {
  SubgroupMembership H(G, spec, 2 * ball.radius());
  Element g = evaluate(G, parse_word(G.generators(), g_word));
  return coset_patch(G, ball, H, g);
}

// ---------------------------------------------------------------------------
// Quasi-convexity audit
// ---------------------------------------------------------------------------

struct QcWitness {
  std::string a, b;        // member pair (words)
  int64_t excursion = 0;   // how far the deterministic geodesic strayed
};

struct QcReport {
  bool pass = true;        // no pair lacked an (L,L)-path inside N_C(patch)
  double C = 0, L = 1;
  uint64_t members = 0;
  uint64_t pairs_checked = 0;
  uint64_t skipped_far = 0;      // relative element outside the ball
  uint64_t skipped_exit = 0;     // deterministic geodesic left the ball
  uint64_t strict_failures = 0;  // deterministic geodesic strayed beyond C
  int64_t max_excursion = 0;
  uint64_t retried = 0;
  uint64_t retry_failures = 0;
  bool exhaustive = true;
  bool scale_limited = true;  // finite-scale evidence, never a proof
  std::vector<QcWitness> witnesses;
};

// Samples member pairs of the subgroup's identity-coset patch.  Strict
// phase: does the deterministic (length-lex least) geodesic between the
// pair stay within C of the patch?  Strays are recorded as evidence.  A
// straying pair fails the audit only if not even a detour helps: no path
// inside N_C(patch) of length <= L*d + L exists at ambient scale.
inline QcReport quasiconvexity_audit(const GroupModel& G, const Ball& ball,
                                     const SubgroupSpec& spec, double C, double L,
                                     uint64_t pair_budget = 4096, uint64_t seed = 0x5eed) {
  if (C < 0 || L < 1) throw ValidationError("quasi-convexity audit needs C >= 0 and L >= 1");
  SubgroupMembership H(G, spec, 2 * ball.radius());
  CosetPatch patch = coset_patch(G, ball, H, G.identity());
  if (patch.members.size() < 2)
    throw ValidationError("patch has fewer than two members at this ball radius");

  std::vector<int32_t> to_patch;
  ball_bfs(ball, patch.members, to_patch);

  QcReport rep;
  rep.C = C;
  rep.L = L;
  rep.members = patch.members.size();

  const uint64_t M = patch.members.size();
  const uint64_t total = M * (M - 1) / 2;
  std::vector<uint64_t> picked;
  if (total <= pair_budget) {
    picked.resize(total);
    for (uint64_t t = 0; t < total; ++t) picked[t] = t;
  } else {
    rep.exhaustive = false;
    picked = sample_distinct(total, pair_budget, seed);
  }

  std::vector<int32_t> detour;
  for (uint64_t t : picked) {
    // Decode the triangular pair index: t = j(j-1)/2 + i with i < j.
    uint64_t j = (uint64_t)((1.0 + std::sqrt(1.0 + 8.0 * (double)t)) / 2.0);
    while (j * (j - 1) / 2 > t) --j;
    while ((j + 1) * j / 2 <= t) ++j;
    uint64_t i = t - j * (j - 1) / 2;
    const uint32_t a = patch.members[i], b = patch.members[j];

    Element rel = model_mul(G, G.inverse(ball.element_at(G, a)), ball.element_at(G, b));
    int64_t rel_idx = ball.find(G, rel);
    if (rel_idx < 0) {
      ++rep.skipped_far;
      continue;
    }
    const int64_t d = ball.dist((uint32_t)rel_idx);

    // Strict phase: walk the deterministic geodesic word from a.
    int64_t excursion = std::max<int64_t>(to_patch[a], to_patch[b]);
    uint32_t cur = a;
    bool exited = false;
    for (int s : ball.word_to((uint32_t)rel_idx)) {
      cur = ball.adj_row(cur)[s];
      if (cur == kNoEntry) {
        exited = true;
        break;
      }
      excursion = std::max<int64_t>(excursion, to_patch[cur]);
    }
    if (exited) {
      ++rep.skipped_exit;
      continue;
    }
    ++rep.pairs_checked;
    if (excursion <= (int64_t)C) continue;

    ++rep.strict_failures;
    rep.max_excursion = std::max(rep.max_excursion, excursion);
    if (rep.witnesses.size() < 16)
      rep.witnesses.push_back({format_word(G.generators(), ball.word_to(a)),
                               format_word(G.generators(), ball.word_to(b)), excursion});

    // Detour phase: any path inside N_C(patch) within the (L,L) budget?
    ++rep.retried;
    ball_bfs_if(
        ball, {a}, [&](uint32_t v) { return to_patch[v] >= 0 && (double)to_patch[v] <= C; },
        detour);
    if (detour[b] < 0 || (double)detour[b] > L * (double)d + L) {
      ++rep.retry_failures;
      rep.pass = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Chain audit over the coset-intersection graph
// ---------------------------------------------------------------------------

struct ChainVertex {
  uint32_t subgroup = 0;  // index into the spec list
  std::string label;
  std::string rep_word;
  uint32_t rep = 0;
  std::vector<uint32_t> members;
  std::vector<int32_t> dist;  // ball-wide distance to the patch
};

struct ChainEdge {
  uint32_t u = 0, v = 0;
  uint64_t intersection_size = 0;   // members of N_tau(u) & N_tau(v)
  int64_t diameter_lb = -1;         // ambient-metric double-sweep lower bound
  bool diameter_unbounded = false;  // >= ball radius - 2 (scale proxy)
  bool eta_connected = false;
  int64_t base_gap = -1;  // distance from the intersection to the base point
  bool meets_base = false;
  bool qualifies = false;
};

struct ChainPairRecord {
  uint32_t from = 0, to = 0;
  std::vector<uint32_t> chain;  // vertex ids, from -> to
  bool pass = false;
};

struct ChainAuditResult {
  int tau = 0, eta = 0;
  std::string base_word;
  std::vector<ChainVertex> vertices;
  std::vector<ChainEdge> edges;  // one record per unordered pair
  std::vector<ChainPairRecord> pairs;
  bool pass = true;           // every coset pair chained within eta steps
  bool scale_limited = true;  // "unbounded diameter" is a ball-scale proxy
};

// Verifies the chain condition around a base point: the cosets of the given
// subgroups that pass near x must pairwise connect, within eta steps,
// through consecutive tau-neighborhood intersections that are (at ball
// scale) unbounded, eta-path-connected, and meet B(x, eta).
inline ChainAuditResult chain_audit(const GroupModel& G, const Ball& ball,
                                    const std::vector<SubgroupSpec>& subgroups,
                                    const std::string& x_word, int tau, int eta) {
  if (subgroups.empty()) throw ValidationError("chain audit needs at least one subgroup");
  if (tau < 1 || eta < 1) throw ValidationError("chain audit needs tau >= 1 and eta >= 1");
  Element x = evaluate(G, parse_word(G.generators(), x_word));
  int64_t x_idx = ball.find(G, x);
  if (x_idx < 0) throw ValidationError("base point lies outside the ambient ball");

  ChainAuditResult res;
  res.tau = tau;
  res.eta = eta;
  res.base_word = format_word(G.generators(), ball.word_to((uint32_t)x_idx));

  std::vector<int32_t> from_x;
  ball_bfs(ball, {(uint32_t)x_idx}, from_x);

  // Vertices: one per distinct coset y*H meeting B(x, 3*tau).
  std::vector<SubgroupMembership> tests;
  for (const SubgroupSpec& s : subgroups) tests.emplace_back(G, s, 2 * ball.radius());
  std::vector<std::vector<Element>> reps_of(subgroups.size());
  for (uint32_t y = 0; y < ball.size(); ++y) {
    if (from_x[y] < 0 || from_x[y] > 3 * tau) continue;
    Element ye = ball.element_at(G, y);
    for (size_t h = 0; h < tests.size(); ++h) {
      bool known = false;
      for (const Element& r : reps_of[h])
        if (tests[h].same_coset(G, r, ye)) {
          known = true;
          break;
        }
      if (known) continue;
      reps_of[h].push_back(ye);
      ChainVertex vert;
      vert.subgroup = (uint32_t)h;
      CosetPatch patch = coset_patch(G, ball, tests[h], ye);
      vert.label = patch.label;
      vert.rep_word = patch.rep_word;
      vert.rep = patch.rep;
      vert.members = std::move(patch.members);
      ball_bfs(ball, vert.members, vert.dist);
      res.vertices.push_back(std::move(vert));
    }
  }

  // Edges: one record per unordered vertex pair.
  const size_t V = res.vertices.size();
  std::vector<std::vector<uint32_t>> adj(V);
  std::vector<int32_t> sweep;
  for (uint32_t u = 0; u < V; ++u) {
    for (uint32_t v = u + 1; v < V; ++v) {
      ChainEdge e;
      e.u = u;
      e.v = v;
      const auto& du = res.vertices[u].dist;
      const auto& dv = res.vertices[v].dist;
      std::vector<uint32_t> inter;
      for (uint32_t i = 0; i < ball.size(); ++i)
        if (du[i] >= 0 && du[i] <= tau && dv[i] >= 0 && dv[i] <= tau) inter.push_back(i);
      e.intersection_size = inter.size();
      if (!inter.empty()) {
        // Ambient-metric diameter lower bound by a double sweep.
        ball_bfs(ball, {inter.front()}, sweep);
        uint32_t far = inter.front();
        for (uint32_t i : inter)
          if (sweep[i] > sweep[far]) far = i;
        ball_bfs(ball, {far}, sweep);
        for (uint32_t i : inter) {
          e.diameter_lb = std::max<int64_t>(e.diameter_lb, sweep[i]);
          if (from_x[i] >= 0)
            e.base_gap = e.base_gap < 0 ? from_x[i] : std::min<int64_t>(e.base_gap, from_x[i]);
        }
        e.diameter_unbounded = e.diameter_lb >= ball.radius() - 2;
        e.meets_base = e.base_gap >= 0 && e.base_gap <= eta;

        // eta-path-connectivity: grow one component, admitting a member
        // whenever it sits within eta of the part already collected.
        std::vector<char> in_comp(inter.size(), 0);
        in_comp[0] = 1;
        std::vector<uint32_t> frontier = {inter.front()};
        size_t comp = 1;
        while (!frontier.empty() && comp < inter.size()) {
          ball_bfs(ball, frontier, sweep);
          frontier.clear();
          for (size_t i = 0; i < inter.size(); ++i) {
            if (in_comp[i] || sweep[inter[i]] < 0 || sweep[inter[i]] > eta) continue;
            in_comp[i] = 1;
            ++comp;
            frontier.push_back(inter[i]);
          }
        }
        e.eta_connected = comp == inter.size();
      }
      e.qualifies = e.diameter_unbounded && e.eta_connected && e.meets_base;
      if (e.qualifies) {
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
      res.edges.push_back(std::move(e));
    }
  }

  // Chains: breadth-first search over the qualifying edges, per pair.
  for (uint32_t s = 0; s < V; ++s) {
    std::vector<int32_t> hop(V, -1), prev(V, -1);
    std::vector<uint32_t> queue = {s};
    hop[s] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
      uint32_t c = queue[head];
      for (uint32_t nb : adj[c])
        if (hop[nb] < 0) {
          hop[nb] = hop[c] + 1;
          prev[nb] = (int32_t)c;
          queue.push_back(nb);
        }
    }
    for (uint32_t t = s; t < V; ++t) {
      ChainPairRecord rec;
      rec.from = s;
      rec.to = t;
      if (hop[t] >= 0) {
        for (int32_t c = (int32_t)t; c >= 0; c = prev[(size_t)c]) {
          rec.chain.push_back((uint32_t)c);
          if ((uint32_t)c == s) break;
        }
        std::reverse(rec.chain.begin(), rec.chain.end());
        rec.pass = (int)rec.chain.size() <= eta;
      }
      res.pass = res.pass && rec.pass;
      res.pairs.push_back(std::move(rec));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Greedy geodesic cover
// ---------------------------------------------------------------------------

struct CoverStep {
  int x_index = 0;      // geodesic vertex where the segment starts
  int next_index = 0;   // where the next segment starts (or the endpoint)
  std::string label;    // subgroup of the covering coset
  std::string rep_word;
  int64_t dist_at_x = 0, dist_at_next = 0;  // to the covering coset
};

struct CoverResult {
  int tau = 0;
  int geodesic_length = 0;
  std::vector<CoverStep> steps;
  bool neighborhood_ok = true;  // every x_i, x_{i+1} within 3*tau of L_i
  bool spacing_ok = true;       // every advance >= tau (unless it reaches y)
  bool length_ok = true;        // step count <= ceil(d / tau)
};

// The greedy cover of a geodesic by coset neighborhoods: from the current
// vertex, take a coset within tau and jump to the farthest geodesic vertex
// still within 2*tau of it.  Ties prefer the earliest subgroup, then the
// length-lex least representative.
inline CoverResult geodesic_cover(const GroupModel& G, const Ball& ball,
                                  const std::vector<SubgroupSpec>& subgroups,
                                  const std::string& geodesic_word, int tau) {
  if (subgroups.empty()) throw ValidationError("geodesic cover needs at least one subgroup");
  if (tau < 1) throw ValidationError("geodesic cover needs tau >= 1");

  // Walk the word through the ball and insist it is actually geodesic.
  Word w = parse_word(G.generators(), geodesic_word);
  std::vector<uint32_t> verts = {0};
  for (int s : w) {
    uint32_t nxt = ball.adj_row(verts.back())[s];
    if (nxt == kNoEntry) throw ValidationError("geodesic exits the ambient ball");
    verts.push_back(nxt);
  }
  const int d = (int)w.size();
  for (int j = 0; j <= d; ++j)
    if (ball.dist(verts[(size_t)j]) != j)
      throw ValidationError("the given word is not geodesic");

  // Candidate cosets: every coset within tau of the geodesic contains a
  // point of the geodesic's tau-neighborhood, so translating the subgroups
  // by exactly those points enumerates all cosets that can ever qualify.
  std::vector<int32_t> near;
  ball_bfs(ball, verts, near);
  std::vector<uint32_t> anchors;
  for (uint32_t i = 0; i < ball.size(); ++i)
    if (near[i] >= 0 && near[i] <= tau) anchors.push_back(i);

  std::vector<SubgroupMembership> tests;
  for (const SubgroupSpec& s : subgroups) tests.emplace_back(G, s, 2 * ball.radius());
  struct Candidate {
    uint32_t subgroup;
    CosetPatch patch;
    std::vector<int32_t> dist;
  };
  std::vector<Candidate> cands;
  std::vector<std::vector<Element>> reps_of(subgroups.size());
  for (uint32_t v : anchors) {
    Element ve = ball.element_at(G, v);
    for (size_t h = 0; h < tests.size(); ++h) {
      bool known = false;
      for (const Element& r : reps_of[h])
        if (tests[h].same_coset(G, r, ve)) {
          known = true;
          break;
        }
      if (known) continue;
      reps_of[h].push_back(ve);
      Candidate c;
      c.subgroup = (uint32_t)h;
      c.patch = coset_patch(G, ball, tests[h], ve);
      ball_bfs(ball, c.patch.members, c.dist);
      cands.push_back(std::move(c));
    }
  }

  CoverResult res;
  res.tau = tau;
  res.geodesic_length = d;
  int x = 0;
  while (true) {
    int best = -1, best_reach = -1;
    for (size_t c = 0; c < cands.size(); ++c) {
      if (cands[c].dist[verts[(size_t)x]] > tau) continue;
      int reach = x;
      for (int j = d; j > x; --j)
        if (cands[c].dist[verts[(size_t)j]] <= 2 * tau) {
          reach = j;
          break;
        }
      bool better = reach > best_reach;
      if (reach == best_reach && best >= 0) {
        const Candidate& a = cands[c];
        const Candidate& b = cands[(size_t)best];
        better = a.subgroup < b.subgroup ||
                 (a.subgroup == b.subgroup && a.patch.rep < b.patch.rep);
      }
      if (better) {
        best = (int)c;
        best_reach = reach;
      }
    }
    if (best < 0)
      throw ValidationError("no coset within tau of geodesic vertex " + std::to_string(x));

    const Candidate& L = cands[(size_t)best];
    // A vertex within tau of the current one is within 2*tau of L, so the
    // greedy step always advances by at least min(tau, what is left).
    int next = d == x ? x : std::max(best_reach, std::min(x + 1, d));
    CoverStep step;
    step.x_index = x;
    step.next_index = next;
    step.label = L.patch.label;
    step.rep_word = L.patch.rep_word;
    step.dist_at_x = L.dist[verts[(size_t)x]];
    step.dist_at_next = L.dist[verts[(size_t)next]];
    res.neighborhood_ok =
        res.neighborhood_ok && step.dist_at_x <= 3 * tau && step.dist_at_next <= 3 * tau;
    res.spacing_ok = res.spacing_ok && (next - x >= tau || next == d);
    res.steps.push_back(std::move(step));
    if (next == x || next == d) break;
    x = next;
  }
  res.length_ok = (int64_t)res.steps.size() <= (int64_t)((d + tau - 1) / tau) ||
                  (d == 0 && res.steps.size() == 1);
  return res;
}

// ---------------------------------------------------------------------------
// Network divergence bound
// ---------------------------------------------------------------------------

// Standalone model isomorphic to a standard letter-generated subgroup: the
// sub-lattice, the sub-free-group, the induced subgraph's graph group, or
// the product thereof.  Cyclic subgroups are modeled as the integers.
inline ModelPtr standalone_subgroup_model(const GroupModel& G, const SubgroupSpec& spec,
                                          std::string* note = nullptr) {
  if (spec.generators.empty())
    throw ValidationError("subgroup needs at least one generating word");
  std::vector<Word> words;
  for (const std::string& text : spec.generators) {
    Word w = parse_word(G.generators(), text);
    if (G.is_identity(evaluate(G, w)))
      throw ValidationError("subgroup generator evaluates to the identity: '" + text + "'");
    words.push_back(std::move(w));
  }
  bool all_letters = true;
  for (const Word& w : words) all_letters = all_letters && w.size() == 1;

  if (all_letters && detail::support_family(G.describe())) {
    std::set<int> bases;
    for (const Word& w : words) bases.insert(w[0] >> 1);

    // Recursive build over the family description, consuming the global
    // plain-generator indices [offset, offset + count).
    auto build = [&](auto&& self, const nlohmann::json& d, int offset) -> ModelPtr {
      const std::string fam = d.at("family").get<std::string>();
      const int count = detail::plain_generator_count(d);
      std::vector<int> local;
      for (int b : bases)
        if (b >= offset && b < offset + count) local.push_back(b - offset);
      if (local.empty()) return nullptr;
      if (fam == "zn") return make_zn((int)local.size());
      if (fam == "free") return make_free((int)local.size());
      if (fam == "raag") {
        DefiningGraph induced;
        induced.vertices = (int)local.size();
        std::map<int, int> renum;
        for (size_t i = 0; i < local.size(); ++i) renum[local[i]] = (int)i;
        std::set<std::pair<int, int>> kept;
        for (const auto& edge : d.at("graph").at("edges")) {
          int a = edge.at(0).get<int>(), b = edge.at(1).get<int>();
          if (renum.count(a) && renum.count(b))
            kept.insert({std::min(renum[a], renum[b]), std::max(renum[a], renum[b])});
        }
        induced.edges.assign(kept.begin(), kept.end());
        // Collapse the degenerate shapes to their canonical models: a
        // complete induced graph is a lattice, an edgeless one is free (and
        // the free model's tree structure certifies infinite divergence
        // outright instead of censoring it).
        const size_t k = local.size();
        if (kept.size() == k * (k - 1) / 2) return make_zn((int)k);
        if (kept.empty()) return make_free((int)k);
        return make_raag(induced);
      }
      // direct / freeprod: split across the factors.
      ModelPtr left = self(self, d.at("a"), offset);
      ModelPtr right =
          self(self, d.at("b"), offset + detail::plain_generator_count(d.at("a")));
      if (left && right)
        return fam == "direct" ? make_direct_product(left, right)
                               : make_free_product(left, right);
      return left ? left : right;
    };
    ModelPtr m = build(build, G.describe(), 0);
    if (note) *note = "standard subgroup modeled standalone as " + m->name();
    return m;
  }
  if (words.size() == 1) {
    if (note) *note = "cyclic subgroup modeled standalone as the integers";
    return make_zn(1);
  }
  throw ValidationError(
      "no standalone model for this subgroup: use single standard letters or one "
      "cyclic generator");
}

struct NetworkDivergenceParams {
  DivMode mode = DivMode::Midpoint;
  DivergenceParams div;
  std::vector<double> ladder = default_constant_ladder();
  // Largest argument the subgroup tables are extended to (0: twice the top
  // of the grid, plus the grid step) so small comparison constants have
  // their arguments covered.
  int h_grid_max = 0;
  // Ambient radii for the subgroup models (0: from div.ambient policy).
  int ambient_radius_h = 0;
};

struct NetworkDivergenceReport {
  std::vector<DivPoint> ambient_table;
  struct SubgroupTable {
    std::string label;
    std::string model;  // standalone model name
    std::string note;
    std::vector<DivPoint> table;
  };
  std::vector<SubgroupTable> subgroup_tables;
  std::vector<OrderSample> f;  // ambient divergence
  std::vector<OrderSample> g;  // n * max over subgroups
  OrderSearch search;
  OrderVerdict verdict = OrderVerdict::Undetermined;
  double C = 0;
  bool censored = false;
  std::string note;
};

// Finite-scale check of the network upper bound: the ambient divergence is
// order-dominated by n times the largest standalone subgroup divergence.
// Subgroup tables are computed on standalone isomorphic models with the
// subgroup's own generators; quasi-convexity makes the two metrics
// comparable, which the order calculus absorbs.
inline NetworkDivergenceReport network_divergence_audit(const GroupModel& G, const Ball& ball,
                                                        const std::vector<SubgroupSpec>& subgroups,
                                                        const std::vector<int>& n_grid,
                                                        const NetworkDivergenceParams& params) {
  if (subgroups.empty()) throw ValidationError("network audit needs at least one subgroup");
  if (n_grid.empty()) throw ValidationError("network audit needs a nonempty scale grid");
  for (size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
      throw ValidationError("the scale grid must be positive and strictly increasing");
  }

  NetworkDivergenceReport rep;
  rep.ambient_table = div_function(G, ball, params.mode, n_grid, params.div);

  // Extended grid for the subgroup tables, so bound arguments C*n + C stay
  // covered for small C.
  const int step = n_grid.size() >= 2 ? n_grid[1] - n_grid[0] : 2;
  int h_max = params.h_grid_max > 0 ? params.h_grid_max : 2 * n_grid.back() + step;
  std::vector<int> h_grid = n_grid;
  while (h_grid.back() + step <= h_max) h_grid.push_back(h_grid.back() + step);

  for (const SubgroupSpec& spec : subgroups) {
    NetworkDivergenceReport::SubgroupTable st;
    st.label = spec.label;
    ModelPtr Hm = standalone_subgroup_model(G, spec, &st.note);
    st.model = Hm->name();
    int radius = params.ambient_radius_h > 0 ? params.ambient_radius_h
                                             : params.div.ambient.radius_for(h_max);
    Ball hball = build_ball(*Hm, radius);
    st.table = div_function(*Hm, hball, params.mode, h_grid, params.div);
    rep.subgroup_tables.push_back(std::move(st));
  }

  // f(n) from the ambient table; censoring pollutes certification.
  uint32_t dropped = 0;
  for (const DivPoint& p : rep.ambient_table) {
    if (!p.any) {
      ++dropped;
      continue;
    }
    if (p.len.status == ExtendedLength::Status::Censored) rep.censored = true;
    rep.f.push_back(order_sample(p.n, p.len));
  }

  // g(n) = n * sup over the subgroup tables.
  for (size_t gi = 0; gi < h_grid.size(); ++gi) {
    ExtendedLength best;
    bool any = false;
    for (const auto& st : rep.subgroup_tables) {
      const DivPoint& p = st.table[gi];
      if (!p.any) continue;
      if (!any || sup_better(p.len, best)) best = p.len;
      any = true;
    }
    if (!any) {
      ++dropped;
      continue;
    }
    if (best.status == ExtendedLength::Status::Censored) rep.censored = true;
    const int64_t n = h_grid[gi];
    ExtendedLength scaled = best;
    if (best.status != ExtendedLength::Status::Infinite) scaled.value = n * best.value;
    rep.g.push_back(order_sample(n, scaled));
  }

  if (rep.f.size() < 2 || rep.g.size() < 2) {
    rep.note = "too few usable scales: " + std::to_string(rep.f.size()) + " ambient and " +
               std::to_string(rep.g.size()) + " subgroup points";
    return rep;
  }
  rep.search = preceq_search(rep.f, rep.g, params.ladder);
  rep.C = rep.search.C;
  if (rep.censored) {
    rep.verdict = OrderVerdict::Undetermined;
    rep.note = "censored divergence entries: widen the ambient balls to certify";
  } else {
    rep.verdict = rep.search.verdict;
    if (dropped > 0) rep.note = std::to_string(dropped) + " scales had no admissible pair";
  }
  return rep;
}

}  // namespace divlab

#endif  // DIVLAB_NETWORK_HPP
