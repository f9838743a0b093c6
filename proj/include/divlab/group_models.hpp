#ifndef DIVLAB_GROUP_MODELS_HPP
#define DIVLAB_GROUP_MODELS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "divlab/common.hpp"
#include "divlab/words.hpp"

namespace divlab {

// Canonical payload of a group element.  Which fields are used depends on
// the family:
//   zn        -> ints  (one coordinate per rank)
//   free/raag -> letters (canonical reduced word, symbol indices)
//   gersten   -> letters (reduced word in the fiber F_2) + ints[0] (t-exponent)
//   direct    -> parts[0], parts[1]
//   freeprod  -> parts (alternating syllables) + ints (factor tag per syllable)
//   amalgam   -> same as freeprod, normal form reduced by pinching
// Structural equality coincides with group equality exactly when the model
// reports exact_keys(); otherwise use GroupModel::equal.
struct Element {
  std::vector<int64_t> ints;
  std::vector<uint8_t> letters;
  std::vector<Element> parts;
  bool operator==(const Element&) const = default;
};

// Undirected simple graph on {0..vertices-1}; defines a right-angled Artin
// group (adjacent vertices commute).
struct DefiningGraph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
};

// A finitely generated group with a fixed ordered generating set and a
// computable canonical form.  apply() multiplies on the right by one
// generator and is the only operation ball construction needs; everything
// else (inverses, word evaluation, products of elements) folds over words.
class GroupModel {
 public:
  virtual ~GroupModel() = default;

  const std::vector<GeneratorSymbol>& generators() const { return symbols_; }
  int num_symbols() const { return (int)symbols_.size(); }
  const Element& identity() const { return identity_; }
  const std::string& name() const { return name_; }

  // x * generator[symbol]; the result is in canonical form.
  virtual Element apply(const Element& x, int symbol) const = 0;

  // Canonical word representing x (not necessarily geodesic).
  virtual Word canonical_word(const Element& x) const = 0;

  // Serialization of the canonical form.  For exact-key models this is a
  // complete, parseable encoding; for bucketed models (amalgams) it is a
  // collision-possible invariant and equal() must arbitrate.
  virtual void append_key(const Element& x, std::string& out) const = 0;

  virtual bool exact_keys() const { return true; }

  // Inverse of element_key for exact-key models.
  virtual Element element_from_key(std::string_view key) const {
    (void)key;
    throw ValidationError("element_from_key unsupported for " + name_);
  }

  virtual bool equal(const Element& a, const Element& b) const { return a == b; }

  // True when the Cayley graph w.r.t. this generating set is a tree
  // (free groups, Z with one generator, free products of such).  Tree models
  // admit exact separation tests for forbidden-ball path queries.
  virtual bool tree_graph() const { return false; }

  // Stable family metadata: round-trips through the CLI config schema and is
  // fingerprinted in ball cache headers and run manifests.
  virtual nlohmann::json describe() const = 0;

  std::string key(const Element& x) const {
    std::string out;
    append_key(x, out);
    return out;
  }

  Element inverse(const Element& x) const {
    Element out = identity_;
    Word w = canonical_word(x);
    for (auto it = w.rbegin(); it != w.rend(); ++it) out = apply(out, inverse_symbol(*it));
    return out;
  }

  bool is_identity(const Element& x) const { return equal(x, identity_); }

 protected:
  std::vector<GeneratorSymbol> symbols_;
  Element identity_;
  std::string name_;
};

using ModelPtr = std::shared_ptr<const GroupModel>;

inline Element mul_word(const GroupModel& G, Element x, const Word& w) {
  for (int s : w) x = G.apply(x, s);
  return x;
}

inline Element evaluate(const GroupModel& G, const Word& w) { return mul_word(G, G.identity(), w); }

inline Element model_mul(const GroupModel& G, const Element& x, const Element& y) {
  return mul_word(G, x, G.canonical_word(y));
}

// ---------------------------------------------------------------------------
// Key-encoding helpers shared by the families.
// ---------------------------------------------------------------------------

namespace detail {

// Letters are encoded one byte each, offset into a range that avoids every
// structural delimiter used by composite keys: '(' ')' '{' '}' ',' '|' ';'.
constexpr char kLetterBase = '0';

inline void append_letters_key(const std::vector<uint8_t>& letters, std::string& out) {
  for (uint8_t l : letters) out.push_back((char)(kLetterBase + l));
}

inline std::vector<uint8_t> parse_letters_key(std::string_view key) {
  std::vector<uint8_t> out;
  out.reserve(key.size());
  for (char c : key) {
    if (c < kLetterBase) throw ValidationError("malformed letters key");
    out.push_back((uint8_t)(c - kLetterBase));
  }
  return out;
}

inline void append_int_list_key(const std::vector<int64_t>& v, std::string& out) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(v[i]);
  }
}

inline std::vector<int64_t> parse_int_list_key(std::string_view key) {
  std::vector<int64_t> out;
  size_t pos = 0;
  while (pos <= key.size()) {
    size_t comma = key.find(',', pos);
    if (comma == std::string_view::npos) comma = key.size();
    out.push_back(std::stoll(std::string(key.substr(pos, comma - pos))));
    pos = comma + 1;
    if (comma == key.size()) break;
  }
  return out;
}

// Splits "(<a>)(<b>)" with balanced parentheses inside each component.
inline std::pair<std::string_view, std::string_view> split_paren_pair(std::string_view key) {
  if (key.empty() || key.front() != '(') throw ValidationError("malformed product key");
  int depth = 0;
  size_t i = 0;
  for (; i < key.size(); ++i) {
    if (key[i] == '(') ++depth;
    if (key[i] == ')' && --depth == 0) break;
  }
  if (depth != 0 || i + 1 >= key.size() || key[i + 1] != '(' || key.back() != ')')
    throw ValidationError("malformed product key");
  return {key.substr(1, i - 1), key.substr(i + 2, key.size() - i - 3)};
}

inline int64_t euclid_quot(int64_t x, int64_t a) {
  int64_t q = x / a, r = x % a;
  if (r < 0) q += (a > 0 ? -1 : 1);
  return q;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Z^n
// ---------------------------------------------------------------------------

class ZnModel final : public GroupModel {
 public:
  explicit ZnModel(int n) : n_(n) {
    if (n < 1 || n > 16) throw ValidationError("zn rank must be in [1,16]");
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i + 1));
    symbols_ = make_symbols(labels);
    identity_.ints.assign((size_t)n, 0);
    name_ = "Z^" + std::to_string(n);
  }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    out.ints[(size_t)(symbol / 2)] += is_plain_symbol(symbol) ? 1 : -1;
    return out;
  }

  Word canonical_word(const Element& x) const override {
    Word w;
    for (int i = 0; i < n_; ++i) {
      int64_t c = x.ints[(size_t)i];
      int s = c >= 0 ? 2 * i : 2 * i + 1;
      for (int64_t k = 0; k < (c >= 0 ? c : -c); ++k) w.push_back(s);
    }
    return w;
  }

  void append_key(const Element& x, std::string& out) const override {
    detail::append_int_list_key(x.ints, out);
  }

  Element element_from_key(std::string_view key) const override {
    Element e;
    e.ints = detail::parse_int_list_key(key);
    if ((int)e.ints.size() != n_) throw ValidationError("zn key has wrong rank");
    return e;
  }

  bool tree_graph() const override { return n_ == 1; }

  nlohmann::json describe() const override { return {{"family", "zn"}, {"n", n_}}; }

  int rank() const { return n_; }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// Free group F_k
// ---------------------------------------------------------------------------

class FreeModel final : public GroupModel {
 public:
  explicit FreeModel(int k) : k_(k) {
    if (k < 1 || k > 26) throw ValidationError("free rank must be in [1,26]");
    std::vector<std::string> labels;
    for (int i = 0; i < k; ++i) labels.push_back(std::string(1, (char)('a' + i)));
    symbols_ = make_symbols(labels);
    name_ = "F_" + std::to_string(k);
  }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    if (!out.letters.empty() && out.letters.back() == (uint8_t)inverse_symbol(symbol))
      out.letters.pop_back();
    else
      out.letters.push_back((uint8_t)symbol);
    return out;
  }

  Word canonical_word(const Element& x) const override {
    return Word(x.letters.begin(), x.letters.end());
  }

  void append_key(const Element& x, std::string& out) const override {
    detail::append_letters_key(x.letters, out);
  }

  Element element_from_key(std::string_view key) const override {
    Element e;
    e.letters = detail::parse_letters_key(key);
    return e;
  }

  bool tree_graph() const override { return true; }

  nlohmann::json describe() const override { return {{"family", "free"}, {"k", k_}}; }

 private:
  int k_;
};

// ---------------------------------------------------------------------------
// Right-angled Artin group on a defining graph
// ---------------------------------------------------------------------------

// Canonical form: among all reduced words representing the element (they
// differ only by swapping adjacent letters of commuting generators), the
// lexicographically least under the fixed symbol order.  It is maintained
// incrementally: appending one generator either cancels against the unique
// matching inverse reachable through commuting letters, or is inserted as
// far left as commuting-with-larger-letters swaps allow.
class RaagModel final : public GroupModel {
 public:
  explicit RaagModel(const DefiningGraph& graph) : graph_(graph) {
    int n = graph.vertices;
    if (n < 1 || n > 26) throw ValidationError("raag vertex count must be in [1,26]");
    adj_.assign((size_t)n, std::vector<bool>((size_t)n, false));
    std::vector<std::pair<int, int>> sorted_edges = graph.edges;
    for (auto& [u, v] : sorted_edges) {
      if (u > v) std::swap(u, v);
      if (u < 0 || v >= n || u == v) throw ValidationError("raag edge out of range");
      adj_[(size_t)u][(size_t)v] = adj_[(size_t)v][(size_t)u] = true;
    }
    std::sort(sorted_edges.begin(), sorted_edges.end());
    sorted_edges.erase(std::unique(sorted_edges.begin(), sorted_edges.end()), sorted_edges.end());
    graph_.edges = sorted_edges;
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back(std::string(1, (char)('a' + i)));
    symbols_ = make_symbols(labels);
    name_ = "raag" + std::to_string(n);
    if (!graph_.edges.empty()) {
      name_ += "[";
      for (size_t i = 0; i < graph_.edges.size(); ++i) {
        if (i) name_ += ".";
        name_ += std::to_string(graph_.edges[i].first) + "-" +
                 std::to_string(graph_.edges[i].second);
      }
      name_ += "]";
    }
  }

  static int vertex_of(int symbol) { return symbol / 2; }

  bool commute(int s, int t) const {
    int u = vertex_of(s), v = vertex_of(t);
    return u != v && adj_[(size_t)u][(size_t)v];
  }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    auto& w = out.letters;
    // Cancellation: the matching inverse can absorb the new letter iff every
    // letter between them commutes with it.  A same-vertex letter blocks.
    for (int j = (int)w.size() - 1; j >= 0; --j) {
      int t = w[(size_t)j];
      if (vertex_of(t) == vertex_of(symbol)) {
        if (t == inverse_symbol(symbol)) {
          w.erase(w.begin() + j);
          return out;
        }
        break;
      }
      if (!commute(t, symbol)) break;
    }
    // Insertion: the new letter may float left past any contiguous suffix of
    // commuting letters.  Emitting greedily (always the least available
    // letter) keeps the word lexicographically least, so it lands at the
    // earliest floatable position whose letter is not smaller.
    size_t lo = w.size();
    while (lo > 0 && commute(w[lo - 1], symbol)) --lo;
    size_t i = lo;
    while (i < w.size() && (uint8_t)symbol > w[i]) ++i;
    w.insert(w.begin() + (ptrdiff_t)i, (uint8_t)symbol);
    return out;
  }

  Word canonical_word(const Element& x) const override {
    return Word(x.letters.begin(), x.letters.end());
  }

  void append_key(const Element& x, std::string& out) const override {
    detail::append_letters_key(x.letters, out);
  }

  Element element_from_key(std::string_view key) const override {
    Element e;
    e.letters = detail::parse_letters_key(key);
    return e;
  }

  nlohmann::json describe() const override {
    nlohmann::json edges = nlohmann::json::array();
    for (auto& [u, v] : graph_.edges) edges.push_back({u, v});
    return {{"family", "raag"}, {"graph", {{"vertices", graph_.vertices}, {"edges", edges}}}};
  }

  const DefiningGraph& graph() const { return graph_; }

 private:
  DefiningGraph graph_;
  std::vector<std::vector<bool>> adj_;
};

// ---------------------------------------------------------------------------
// Direct product A x B
// ---------------------------------------------------------------------------

namespace detail {

// Combined label list for product constructions; a "'" is appended to
// second-factor labels that would collide with first-factor ones.
inline std::vector<std::string> product_labels(const GroupModel& a, const GroupModel& b) {
  std::vector<std::string> labels;
  for (int s = 0; s < a.num_symbols(); s += 2) labels.push_back(a.generators()[(size_t)s].label);
  for (int s = 0; s < b.num_symbols(); s += 2) {
    std::string l = b.generators()[(size_t)s].label;
    while (std::find(labels.begin(), labels.end(), l) != labels.end()) l += "'";
    labels.push_back(l);
  }
  return labels;
}

}  // namespace detail

class DirectProductModel final : public GroupModel {
 public:
  DirectProductModel(ModelPtr a, ModelPtr b) : a_(std::move(a)), b_(std::move(b)) {
    symbols_ = make_symbols(detail::product_labels(*a_, *b_));
    identity_.parts = {a_->identity(), b_->identity()};
    name_ = a_->name() + "x" + b_->name();
  }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    if (symbol < a_->num_symbols())
      out.parts[0] = a_->apply(out.parts[0], symbol);
    else
      out.parts[1] = b_->apply(out.parts[1], symbol - a_->num_symbols());
    return out;
  }

  Word canonical_word(const Element& x) const override {
    Word w = a_->canonical_word(x.parts[0]);
    for (int s : b_->canonical_word(x.parts[1])) w.push_back(s + a_->num_symbols());
    return w;
  }

  void append_key(const Element& x, std::string& out) const override {
    out.push_back('(');
    a_->append_key(x.parts[0], out);
    out += ")(";
    b_->append_key(x.parts[1], out);
    out.push_back(')');
  }

  Element element_from_key(std::string_view key) const override {
    auto [ka, kb] = detail::split_paren_pair(key);
    Element e;
    e.parts = {a_->element_from_key(ka), b_->element_from_key(kb)};
    return e;
  }

  bool exact_keys() const override { return a_->exact_keys() && b_->exact_keys(); }

  nlohmann::json describe() const override {
    return {{"family", "direct"}, {"a", a_->describe()}, {"b", b_->describe()}};
  }

  const GroupModel& left() const { return *a_; }
  const GroupModel& right() const { return *b_; }

 private:
  ModelPtr a_, b_;
};

// ---------------------------------------------------------------------------
// Free product A * B (alternating syllable normal form)
// ---------------------------------------------------------------------------

class FreeProductModel final : public GroupModel {
 public:
  FreeProductModel(ModelPtr a, ModelPtr b) : a_(std::move(a)), b_(std::move(b)) {
    symbols_ = make_symbols(detail::product_labels(*a_, *b_));
    name_ = a_->name() + "*" + b_->name();
  }

  const GroupModel& factor(int tag) const { return tag == 0 ? *a_ : *b_; }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    int tag = symbol < a_->num_symbols() ? 0 : 1;
    int local = tag == 0 ? symbol : symbol - a_->num_symbols();
    if (!out.ints.empty() && out.ints.back() == tag) {
      Element& last = out.parts.back();
      last = factor(tag).apply(last, local);
      if (factor(tag).is_identity(last)) {
        out.parts.pop_back();
        out.ints.pop_back();
      }
    } else {
      out.parts.push_back(factor(tag).apply(factor(tag).identity(), local));
      out.ints.push_back(tag);
    }
    return out;
  }

  Word canonical_word(const Element& x) const override {
    Word w;
    for (size_t i = 0; i < x.parts.size(); ++i) {
      int tag = (int)x.ints[i];
      for (int s : factor(tag).canonical_word(x.parts[i]))
        w.push_back(tag == 0 ? s : s + a_->num_symbols());
    }
    return w;
  }

  void append_key(const Element& x, std::string& out) const override {
    for (size_t i = 0; i < x.parts.size(); ++i) {
      out.push_back(x.ints[i] == 0 ? 'A' : 'B');
      out.push_back('{');
      factor((int)x.ints[i]).append_key(x.parts[i], out);
      out.push_back('}');
    }
  }

  Element element_from_key(std::string_view key) const override {
    Element e;
    size_t pos = 0;
    while (pos < key.size()) {
      int tag = key[pos] == 'A' ? 0 : 1;
      if (pos + 1 >= key.size() || key[pos + 1] != '{')
        throw ValidationError("malformed free product key");
      int depth = 0;
      size_t i = pos + 1;
      for (; i < key.size(); ++i) {
        if (key[i] == '{') ++depth;
        if (key[i] == '}' && --depth == 0) break;
      }
      if (depth != 0) throw ValidationError("malformed free product key");
      e.parts.push_back(factor(tag).element_from_key(key.substr(pos + 2, i - pos - 2)));
      e.ints.push_back(tag);
      pos = i + 1;
    }
    return e;
  }

  bool exact_keys() const override { return a_->exact_keys() && b_->exact_keys(); }

  bool tree_graph() const override { return a_->tree_graph() && b_->tree_graph(); }

  nlohmann::json describe() const override {
    return {{"family", "freeprod"}, {"a", a_->describe()}, {"b", b_->describe()}};
  }

 private:
  ModelPtr a_, b_;
};

// ---------------------------------------------------------------------------
// The Gersten group F_2 x|_phi Z with phi(a) = ab, phi(b) = b
// ---------------------------------------------------------------------------

// Elements are pairs (w, m) with w a reduced word in F_2 = <a, b>, m the
// t-exponent; multiplication is (w, m)(v, n) = (w phi^m(v), m + n).
// Generators: a, b (fiber) and t (base), with t a t^-1 = ab and t b t^-1 = b.
class GerstenModel final : public GroupModel {
 public:
  // Fiber symbol indices inside Element::letters.
  static constexpr int kA = 0, kAInv = 1, kB = 2, kBInv = 3, kT = 4, kTInv = 5;

  GerstenModel() {
    symbols_ = make_symbols({"a", "b", "t"});
    identity_.ints = {0};
    name_ = "gersten";
  }

  static void push_reduced(std::vector<uint8_t>& w, int s) {
    if (!w.empty() && w.back() == (uint8_t)inverse_symbol(s))
      w.pop_back();
    else
      w.push_back((uint8_t)s);
  }

  // Appends phi^m(letter) to w, reduced.  phi^m(a) = a b^m, phi^m(a^-1) =
  // b^-m a^-1, and b is fixed.
  static void append_twisted(std::vector<uint8_t>& w, int letter, int64_t m) {
    int bsym = m >= 0 ? kB : kBInv;
    int64_t reps = m >= 0 ? m : -m;
    switch (letter) {
      case kA:
        push_reduced(w, kA);
        for (int64_t i = 0; i < reps; ++i) push_reduced(w, bsym);
        break;
      case kAInv:
        for (int64_t i = 0; i < reps; ++i) push_reduced(w, inverse_symbol(bsym));
        push_reduced(w, kAInv);
        break;
      default:
        push_reduced(w, letter);
    }
  }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    if (symbol == kT)
      out.ints[0] += 1;
    else if (symbol == kTInv)
      out.ints[0] -= 1;
    else
      append_twisted(out.letters, symbol, out.ints[0]);
    return out;
  }

  Word canonical_word(const Element& x) const override {
    Word w(x.letters.begin(), x.letters.end());
    int64_t m = x.ints[0];
    for (int64_t i = 0; i < (m >= 0 ? m : -m); ++i) w.push_back(m >= 0 ? kT : kTInv);
    return w;
  }

  void append_key(const Element& x, std::string& out) const override {
    detail::append_letters_key(x.letters, out);
    out.push_back('|');
    out += std::to_string(x.ints[0]);
  }

  Element element_from_key(std::string_view key) const override {
    size_t bar = key.rfind('|');
    if (bar == std::string_view::npos) throw ValidationError("malformed gersten key");
    Element e;
    e.letters = detail::parse_letters_key(key.substr(0, bar));
    e.ints = {std::stoll(std::string(key.substr(bar + 1)))};
    return e;
  }

  nlohmann::json describe() const override { return {{"family", "gersten"}}; }
};

// ---------------------------------------------------------------------------
// Amalgam A *_<u> B over infinite cyclic subgroups <u_A> = <u_B>
// ---------------------------------------------------------------------------

// Elements are alternating syllable sequences.  The pinch normalization
// removes identity syllables and converts any syllable lying in the edge
// subgroup (detected as u^k with |k| bounded by the syllable's word length)
// to the opposite factor, merging neighbors, until the form is reduced in
// the Britton sense.  Syllable count and the abelianization modulo the edge
// relation are invariants and form the (collision-possible) bucket key;
// equal() arbitrates within buckets by reducing a quotient to the identity.
class AmalgamModel final : public GroupModel {
 public:
  AmalgamModel(ModelPtr a, ModelPtr b, const Word& u_a, const Word& u_b)
      : a_(std::move(a)), b_(std::move(b)) {
    symbols_ = make_symbols(detail::product_labels(*a_, *b_));
    ua_ = evaluate(*a_, u_a);
    ub_ = evaluate(*b_, u_b);
    if (a_->is_identity(ua_) || b_->is_identity(ub_))
      throw ValidationError("amalgam edge elements must be nontrivial");
    ua_word_ = u_a;
    ub_word_ = u_b;
    // Abelianization relation: image of u_A minus image of u_B in the
    // combined coordinate system (plain generators of A, then of B).
    relation_ = abelianize_word(canonical_in_combined(0, ua_));
    std::vector<int64_t> rb = abelianize_word(canonical_in_combined(1, ub_));
    for (size_t i = 0; i < relation_.size(); ++i) relation_[i] -= rb[i];
    pivot_ = -1;
    for (size_t i = 0; i < relation_.size(); ++i)
      if (relation_[i] != 0) {
        pivot_ = (int)i;
        break;
      }
    name_ = "amal(" + a_->name() + "." + b_->name() + ")";
  }

  const GroupModel& factor(int tag) const { return tag == 0 ? *a_ : *b_; }
  const Element& edge_element(int tag) const { return tag == 0 ? ua_ : ub_; }

  Element apply(const Element& x, int symbol) const override {
    Element out = x;
    int tag = symbol < a_->num_symbols() ? 0 : 1;
    int local = tag == 0 ? symbol : symbol - a_->num_symbols();
    if (!out.ints.empty() && out.ints.back() == tag)
      out.parts.back() = factor(tag).apply(out.parts.back(), local);
    else {
      out.parts.push_back(factor(tag).apply(factor(tag).identity(), local));
      out.ints.push_back(tag);
    }
    normalize(out);
    return out;
  }

  Word canonical_word(const Element& x) const override {
    Word w;
    for (size_t i = 0; i < x.parts.size(); ++i) {
      int tag = (int)x.ints[i];
      for (int s : factor(tag).canonical_word(x.parts[i]))
        w.push_back(tag == 0 ? s : s + a_->num_symbols());
    }
    return w;
  }

  void append_key(const Element& x, std::string& out) const override {
    out.push_back('m');
    out += std::to_string(x.parts.size());
    out.push_back(':');
    std::vector<int64_t> ab = abelianize_word(canonical_word(x));
    reduce_by_relation(ab);
    detail::append_int_list_key(ab, out);
  }

  bool exact_keys() const override { return false; }

  bool equal(const Element& x, const Element& y) const override {
    if (x.parts.size() != y.parts.size()) return false;
    // x == y iff x * y^-1 pinches to the empty form.
    Element q = model_mul(*this, x, inverse(y));
    return q.parts.empty();
  }

  // True when x lies in the image of factor `tag` (edge-subgroup elements lie
  // in both).  Relies on the normal form: reduced length is at most 1, and
  // lone edge-subgroup syllables are canonicalized into factor A.
  bool in_factor(const Element& x, int tag) const {
    if (x.parts.empty()) return true;
    if (x.parts.size() > 1) return false;
    if ((int)x.ints[0] == tag) return true;
    return detect_power((int)x.ints[0], x.parts[0]).first;
  }

  nlohmann::json describe() const override {
    return {{"family", "amalgam"},
            {"a", a_->describe()},
            {"b", b_->describe()},
            {"ua", format_word(a_->generators(), ua_word_)},
            {"ub", format_word(b_->generators(), ub_word_)}};
  }

 private:
  ModelPtr a_, b_;
  Element ua_, ub_;
  Word ua_word_, ub_word_;
  std::vector<int64_t> relation_;
  int pivot_;

  Word canonical_in_combined(int tag, const Element& v) const {
    Word w;
    for (int s : factor(tag).canonical_word(v)) w.push_back(tag == 0 ? s : s + a_->num_symbols());
    return w;
  }

  std::vector<int64_t> abelianize_word(const Word& w) const {
    std::vector<int64_t> out((size_t)(num_symbols() / 2), 0);
    for (int s : w) out[(size_t)(s / 2)] += is_plain_symbol(s) ? 1 : -1;
    return out;
  }

  void reduce_by_relation(std::vector<int64_t>& v) const {
    if (pivot_ < 0) return;
    int64_t q = detail::euclid_quot(v[(size_t)pivot_], relation_[(size_t)pivot_]);
    for (size_t i = 0; i < v.size(); ++i) v[i] -= q * relation_[i];
  }

  // Is v = u^k in its factor?  Searches |k| up to the word length of v,
  // which bounds the exponent because |u^k| >= |k| in every factor family.
  std::pair<bool, int64_t> detect_power(int tag, const Element& v) const {
    const GroupModel& f = factor(tag);
    if (f.is_identity(v)) return {true, 0};
    int64_t cap = (int64_t)f.canonical_word(v).size();
    const Element& u = edge_element(tag);
    Element pos = f.identity(), neg = f.identity();
    Element uinv = f.inverse(u);
    for (int64_t k = 1; k <= cap; ++k) {
      pos = model_mul(f, pos, u);
      if (f.equal(pos, v)) return {true, k};
      neg = model_mul(f, neg, uinv);
      if (f.equal(neg, v)) return {true, -k};
    }
    return {false, 0};
  }

  Element edge_power(int tag, int64_t k) const {
    const GroupModel& f = factor(tag);
    Element u = k >= 0 ? edge_element(tag) : f.inverse(edge_element(tag));
    Element out = f.identity();
    for (int64_t i = 0; i < (k >= 0 ? k : -k); ++i) out = model_mul(f, out, u);
    return out;
  }

  void normalize(Element& x) const {
    bool changed = true;
    while (changed) {
      changed = false;
      // Drop identity syllables and merge equal-tag neighbors.
      for (size_t i = 0; i < x.parts.size();) {
        int tag = (int)x.ints[i];
        if (factor(tag).is_identity(x.parts[i])) {
          x.parts.erase(x.parts.begin() + (ptrdiff_t)i);
          x.ints.erase(x.ints.begin() + (ptrdiff_t)i);
          changed = true;
          if (i > 0 && i < x.parts.size() && x.ints[i - 1] == x.ints[i]) {
            x.parts[i - 1] = model_mul(factor((int)x.ints[i - 1]), x.parts[i - 1], x.parts[i]);
            x.parts.erase(x.parts.begin() + (ptrdiff_t)i);
            x.ints.erase(x.ints.begin() + (ptrdiff_t)i);
            i = i > 0 ? i - 1 : 0;
          }
          continue;
        }
        ++i;
      }
      if (changed) continue;
      // Pinch: rewrite edge-subgroup syllables into the opposite factor and
      // merge; with more than one syllable this always shortens the form.
      for (size_t i = 0; i < x.parts.size(); ++i) {
        int tag = (int)x.ints[i];
        auto [is_power, k] = detect_power(tag, x.parts[i]);
        if (!is_power) continue;
        if (x.parts.size() == 1) {
          // Lone edge syllable: canonical side is factor A.
          if (tag == 1) {
            x.parts[0] = edge_power(0, k);
            x.ints[0] = 0;
            changed = true;
          }
          break;
        }
        int other = 1 - tag;
        Element converted = edge_power(other, k);
        if (i + 1 < x.parts.size()) {
          x.parts[i + 1] = model_mul(factor(other), converted, x.parts[i + 1]);
        } else {
          x.parts[i - 1] = model_mul(factor(other), x.parts[i - 1], converted);
        }
        x.parts.erase(x.parts.begin() + (ptrdiff_t)i);
        x.ints.erase(x.ints.begin() + (ptrdiff_t)i);
        changed = true;
        break;
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

inline ModelPtr make_zn(int n) { return std::make_shared<ZnModel>(n); }
inline ModelPtr make_free(int k) { return std::make_shared<FreeModel>(k); }
inline ModelPtr make_raag(const DefiningGraph& g) { return std::make_shared<RaagModel>(g); }
inline ModelPtr make_direct_product(ModelPtr a, ModelPtr b) {
  return std::make_shared<DirectProductModel>(std::move(a), std::move(b));
}
inline ModelPtr make_free_product(ModelPtr a, ModelPtr b) {
  return std::make_shared<FreeProductModel>(std::move(a), std::move(b));
}
inline ModelPtr make_gersten() { return std::make_shared<GerstenModel>(); }
inline ModelPtr make_cyclic_amalgam(ModelPtr a, ModelPtr b, const Word& u_a, const Word& u_b) {
  return std::make_shared<AmalgamModel>(std::move(a), std::move(b), u_a, u_b);
}

// Path graph on n vertices (0-1, 1-2, ...): the defining graphs used
// throughout the tools and tests.
inline DefiningGraph path_graph(int n) {
  DefiningGraph g;
  g.vertices = n;
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
  return g;
}

// Inverse of GroupModel::describe(): builds a model from its JSON metadata.
// Accepted shapes:
//   {"family":"zn","n":2}
//   {"family":"free","k":2}
//   {"family":"raag","graph":{"vertices":4,"edges":[[0,1],[1,2]]}}
//   {"family":"raag","path":4}              (shorthand for a path graph)
//   {"family":"direct","a":...,"b":...}
//   {"family":"freeprod","a":...,"b":...}
//   {"family":"gersten"}
//   {"family":"amalgam","a":...,"b":...,"ua":"a a","ub":"b b b"}
inline ModelPtr model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw ValidationError("group config must be an object with a \"family\" string");
  const std::string family = j.at("family").get<std::string>();
  auto require = [&](const char* field) -> const nlohmann::json& {
    if (!j.contains(field))
      throw ValidationError("group family \"" + family + "\" needs field \"" + field + "\"");
    return j.at(field);
  };
  try {
    if (family == "zn") return make_zn(require("n").get<int>());
    if (family == "free") return make_free(require("k").get<int>());
    if (family == "raag") {
      if (j.contains("path")) return make_raag(path_graph(j.at("path").get<int>()));
      const auto& jg = require("graph");
      DefiningGraph g;
      g.vertices = jg.at("vertices").get<int>();
      for (const auto& e : jg.at("edges")) g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
      return make_raag(g);
    }
    if (family == "direct")
      return make_direct_product(model_from_json(require("a")), model_from_json(require("b")));
    if (family == "freeprod")
      return make_free_product(model_from_json(require("a")), model_from_json(require("b")));
    if (family == "gersten") return make_gersten();
    if (family == "amalgam") {
      ModelPtr a = model_from_json(require("a"));
      ModelPtr b = model_from_json(require("b"));
      Word ua = parse_word(a->generators(), require("ua").get<std::string>());
      Word ub = parse_word(b->generators(), require("ub").get<std::string>());
      return make_cyclic_amalgam(std::move(a), std::move(b), ua, ub);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad group config for family \"" + family + "\": " + e.what());
  }
  throw ValidationError("unknown group family \"" + family + "\"");
}

}  // namespace divlab

#endif  // DIVLAB_GROUP_MODELS_HPP
