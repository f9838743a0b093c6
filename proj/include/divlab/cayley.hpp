#ifndef DIVLAB_CAYLEY_HPP
#define DIVLAB_CAYLEY_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "divlab/common.hpp"
#include "divlab/group_models.hpp"

namespace divlab {

inline constexpr uint32_t kNoEntry = 0xFFFFFFFFu;

struct BallOptions {
  uint64_t max_entries = 0;   // 0 = unlimited
  uint64_t budget_bytes = 0;  // 0 = unlimited
};

// The metric ball B(1, radius) in the Cayley graph, stored as flat arrays:
// concatenated canonical keys, per-entry distance, the symbol that first
// discovered each entry, and a full adjacency table restricted to the ball.
// Entry 0 is the identity; entries are ordered by (distance, discovery),
// which for exact-key models is ShortLex order of least geodesic words.
// Reconstructing the breadth-first parent chain therefore yields the
// ShortLex-least geodesic from the identity to any entry.
class Ball {
 public:
  int radius() const { return radius_; }
  uint32_t size() const { return (uint32_t)key_off_.size() - 1; }
  int num_symbols() const { return syms_; }
  uint64_t fingerprint() const { return fingerprint_; }
  bool exact() const { return exact_; }

  int dist(uint32_t i) const { return dist_[i]; }

  std::string_view key_at(uint32_t i) const {
    return std::string_view(keys_).substr(key_off_[i], key_off_[i + 1] - key_off_[i]);
  }

  // Index of x * generator[s], or kNoEntry if it falls outside the ball.
  uint32_t neighbor(uint32_t i, int s) const { return adj_[(size_t)i * (size_t)syms_ + (size_t)s]; }

  const uint32_t* adj_row(uint32_t i) const { return adj_.data() + (size_t)i * (size_t)syms_; }

  // Entries at distance exactly d form the contiguous range [first, second).
  std::pair<uint32_t, uint32_t> sphere(int d) const {
    if (d < 0 || d > radius_) return {0, 0};
    return {layer_starts_[(size_t)d], layer_starts_[(size_t)d + 1]};
  }

  const std::vector<uint32_t>& layer_starts() const { return layer_starts_; }

  int64_t find(const GroupModel& G, const Element& e) const {
    std::string k = G.key(e);
    uint64_t i = fnv1a64(k) & table_mask_;
    while (table_[i] != kNoEntry) {
      uint32_t entry = table_[i];
      if (key_at(entry) == k && (exact_ || G.equal(elems_[entry], e))) return entry;
      i = (i + 1) & table_mask_;
    }
    return -1;
  }

  // Exact-key models only: lookup by serialized key.
  int64_t find_key(std::string_view k) const {
    uint64_t i = fnv1a64(k) & table_mask_;
    while (table_[i] != kNoEntry) {
      if (key_at(table_[i]) == k) return table_[i];
      i = (i + 1) & table_mask_;
    }
    return -1;
  }

  Element element_at(const GroupModel& G, uint32_t i) const {
    return exact_ ? G.element_from_key(key_at(i)) : elems_[i];
  }

  // ShortLex-least geodesic word from the identity to entry i.
  Word word_to(uint32_t i) const {
    Word w;
    while (i != 0) {
      int s = psym_[i];
      w.push_back(s);
      i = neighbor(i, inverse_symbol(s));
    }
    std::reverse(w.begin(), w.end());
    return w;
  }

  uint64_t memory_bytes() const {
    uint64_t elems = 0;
    for (const Element& e : elems_) elems += element_bytes(e);
    return keys_.size() + key_off_.size() * 4 + dist_.size() * 2 + psym_.size() +
           adj_.size() * 4 + table_.size() * 4 + elems;
  }

  friend Ball build_ball(const GroupModel& G, int radius, const BallOptions& opts);
  friend void save_ball(const Ball& b, const std::string& path);
  friend std::optional<Ball> load_ball(const std::string& path, uint64_t fingerprint, int radius);

 private:
  int radius_ = 0;
  int syms_ = 0;
  bool exact_ = true;
  uint64_t fingerprint_ = 0;
  std::string keys_;
  std::vector<uint32_t> key_off_ = {0};
  std::vector<int16_t> dist_;
  std::vector<uint8_t> psym_;
  std::vector<uint32_t> adj_;
  std::vector<uint32_t> layer_starts_;
  std::vector<uint32_t> table_;
  uint64_t table_mask_ = 0;
  std::vector<Element> elems_;

  static uint64_t element_bytes(const Element& e) {
    uint64_t total = 48 + e.letters.size() + e.ints.size() * 8;
    for (const Element& p : e.parts) total += element_bytes(p);
    return total;
  }

  void rehash(uint64_t new_size) {
    table_.assign(new_size, kNoEntry);
    table_mask_ = new_size - 1;
    for (uint32_t entry = 0; entry < size(); ++entry) {
      uint64_t i = fnv1a64(key_at(entry)) & table_mask_;
      while (table_[i] != kNoEntry) i = (i + 1) & table_mask_;
      table_[i] = entry;
    }
  }

  // Finds or inserts; second = true when a new entry was created.  The new
  // entry's dist/psym are the caller's responsibility.
  std::pair<uint32_t, bool> find_or_insert(const GroupModel& G, const std::string& k,
                                           const Element& e) {
    if ((uint64_t)(size() + 1) * 2 > table_.size()) rehash(table_.size() * 4);
    uint64_t i = fnv1a64(k) & table_mask_;
    while (table_[i] != kNoEntry) {
      uint32_t entry = table_[i];
      if (key_at(entry) == k && (exact_ || G.equal(elems_[entry], e))) return {entry, false};
      i = (i + 1) & table_mask_;
    }
    uint32_t entry = size();
    keys_ += k;
    key_off_.push_back((uint32_t)keys_.size());
    adj_.resize(adj_.size() + (size_t)syms_, kNoEntry);
    if (!exact_) elems_.push_back(e);
    table_[i] = entry;
    return {entry, true};
  }
};

inline Ball build_ball(const GroupModel& G, int radius, const BallOptions& opts = {}) {
  if (radius < 0 || radius > 30000) throw ValidationError("ball radius out of range");
  Ball b;
  b.radius_ = radius;
  b.syms_ = G.num_symbols();
  b.exact_ = G.exact_keys();
  b.fingerprint_ = fnv1a64(G.describe().dump());
  b.table_.assign(1024, kNoEntry);
  b.table_mask_ = b.table_.size() - 1;

  b.find_or_insert(G, G.key(G.identity()), G.identity());
  b.dist_ = {0};
  b.psym_ = {0xFF};
  b.layer_starts_ = {0, 1};

  uint64_t inserts_since_check = 0;
  auto check_budget = [&](int completed_radius) {
    if (opts.max_entries && b.size() > opts.max_entries)
      throw ResourceError("ball entry limit exceeded", completed_radius);
    if (opts.budget_bytes && b.memory_bytes() > opts.budget_bytes)
      throw ResourceError("ball memory budget exceeded", completed_radius);
  };

  for (int d = 1; d <= radius; ++d) {
    uint32_t lo = b.layer_starts_[(size_t)d - 1];
    uint32_t hi = b.layer_starts_[(size_t)d];
    for (uint32_t idx = lo; idx < hi; ++idx) {
      Element x = b.element_at(G, idx);
      for (int s = 0; s < b.syms_; ++s) {
        if (b.neighbor(idx, s) != kNoEntry) continue;
        Element child = G.apply(x, s);
        std::string k = G.key(child);
        auto [cidx, inserted] = b.find_or_insert(G, k, child);
        if (inserted) {
          b.dist_.push_back((int16_t)d);
          b.psym_.push_back((uint8_t)s);
          if (++inserts_since_check >= 65536) {
            inserts_since_check = 0;
            check_budget(d - 1);
          }
        }
        b.adj_[(size_t)idx * (size_t)b.syms_ + (size_t)s] = cidx;
        b.adj_[(size_t)cidx * (size_t)b.syms_ + (size_t)inverse_symbol(s)] = idx;
      }
    }
    b.layer_starts_.push_back(b.size());
    check_budget(d - 1);
    if (b.layer_starts_[(size_t)d + 1] == b.layer_starts_[(size_t)d]) {
      // Sphere is empty; the whole group was exhausted below the radius.
      while ((int)b.layer_starts_.size() < radius + 2) b.layer_starts_.push_back(b.size());
      break;
    }
  }

  // Boundary sweep: edges between two outermost-layer entries are not seen
  // by layered expansion (those entries are never expanded), so probe them
  // explicitly.  Lookup only -- nothing outside the ball is inserted.
  uint32_t blo = b.layer_starts_[(size_t)radius];
  uint32_t bhi = b.layer_starts_[(size_t)radius + 1];
  for (uint32_t idx = blo; idx < bhi; ++idx) {
    Element x = b.element_at(G, idx);
    for (int s = 0; s < b.syms_; ++s) {
      if (b.neighbor(idx, s) != kNoEntry) continue;
      Element child = G.apply(x, s);
      int64_t cidx = b.find(G, child);
      if (cidx < 0) continue;
      b.adj_[(size_t)idx * (size_t)b.syms_ + (size_t)s] = (uint32_t)cidx;
      b.adj_[(size_t)cidx * (size_t)b.syms_ + (size_t)inverse_symbol(s)] = idx;
    }
  }
  return b;
}

// --------------------------------------------------------------------------
// Breadth-first searches restricted to a ball.
// --------------------------------------------------------------------------

// Distances from `sources` inside the ball, visiting only entries where
// allowed(i) holds; unreachable or disallowed entries get -1.
template <class AllowFn>
void ball_bfs_if(const Ball& ball, const std::vector<uint32_t>& sources, AllowFn allowed,
                 std::vector<int32_t>& dist) {
  dist.assign(ball.size(), -1);
  std::vector<uint32_t> queue;
  queue.reserve(ball.size());
  for (uint32_t u : sources) {
    if (!allowed(u) || dist[u] != -1) continue;
    dist[u] = 0;
    queue.push_back(u);
  }
  const int syms = ball.num_symbols();
  for (size_t head = 0; head < queue.size(); ++head) {
    uint32_t u = queue[head];
    int32_t du = dist[u];
    const uint32_t* row = ball.adj_row(u);
    for (int s = 0; s < syms; ++s) {
      uint32_t v = row[s];
      if (v == kNoEntry || dist[v] != -1 || !allowed(v)) continue;
      dist[v] = du + 1;
      queue.push_back(v);
    }
  }
}

inline void ball_bfs(const Ball& ball, const std::vector<uint32_t>& sources,
                     std::vector<int32_t>& dist) {
  ball_bfs_if(
      ball, sources, [](uint32_t) { return true; }, dist);
}

// Distance between two entries through the ball interior (-1 if separated).
inline int32_t ball_distance(const Ball& ball, uint32_t from, uint32_t to) {
  std::vector<int32_t> dist;
  ball_bfs(ball, {from}, dist);
  return dist[to];
}

// Diameter of the subset (entries where member(i) holds) w.r.t. shortest
// paths running inside the subset.  Exact when the subset has at most
// `exact_cutoff` members (BFS from each); otherwise a double-sweep lower
// bound (BFS from an arbitrary member, then from the farthest found).
// Returns {diameter, exact}; diameter -1 means the subset is disconnected,
// -2 that it is empty.
template <class MemberFn>
std::pair<int64_t, bool> subset_diameter(const Ball& ball, MemberFn member,
                                         uint32_t exact_cutoff = 2000) {
  std::vector<uint32_t> members;
  for (uint32_t i = 0; i < ball.size(); ++i)
    if (member(i)) members.push_back(i);
  if (members.empty()) return {-2, true};
  if (members.size() == 1) return {0, true};

  if (members.size() <= exact_cutoff) {
    // All-pairs over a compact local copy of the induced subgraph.
    const int syms = ball.num_symbols();
    const size_t n = members.size();
    auto local_of = [&](uint32_t g) -> int32_t {
      auto it = std::lower_bound(members.begin(), members.end(), g);
      return (it != members.end() && *it == g) ? (int32_t)(it - members.begin()) : -1;
    };
    std::vector<int32_t> ladj(n * (size_t)syms, -1);
    for (size_t u = 0; u < n; ++u) {
      const uint32_t* row = ball.adj_row(members[u]);
      for (int s = 0; s < syms; ++s)
        if (row[s] != kNoEntry) ladj[u * (size_t)syms + (size_t)s] = local_of(row[s]);
    }
    int64_t best = 0;
    std::vector<int32_t> dist(n);
    std::vector<int32_t> queue(n);
    for (size_t src = 0; src < n; ++src) {
      std::fill(dist.begin(), dist.end(), -1);
      dist[src] = 0;
      queue[0] = (int32_t)src;
      size_t head = 0, tail = 1;
      int64_t reached = 1;
      while (head < tail) {
        int32_t u = queue[head++];
        for (int s = 0; s < syms; ++s) {
          int32_t v = ladj[(size_t)u * (size_t)syms + (size_t)s];
          if (v < 0 || dist[(size_t)v] != -1) continue;
          dist[(size_t)v] = dist[(size_t)u] + 1;
          queue[tail++] = v;
          ++reached;
          best = std::max<int64_t>(best, dist[(size_t)v]);
        }
      }
      if (reached != (int64_t)n) return {-1, true};
    }
    return {best, true};
  }

  // Double sweep: lower bound only.
  std::vector<int32_t> dist;
  auto sweep = [&](uint32_t src) -> std::pair<int64_t, uint32_t> {
    ball_bfs_if(ball, {src}, member, dist);
    int64_t best = -1;
    uint32_t arg = src;
    for (uint32_t m : members) {
      if (dist[m] < 0) return {-1, m};
      if (dist[m] > best) {
        best = dist[m];
        arg = m;
      }
    }
    return {best, arg};
  };
  auto [d1, far1] = sweep(members[0]);
  if (d1 < 0) return {-1, false};
  auto [d2, far2] = sweep(far1);
  (void)far2;
  if (d2 < 0) return {-1, false};
  return {std::max(d1, d2), false};
}

// --------------------------------------------------------------------------
// Binary ball cache (little-endian, x86 layout).
// --------------------------------------------------------------------------

namespace detail {

inline void write_raw(std::ofstream& out, const void* p, size_t n, uint64_t& check) {
  if (n == 0) return;
  out.write((const char*)p, (std::streamsize)n);
  check = fnv1a64(std::string_view((const char*)p, n), check);
}

inline bool read_raw(std::ifstream& in, void* p, size_t n, uint64_t& check) {
  if (n == 0) return true;
  in.read((char*)p, (std::streamsize)n);
  if (!in) return false;
  check = fnv1a64(std::string_view((const char*)p, n), check);
  return true;
}

template <class T>
void write_vec(std::ofstream& out, const std::vector<T>& v, uint64_t& check) {
  uint64_t n = v.size();
  write_raw(out, &n, 8, check);
  write_raw(out, v.data(), n * sizeof(T), check);
}

template <class T>
bool read_vec(std::ifstream& in, std::vector<T>& v, uint64_t& check, uint64_t limit) {
  uint64_t n = 0;
  if (!read_raw(in, &n, 8, check) || n > limit) return false;
  v.resize(n);
  return read_raw(in, v.data(), n * sizeof(T), check);
}

}  // namespace detail

// Caches exact-key balls only (bucketed models carry full elements, which
// are cheap to rebuild and have no flat encoding).
inline void save_ball(const Ball& b, const std::string& path) {
  if (!b.exact_) throw ValidationError("only exact-key balls can be cached");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write ball cache: " + path);
  uint64_t check = 0xcbf29ce484222325ull;
  const char magic[4] = {'D', 'L', 'B', '1'};
  out.write(magic, 4);
  detail::write_raw(out, &b.fingerprint_, 8, check);
  int64_t radius = b.radius_, syms = b.syms_;
  detail::write_raw(out, &radius, 8, check);
  detail::write_raw(out, &syms, 8, check);
  uint64_t nkeys = b.keys_.size();
  detail::write_raw(out, &nkeys, 8, check);
  detail::write_raw(out, b.keys_.data(), nkeys, check);
  detail::write_vec(out, b.key_off_, check);
  detail::write_vec(out, b.dist_, check);
  detail::write_vec(out, b.psym_, check);
  detail::write_vec(out, b.adj_, check);
  detail::write_vec(out, b.layer_starts_, check);
  out.write((const char*)&check, 8);
  if (!out) throw ValidationError("short write on ball cache: " + path);
}

// Returns the cached ball when `path` holds a valid cache for exactly this
// model fingerprint and radius; nullopt otherwise (caller rebuilds).
inline std::optional<Ball> load_ball(const std::string& path, uint64_t fingerprint, int radius) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DLB1", 4) != 0) return std::nullopt;
  uint64_t check = 0xcbf29ce484222325ull;
  Ball b;
  uint64_t fp = 0;
  int64_t r = 0, syms = 0;
  if (!detail::read_raw(in, &fp, 8, check) || fp != fingerprint) return std::nullopt;
  if (!detail::read_raw(in, &r, 8, check) || r != radius) return std::nullopt;
  if (!detail::read_raw(in, &syms, 8, check) || syms < 2 || syms > 255) return std::nullopt;
  constexpr uint64_t kLimit = 1ull << 33;
  uint64_t nkeys = 0;
  if (!detail::read_raw(in, &nkeys, 8, check) || nkeys > kLimit) return std::nullopt;
  b.keys_.resize(nkeys);
  if (!detail::read_raw(in, b.keys_.data(), nkeys, check)) return std::nullopt;
  if (!detail::read_vec(in, b.key_off_, check, kLimit)) return std::nullopt;
  if (!detail::read_vec(in, b.dist_, check, kLimit)) return std::nullopt;
  if (!detail::read_vec(in, b.psym_, check, kLimit)) return std::nullopt;
  if (!detail::read_vec(in, b.adj_, check, kLimit)) return std::nullopt;
  if (!detail::read_vec(in, b.layer_starts_, check, kLimit)) return std::nullopt;
  uint64_t stored = 0;
  in.read((char*)&stored, 8);
  if (!in || stored != check) return std::nullopt;
  b.fingerprint_ = fp;
  b.radius_ = (int)r;
  b.syms_ = (int)syms;
  b.exact_ = true;
  // Structural sanity before trusting the adjacency table.
  uint32_t n = (uint32_t)b.dist_.size();
  if (b.key_off_.size() != (size_t)n + 1 || b.psym_.size() != n ||
      b.adj_.size() != (size_t)n * (size_t)syms || b.layer_starts_.size() != (size_t)radius + 2 ||
      b.key_off_.front() != 0 || b.key_off_.back() != b.keys_.size())
    return std::nullopt;
  for (uint32_t v : b.adj_)
    if (v != kNoEntry && v >= n) return std::nullopt;
  uint64_t table_size = 1024;
  while (table_size < (uint64_t)n * 2) table_size *= 4;
  b.rehash(table_size);
  return b;
}

}  // namespace divlab

#endif  // DIVLAB_CAYLEY_HPP
