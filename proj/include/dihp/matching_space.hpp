#pragma once

#include "exact.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dihp {

using Vertex = int;

inline constexpr std::size_t kDefaultCap = 10'000'000;

class CapacityError : public std::length_error {
 public:
  CapacityError(const std::string& what, BigInt required)
      : std::length_error(what + " needs " + required.str() + " elements"), required_(std::move(required)) {}
  const BigInt& required() const { return required_; }

 private:
  BigInt required_;
};

inline void check_cap(const BigInt& need, std::size_t cap, const std::string& what) {
  if (need > cap) throw CapacityError(what, need);
}

struct Edge {
  Vertex u = 0, v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {
    if (a == b) throw std::domain_error("edge endpoints must differ");
  }

  bool touches(Vertex x) const { return u == x || v == x; }
  bool shares_vertex(const Edge& o) const { return touches(o.u) || touches(o.v); }

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct LabeledEdge {
  Edge e;
  int s = 1;  // +1 or -1
  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

// unlabeled matching, edges kept sorted
using Matching = std::vector<Edge>;

inline bool is_matching(const Matching& M) {
  std::vector<Vertex> vs;
  for (const auto& e : M) {
    vs.push_back(e.u);
    vs.push_back(e.v);
  }
  std::sort(vs.begin(), vs.end());
  return std::adjacent_find(vs.begin(), vs.end()) == vs.end();
}

inline std::vector<Vertex> matching_vertices(const Matching& M) {
  std::vector<Vertex> vs;
  for (const auto& e : M) {
    vs.push_back(e.u);
    vs.push_back(e.v);
  }
  std::sort(vs.begin(), vs.end());
  return vs;
}

class GroundSet {
 public:
  GroundSet() = default;
  explicit GroundSet(std::vector<Vertex> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
      throw std::domain_error("ground set has repeated vertex ids");
  }

  static GroundSet range(std::size_t n) {
    std::vector<Vertex> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = Vertex(i + 1);
    return GroundSet(std::move(ids));
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<Vertex>& ids() const { return ids_; }
  bool contains(Vertex v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

  GroundSet without(const std::vector<Vertex>& drop) const {
    std::vector<Vertex> keep;
    for (Vertex v : ids_)
      if (std::find(drop.begin(), drop.end(), v) == drop.end()) keep.push_back(v);
    return GroundSet(std::move(keep));
  }

  // true when the ids are exactly 1..n
  bool is_standard() const {
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (ids_[i] != Vertex(i + 1)) return false;
    return true;
  }

  friend bool operator==(const GroundSet&, const GroundSet&) = default;

 private:
  std::vector<Vertex> ids_;
};

class LabeledMatching {
 public:
  LabeledMatching() = default;
  explicit LabeledMatching(std::vector<LabeledEdge> edges) : edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) { return a.e < b.e; });
    Matching M;
    for (const auto& le : edges_) {
      if (le.s != 1 && le.s != -1) throw std::domain_error("edge label must be +1 or -1");
      M.push_back(le.e);
    }
    if (!is_matching(M)) throw std::domain_error("edges are not vertex-disjoint");
  }

  LabeledMatching(const Matching& M, const std::vector<int>& signs) {
    if (M.size() != signs.size()) throw std::invalid_argument("sign count mismatch");
    std::vector<LabeledEdge> es;
    for (std::size_t i = 0; i < M.size(); ++i) es.push_back({M[i], signs[i]});
    *this = LabeledMatching(std::move(es));
  }

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<LabeledEdge>& edges() const { return edges_; }

  Matching support() const {
    Matching M;
    for (const auto& le : edges_) M.push_back(le.e);
    return M;
  }

  std::vector<int> signs() const {
    std::vector<int> s;
    for (const auto& le : edges_) s.push_back(le.s);
    return s;
  }

  // 0 when the edge is absent
  int label(const Edge& e) const {
    for (const auto& le : edges_)
      if (le.e == e) return le.s;
    return 0;
  }

  bool covers(Vertex v) const {
    for (const auto& le : edges_)
      if (le.e.touches(v)) return true;
    return false;
  }

  std::vector<Vertex> vertices() const { return matching_vertices(support()); }

  LabeledMatching merged(const LabeledMatching& other) const {
    auto es = edges_;
    es.insert(es.end(), other.edges_.begin(), other.edges_.end());
    return LabeledMatching(std::move(es));
  }

  // product of labels over S; 0 if some edge of S is missing
  int monomial(const Matching& S) const {
    int p = 1;
    for (const auto& e : S) {
      int l = label(e);
      if (l == 0) return 0;
      p *= l;
    }
    return p;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(edges_[i].e.u) + "-" + std::to_string(edges_[i].e.v) + (edges_[i].s > 0 ? ":+1" : ":-1");
    }
    return out;
  }

  static LabeledMatching parse(std::string_view text) {
    std::vector<LabeledEdge> es;
    std::size_t pos = 0;
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    if (trim(text).empty()) return {};
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      std::string_view tok = trim(text.substr(pos, comma - pos));
      std::size_t dash = tok.find('-'), colon = tok.find(':');
      if (dash == std::string_view::npos || colon == std::string_view::npos || dash > colon)
        throw std::invalid_argument("bad edge token '" + std::string(tok) + "'");
      int u = 0, v = 0;
      try {
        u = std::stoi(std::string(tok.substr(0, dash)));
        v = std::stoi(std::string(tok.substr(dash + 1, colon - dash - 1)));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad vertex in token '" + std::string(tok) + "'");
      }
      std::string_view sg = tok.substr(colon + 1);
      int s;
      if (sg == "+1" || sg == "1")
        s = 1;
      else if (sg == "-1")
        s = -1;
      else
        throw std::invalid_argument("bad sign in token '" + std::string(tok) + "'");
      es.push_back({Edge(u, v), s});
      pos = comma + 1;
      if (comma == text.size()) break;
    }
    return LabeledMatching(std::move(es));
  }

  std::string key() const {
    std::string k;
    k.reserve(edges_.size() * 5);
    for (const auto& le : edges_) {
      k.push_back(char(le.e.u & 0xff));
      k.push_back(char(le.e.u >> 8));
      k.push_back(char(le.e.v & 0xff));
      k.push_back(char(le.e.v >> 8));
      k.push_back(le.s > 0 ? '+' : '-');
    }
    return k;
  }

  friend bool operator==(const LabeledMatching&, const LabeledMatching&) = default;

  // edge list first, then sign vector with +1 ahead of -1
  friend bool operator<(const LabeledMatching& a, const LabeledMatching& b) {
    auto ea = a.support(), eb = b.support();
    if (ea != eb) return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
    for (std::size_t i = 0; i < a.edges_.size(); ++i)
      if (a.edges_[i].s != b.edges_[i].s) return a.edges_[i].s > b.edges_[i].s;
    return false;
  }

 private:
  std::vector<LabeledEdge> edges_;
};

using Restriction = LabeledMatching;

// y agrees with z: every labeled edge of z appears in y with the same label
inline bool agrees(const LabeledMatching& y, const Restriction& z) {
  for (const auto& le : z.edges())
    if (y.label(le.e) != le.s) return false;
  return true;
}

inline bool subsumes(const Restriction& z, const Restriction& zp) { return agrees(z, zp); }

inline std::vector<Vertex> neighborhood(const Restriction& z) { return z.vertices(); }

inline BigInt count_matchings(std::size_t n, std::size_t m) {
  if (2 * m > n) return 0;
  return factorial(unsigned(n)) / (factorial(unsigned(n - 2 * m)) * factorial(unsigned(m)) * pow2(unsigned(m)));
}

class MatchingSpace {
 public:
  MatchingSpace(GroundSet ground, std::size_t m) : ground_(std::move(ground)), m_(m) {
    if (2 * m_ > ground_.size()) throw std::domain_error("matching size exceeds half the ground set");
  }
  static MatchingSpace standard(std::size_t n, std::size_t m) { return MatchingSpace(GroundSet::range(n), m); }

  const GroundSet& ground() const { return ground_; }
  std::size_t n() const { return ground_.size(); }
  std::size_t m() const { return m_; }

  BigInt matchings() const { return count_matchings(n(), m_); }
  BigInt size() const { return matchings() * pow2(unsigned(m_)); }

  bool contains(const LabeledMatching& y) const {
    if (y.size() != m_) return false;
    for (const auto& le : y.edges())
      if (!ground_.contains(le.e.u) || !ground_.contains(le.e.v)) return false;
    return true;
  }

  void check_restriction(const Restriction& z) const {
    if (z.size() > m_) throw std::domain_error("restriction larger than m");
    for (const auto& le : z.edges())
      if (!ground_.contains(le.e.u) || !ground_.contains(le.e.v))
        throw std::domain_error("restriction leaves the ground set");
  }

  // Omega_z is a copy of the space on U \ N(z) with m - |z| edges
  MatchingSpace residual(const Restriction& z) const {
    check_restriction(z);
    return MatchingSpace(ground_.without(z.vertices()), m_ - z.size());
  }

  BigInt restricted_size(const Restriction& z) const { return residual(z).size(); }

  friend bool operator==(const MatchingSpace&, const MatchingSpace&) = default;

 private:
  GroundSet ground_;
  std::size_t m_;
};

// all d-matchings on the ground set, in lexicographic order of edge lists
inline std::vector<Matching> enumerate_matchings(const GroundSet& ground, std::size_t d, std::size_t cap = kDefaultCap) {
  check_cap(count_matchings(ground.size(), d), cap, "matching enumeration");
  const auto& ids = ground.ids();
  const std::size_t n = ids.size();
  std::vector<Matching> out;
  if (2 * d > n) return out;
  std::vector<char> used(n, 0);
  Matching cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (cur.size() == d) {
      out.push_back(cur);
      return;
    }
    for (std::size_t a = from; a < n; ++a) {
      if (used[a]) continue;
      std::size_t free_after = 0;
      for (std::size_t t = a; t < n; ++t) free_after += !used[t];
      if (free_after < 2 * (d - cur.size())) return;
      used[a] = 1;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (used[b]) continue;
        used[b] = 1;
        cur.emplace_back(ids[a], ids[b]);
        self(self, a + 1);
        cur.pop_back();
        used[b] = 0;
      }
      used[a] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

inline std::vector<int> sign_vector(std::size_t m, std::uint64_t mask) {
  std::vector<int> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = (mask >> (m - 1 - j)) & 1 ? -1 : 1;
  return s;
}

inline std::vector<LabeledMatching> enumerate_space(const MatchingSpace& space, std::size_t cap = kDefaultCap) {
  check_cap(space.size(), cap, "space enumeration");
  std::vector<LabeledMatching> out;
  out.reserve(space.size().convert_to<std::size_t>());
  const std::size_t m = space.m();
  for (const auto& M : enumerate_matchings(space.ground(), m, cap))
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) out.emplace_back(M, sign_vector(m, mask));
  return out;
}

inline std::vector<LabeledMatching> restricted_space(const MatchingSpace& space, const Restriction& z,
                                                     std::size_t cap = kDefaultCap) {
  auto sub = enumerate_space(space.residual(z), cap);
  for (auto& y : sub) y = y.merged(z);
  std::sort(sub.begin(), sub.end());
  return sub;
}

inline Matching sample_matching(const GroundSet& ground, std::size_t m, Rng& rng) {
  if (2 * m > ground.size()) throw std::domain_error("matching size exceeds half the ground set");
  std::vector<Vertex> vs = ground.ids();
  // partial Fisher-Yates; consecutive pairs of a uniform permutation give a uniform matching
  for (std::size_t i = 0; i < 2 * m; ++i) std::swap(vs[i], vs[i + rng.below(vs.size() - i)]);
  Matching M;
  for (std::size_t i = 0; i < m; ++i) M.emplace_back(vs[2 * i], vs[2 * i + 1]);
  std::sort(M.begin(), M.end());
  return M;
}

inline LabeledMatching sample_uniform(const MatchingSpace& space, Rng& rng) {
  Matching M = sample_matching(space.ground(), space.m(), rng);
  std::vector<int> s(M.size());
  for (auto& x : s) x = rng.coin() ? -1 : 1;
  return LabeledMatching(M, s);
}

// enumerated space with an index, shared by subsets and functions over it
class IndexedSpace {
 public:
  static std::shared_ptr<const IndexedSpace> make(const MatchingSpace& space, std::size_t cap = kDefaultCap) {
    return std::shared_ptr<const IndexedSpace>(new IndexedSpace(space, cap));
  }

  const MatchingSpace& space() const { return space_; }
  std::size_t size() const { return elems_.size(); }
  const LabeledMatching& at(std::size_t i) const { return elems_[i]; }
  const std::vector<LabeledMatching>& elements() const { return elems_; }

  std::optional<std::size_t> find(const LabeledMatching& y) const {
    auto it = index_.find(y.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const LabeledMatching& y) const {
    auto i = find(y);
    if (!i) throw std::out_of_range("element not in space: " + y.str());
    return *i;
  }

 private:
  IndexedSpace(const MatchingSpace& space, std::size_t cap) : space_(space), elems_(enumerate_space(space, cap)) {
    index_.reserve(elems_.size());
    for (std::size_t i = 0; i < elems_.size(); ++i) index_.emplace(elems_[i].key(), i);
  }

  MatchingSpace space_;
  std::vector<LabeledMatching> elems_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const IndexedSpace>;

}  // namespace dihp
