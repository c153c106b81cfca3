#pragma once

#include "omega_subset.hpp"

#include <cmath>
#include <functional>
#include <span>

namespace dihp {

// x in F_2^n over vertices 1..n; bit v-1 is the side of vertex v
struct Bipartition {
  std::size_t n = 0;
  std::uint64_t bits = 0;

  int side(Vertex v) const { return int((bits >> (v - 1)) & 1); }

  std::string str() const {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i)
      if ((bits >> i) & 1) s[i] = '1';
    return s;
  }

  static Bipartition parse(std::string_view s) {
    if (s.size() > 64) throw std::invalid_argument("bipartition longer than 64 vertices");
    Bipartition x{s.size(), 0};
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        x.bits |= std::uint64_t(1) << i;
      else if (s[i] != '0')
        throw std::invalid_argument("bipartition must be a 0/1 string");
    }
    return x;
  }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

// x in L(y): x_u + x_v = (1 - y_uv)/2 on every edge of the constraint
inline bool subspace_membership(const Bipartition& x, std::span<const LabeledEdge> constraint) {
  for (const auto& le : constraint)
    if ((x.side(le.e.u) ^ x.side(le.e.v)) != (le.s < 0 ? 1 : 0)) return false;
  return true;
}

inline bool subspace_membership(const Bipartition& x, const LabeledMatching& y) {
  return subspace_membership(x, std::span<const LabeledEdge>(y.edges()));
}

inline LabeledMatching label_by(const Bipartition& x, const Matching& M) {
  std::vector<int> s;
  for (const auto& e : M) s.push_back(x.side(e.u) ^ x.side(e.v) ? -1 : 1);
  return LabeledMatching(M, s);
}

struct DihpInstance {
  std::size_t n = 0, m = 0;
  std::vector<LabeledMatching> players;
  bool yes = false;
  std::optional<Bipartition> witness;

  std::size_t K() const { return players.size(); }

  std::string serialize() const {
    std::string out = "#dihp n=" + std::to_string(n) + " m=" + std::to_string(m) + " K=" + std::to_string(K()) +
                      " label=" + (yes ? "yes" : "no") + "\n";
    for (const auto& y : players) out += y.str() + "\n";
    if (witness) out += "#witness " + witness->str() + "\n";
    return out;
  }

  static DihpInstance parse(const std::string& text) {
    DihpInstance inst;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::size_t k_hdr = 0;
    while (std::getline(in, line)) {
      if (line.rfind("#dihp", 0) == 0) {
        std::istringstream h(line.substr(5));
        std::string kv;
        while (h >> kv) {
          auto eq = kv.find('=');
          if (eq == std::string::npos) throw std::invalid_argument("bad header field " + kv);
          std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
          if (k == "n") inst.n = std::stoul(v);
          else if (k == "m") inst.m = std::stoul(v);
          else if (k == "K") k_hdr = std::stoul(v);
          else if (k == "label") inst.yes = (v == "yes");
        }
        header = true;
      } else if (line.rfind("#witness", 0) == 0) {
        std::string bits = line.substr(8);
        bits.erase(0, bits.find_first_not_of(' '));
        inst.witness = Bipartition::parse(bits);
      } else if (!line.empty() && line[0] != '#') {
        inst.players.push_back(LabeledMatching::parse(line));
      }
    }
    if (!header) throw std::invalid_argument("missing #dihp header");
    if (inst.m == 0) inst.players.assign(k_hdr, LabeledMatching{});
    if (inst.players.size() != k_hdr) throw std::invalid_argument("player count does not match header");
    auto space = MatchingSpace::standard(inst.n, inst.m);
    for (const auto& y : inst.players)
      if (!space.contains(y)) throw std::invalid_argument("player input " + y.str() + " is not in the space");
    return inst;
  }
};

inline DihpInstance sample_no(std::size_t n, std::size_t m, std::size_t K, Rng& rng) {
  auto space = MatchingSpace::standard(n, m);
  DihpInstance inst{n, m, {}, false, std::nullopt};
  for (std::size_t i = 0; i < K; ++i) inst.players.push_back(sample_uniform(space, rng));
  return inst;
}

inline DihpInstance sample_yes(std::size_t n, std::size_t m, std::size_t K, Rng& rng) {
  if (n > 64) throw std::domain_error("bipartitions are limited to 64 vertices");
  auto ground = GroundSet::range(n);
  Bipartition x{n, n == 64 ? rng.next() : rng.next() & ((std::uint64_t(1) << n) - 1)};
  DihpInstance inst{n, m, {}, true, x};
  for (std::size_t i = 0; i < K; ++i) inst.players.push_back(label_by(x, sample_matching(ground, m, rng)));
  return inst;
}

inline void require_standard(const OmegaSubset& A) {
  if (!A.space()->space().ground().is_standard()) throw std::domain_error("expected ground set 1..n");
  if (A.space()->space().n() > 30) throw std::domain_error("cube enumeration limited to n <= 30");
}

// Pr[x | A] = (1/|A|) sum_{y in A} 1{x in L(y)} / |L(y)|
inline Rational conditional_probability(const OmegaSubset& A, const Bipartition& x) {
  require_standard(A);
  if (A.empty()) throw std::domain_error("conditional probability of an empty set");
  const auto& sp = A.space()->space();
  std::size_t hits = 0;
  for (auto i : A.indices()) hits += subspace_membership(x, A.space()->at(i));
  return Rational(BigInt(hits), BigInt(A.size()) * pow2(unsigned(sp.n() - sp.m())));
}

// hit counts c(x) = #{y in A : x in L(y)} for every x
inline std::vector<std::uint32_t> subspace_hits(const OmegaSubset& A) {
  require_standard(A);
  const std::size_t n = A.space()->space().n();
  std::vector<std::uint32_t> c(std::size_t(1) << n, 0);
  for (auto i : A.indices()) {
    const auto& y = A.space()->at(i);
    for (std::uint64_t b = 0; b < c.size(); ++b) c[b] += subspace_membership(Bipartition{n, b}, y);
  }
  return c;
}

inline std::vector<Rational> conditional_distribution(const OmegaSubset& A) {
  auto c = subspace_hits(A);
  const auto& sp = A.space()->space();
  BigInt den = BigInt(A.size()) * pow2(unsigned(sp.n() - sp.m()));
  std::vector<Rational> p;
  p.reserve(c.size());
  for (auto h : c) p.emplace_back(BigInt(h), den);
  return p;
}

using Decision = std::function<bool(const std::vector<LabeledMatching>&)>;

struct ExactAdvantage {
  Rational p_yes, p_no;
  Rational advantage() const { return p_yes >= p_no ? p_yes - p_no : p_no - p_yes; }
};

// both distributions enumerated exactly
inline ExactAdvantage advantage_exact(const Decision& decide, std::size_t n, std::size_t m, std::size_t K,
                                      std::size_t cap = kDefaultCap) {
  auto space = MatchingSpace::standard(n, m);
  BigInt no_count = 1, yes_count = pow2(unsigned(n));
  for (std::size_t i = 0; i < K; ++i) {
    no_count *= space.size();
    yes_count *= space.matchings();
  }
  check_cap(no_count, cap, "no-distribution enumeration");
  check_cap(yes_count, cap, "yes-distribution enumeration");
  auto omega = enumerate_space(space, cap);
  auto mats = enumerate_matchings(space.ground(), m, cap);

  std::vector<std::size_t> idx(K, 0);
  std::vector<LabeledMatching> tuple(K);
  auto odometer = [&](std::size_t base) {
    for (std::size_t i = 0; i < K; ++i) {
      if (++idx[i] < base) return true;
      idx[i] = 0;
    }
    return false;
  };

  BigInt no_hits = 0;
  std::fill(idx.begin(), idx.end(), 0);
  do {
    for (std::size_t i = 0; i < K; ++i) tuple[i] = omega[idx[i]];
    no_hits += decide(tuple);
  } while (odometer(omega.size()));

  BigInt yes_hits = 0;
  for (std::uint64_t b = 0; b < (std::uint64_t(1) << n); ++b) {
    Bipartition x{n, b};
    std::vector<LabeledMatching> labeled(mats.size());
    for (std::size_t j = 0; j < mats.size(); ++j) labeled[j] = label_by(x, mats[j]);
    std::fill(idx.begin(), idx.end(), 0);
    do {
      for (std::size_t i = 0; i < K; ++i) tuple[i] = labeled[idx[i]];
      yes_hits += decide(tuple);
    } while (odometer(mats.size()));
  }
  return {Rational(yes_hits, yes_count), Rational(no_hits, no_count)};
}

struct MonteCarloAdvantage {
  double estimate = 0;  // Pr_yes - Pr_no
  double std_error = 0;
  std::size_t trials = 0;
};

// paired sampling: each trial shares its matchings between the yes and no draw
inline MonteCarloAdvantage advantage_monte_carlo(const Decision& decide, std::size_t n, std::size_t m, std::size_t K,
                                                 std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  auto ground = GroundSet::range(n);
  double sum = 0, sum2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = Rng::derive(seed, t);
    Bipartition x{n, rng.next() & (n == 64 ? ~0ULL : ((std::uint64_t(1) << n) - 1))};
    std::vector<LabeledMatching> yes(K), no(K);
    for (std::size_t i = 0; i < K; ++i) {
      Matching M = sample_matching(ground, m, rng);
      yes[i] = label_by(x, M);
      std::vector<int> s(M.size());
      for (auto& v : s) v = rng.coin() ? -1 : 1;
      no[i] = LabeledMatching(M, s);
    }
    double d = double(decide(yes)) - double(decide(no));
    sum += d;
    sum2 += d * d;
  }
  double mean = sum / trials;
  double var = trials > 1 ? (sum2 - trials * mean * mean) / (trials - 1) : 0.0;
  return {mean, std::sqrt(std::max(var, 0.0) / trials), trials};
}

}  // namespace dihp
