#pragma once

#include "distributions.hpp"
#include "fourier_omega.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace dihp {

inline constexpr std::size_t kMaxCubeDim = 24;

// V^{B,b} = {x : x_i + b_i constant on each block}; blocks ordered by minimum vertex
struct PartitionSubspace {
  std::size_t n = 0;
  std::vector<std::vector<Vertex>> blocks;
  std::vector<int> b;  // b[v-1]

  std::size_t k() const { return blocks.size(); }

  static PartitionSubspace cube(std::size_t n) {
    PartitionSubspace V{n, {}, std::vector<int>(n, 0)};
    for (std::size_t v = 1; v <= n; ++v) V.blocks.push_back({Vertex(v)});
    return V;
  }

  void validate() const {
    std::vector<int> seen(n, 0);
    for (const auto& B : blocks) {
      if (B.empty()) throw std::domain_error("empty block");
      for (Vertex v : B) {
        if (v < 1 || std::size_t(v) > n || seen[v - 1]++) throw std::domain_error("blocks must partition 1..n");
      }
    }
    if (std::count(seen.begin(), seen.end(), 1) != std::ptrdiff_t(n)) throw std::domain_error("blocks must cover 1..n");
    if (b.size() != n) throw std::domain_error("base string has wrong length");
  }

  bool contains(std::uint64_t x) const {
    for (const auto& B : blocks) {
      int c = int((x >> (B[0] - 1)) & 1) ^ b[B[0] - 1];
      for (Vertex v : B)
        if ((int((x >> (v - 1)) & 1) ^ b[v - 1]) != c) return false;
    }
    return true;
  }

  // x -> z with z_l = x_i + b_i for i in B_l
  std::uint64_t identify(std::uint64_t x) const {
    if (!contains(x)) throw std::domain_error("point is not in the subspace");
    std::uint64_t z = 0;
    for (std::size_t l = 0; l < blocks.size(); ++l) {
      Vertex v = blocks[l][0];
      if ((((x >> (v - 1)) & 1) ^ std::uint64_t(b[v - 1])) != 0) z |= std::uint64_t(1) << l;
    }
    return z;
  }

  std::uint64_t embed(std::uint64_t z) const {
    std::uint64_t x = 0;
    for (std::size_t l = 0; l < blocks.size(); ++l) {
      std::uint64_t zl = (z >> l) & 1;
      for (Vertex v : blocks[l])
        if (zl ^ std::uint64_t(b[v - 1])) x |= std::uint64_t(1) << (v - 1);
    }
    return x;
  }

  std::vector<std::uint64_t> members() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t z = 0; z < (std::uint64_t(1) << k()); ++z) out.push_back(embed(z));
    std::sort(out.begin(), out.end());
    return out;
  }

  // B refines this partition when each block here is a union of blocks of B
  bool coarsens(const PartitionSubspace& fine) const {
    if (fine.n != n) return false;
    std::vector<std::size_t> owner(n);
    for (std::size_t l = 0; l < blocks.size(); ++l)
      for (Vertex v : blocks[l]) owner[v - 1] = l;
    for (const auto& B : fine.blocks)
      for (Vertex v : B)
        if (owner[v - 1] != owner[B[0] - 1]) return false;
    return true;
  }
};

class CycleError : public std::domain_error {
 public:
  CycleError(std::vector<LabeledEdge> cycle)
      : std::domain_error("constraint contains a cycle: " + describe(cycle)), cycle_(std::move(cycle)) {}
  const std::vector<LabeledEdge>& cycle() const { return cycle_; }

 private:
  static std::string describe(const std::vector<LabeledEdge>& c) {
    std::string s;
    for (const auto& le : c) s += (s.empty() ? "" : ",") + std::to_string(le.e.u) + "-" + std::to_string(le.e.v);
    return s;
  }
  std::vector<LabeledEdge> cycle_;
};

// blocks are the connected components of ([n], supp z); b is the path sum of
// label bits (1 - z_e)/2 from the component's smallest vertex
inline PartitionSubspace subspace_from_constraint(const std::vector<LabeledEdge>& z, std::size_t n) {
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> adj(n + 1);
  for (std::size_t j = 0; j < z.size(); ++j) {
    const auto& e = z[j].e;
    if (e.u < 1 || std::size_t(e.v) > n) throw std::domain_error("constraint edge outside 1..n");
    adj[e.u].push_back({e.v, j});
    adj[e.v].push_back({e.u, j});
  }
  PartitionSubspace V{n, {}, std::vector<int>(n, 0)};
  std::vector<int> seen(n + 1, 0);
  std::vector<Vertex> parent(n + 1, 0);
  std::vector<std::size_t> parent_edge(n + 1, 0);
  for (Vertex root = 1; std::size_t(root) <= n; ++root) {
    if (seen[root]) continue;
    std::vector<Vertex> block, stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      block.push_back(u);
      for (auto [w, j] : adj[u]) {
        if (j == parent_edge[u] && parent[u] != 0) continue;
        if (seen[w]) {
          // close the cycle: walk both endpoints up to their common ancestor
          std::vector<LabeledEdge> cyc{z[j]};
          std::vector<Vertex> pu{u}, pw{w};
          for (Vertex a = u; parent[a]; a = parent[a]) pu.push_back(parent[a]);
          for (Vertex a = w; parent[a]; a = parent[a]) pw.push_back(parent[a]);
          while (pu.size() > 1 && pw.size() > 1 && pu[pu.size() - 2] == pw[pw.size() - 2]) {
            pu.pop_back();
            pw.pop_back();
          }
          for (std::size_t t = 0; t + 1 < pu.size(); ++t) cyc.push_back(z[parent_edge[pu[t]]]);
          for (std::size_t t = 0; t + 1 < pw.size(); ++t) cyc.push_back(z[parent_edge[pw[t]]]);
          throw CycleError(cyc);
        }
        seen[w] = 1;
        parent[w] = u;
        parent_edge[w] = j;
        V.b[w - 1] = V.b[u - 1] ^ (z[j].s < 0 ? 1 : 0);
        stack.push_back(w);
      }
    }
    std::sort(block.begin(), block.end());
    V.blocks.push_back(block);
  }
  return V;
}

inline PartitionSubspace subspace_from_constraint(const LabeledMatching& z, std::size_t n) {
  return subspace_from_constraint(z.edges(), n);
}

// real function on V^{B,b}, indexed by the identified point z in F_2^k
struct CubeFunction {
  PartitionSubspace subspace;
  std::vector<double> values;

  std::size_t k() const { return subspace.k(); }

  static CubeFunction on_cube(std::size_t k, std::vector<double> v) {
    if (v.size() != (std::size_t(1) << k)) throw std::invalid_argument("value count must be 2^k");
    return {PartitionSubspace::cube(k), std::move(v)};
  }
};

inline void check_dim(std::size_t k) {
  if (k > kMaxCubeDim) throw CapacityError("dense cube transform", pow2(unsigned(k)));
}

// fhat(S) = 2^{-k} sum_z f(z) (-1)^{|S & z|}, butterfly form
inline std::vector<double> fourier(const std::vector<double>& f) {
  std::size_t N = f.size();
  if (!std::has_single_bit(N)) throw std::invalid_argument("length must be a power of two");
  check_dim(std::countr_zero(N));
  std::vector<double> a = f;
  for (std::size_t h = 1; h < N; h <<= 1)
    for (std::size_t i = 0; i < N; i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        double x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
  for (auto& x : a) x /= double(N);
  return a;
}

inline std::vector<double> fourier(const CubeFunction& f) { return fourier(f.values); }

inline std::vector<double> fourier_naive(const std::vector<double>& f) {
  std::size_t N = f.size();
  std::vector<double> c(N, 0.0);
  for (std::size_t S = 0; S < N; ++S) {
    double s = 0;
    for (std::size_t z = 0; z < N; ++z) s += std::popcount(S & z) % 2 ? -f[z] : f[z];
    c[S] = s / double(N);
  }
  return c;
}

inline std::vector<double> inverse_fourier(const std::vector<double>& c) {
  std::vector<double> f = fourier(c);
  for (auto& x : f) x *= double(c.size());
  return f;
}

// sum of fhat(S)^2 over |S| = d, for every d
inline std::vector<double> level_weights(const std::vector<double>& coeffs) {
  std::size_t k = std::countr_zero(coeffs.size());
  std::vector<double> w(k + 1, 0.0);
  for (std::size_t S = 0; S < coeffs.size(); ++S) w[std::popcount(S)] += coeffs[S] * coeffs[S];
  return w;
}

inline CubeFunction degree_part(const CubeFunction& f, std::size_t d) {
  auto c = fourier(f);
  for (std::size_t S = 0; S < c.size(); ++S)
    if (std::size_t(std::popcount(S)) != d) c[S] = 0;
  return {f.subspace, inverse_fourier(c)};
}

// F(n,d,w)
inline double envelope(double n, double d, double w) {
  if (d == 0) return 1.0;
  if (d <= w) return std::pow(w / n, d);
  return std::pow(d / (4.0 * n), d) * std::pow(2.0, 2.0 * w);
}

struct DecayRow {
  std::size_t d;  // level 2d
  double weight, bound;
  bool pass;
};

struct DecayReport {
  std::vector<DecayRow> rows;  // d = 0..k/2; row 0 is the constant term against delta
  double max_odd_weight = 0;
  std::optional<std::size_t> first_violation;  // even level 2d, or the first odd level if that fails first
  bool odd_ok = true;
  bool ok() const { return !first_violation && odd_ok; }
};

// (w, delta, c)-decaying: fhat(empty)^2 <= delta, odd levels vanish, ||f^{=2d}||^2 <= c^{-d} F(k,d,w)
inline DecayReport is_decaying(const std::vector<double>& coeffs, double w, double delta, double c,
                               double tol = 1e-12) {
  auto lw = level_weights(coeffs);
  const std::size_t k = lw.size() - 1;
  DecayReport rep;
  for (std::size_t l = 1; l <= k; l += 2) {
    rep.max_odd_weight = std::max(rep.max_odd_weight, lw[l]);
    if (lw[l] > tol) {
      rep.odd_ok = false;
      if (!rep.first_violation) rep.first_violation = l;
    }
  }
  for (std::size_t d = 0; 2 * d <= k; ++d) {
    double bound = d == 0 ? delta : std::pow(c, -double(d)) * envelope(double(k), double(d), w);
    bool pass = lw[2 * d] <= bound * (1 + 1e-12) + tol;
    rep.rows.push_back({d, lw[2 * d], bound, pass});
    if (!pass && (!rep.first_violation || *rep.first_violation > 2 * d)) rep.first_violation = 2 * d;
  }
  return rep;
}

inline double k_norm(const std::vector<double>& h, double K) {
  if (K < 1) throw std::domain_error("K-norm needs K >= 1");
  double s = 0;
  for (double x : h) s += std::pow(std::abs(x), K);
  return std::pow(s / double(h.size()), 1.0 / K);
}

inline double k_norm(const CubeFunction& h, double K) { return k_norm(h.values, K); }

// f(x) = 2^{|U|} Pr[x|A] - 1 on F_2^U
inline CubeFunction f_from_conditional(const OmegaSubset& A) {
  const auto& sp = A.space()->space();
  if (sp.n() > 20) throw CapacityError("conditional cube function", pow2(unsigned(sp.n())));
  if (A.empty()) throw std::domain_error("conditional function of an empty set");
  auto hits = subspace_hits(A);
  double scale = std::ldexp(1.0, int(sp.m())) / double(A.size());
  std::vector<double> v(hits.size());
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = scale * hits[x] - 1.0;
  return {PartitionSubspace::cube(sp.n()), std::move(v)};
}

struct BridgeCheck {
  double lhs, rhs;
};

// fhat(S) against (|Omega|/|A|) Psi(|U|,m,d)^{1/2} sum over perfect matchings M of S of <phi, chi_M>
inline BridgeCheck coefficient_bridge_check(const OmegaSubset& A, std::uint64_t S,
                                            const std::vector<double>& fhat,
                                            const std::map<Matching, double>& corr) {
  const auto& sp = A.space()->space();
  int s = std::popcount(S);
  if (s % 2) throw std::domain_error("bridge identity needs an even vertex set");
  std::vector<Vertex> vs;
  for (std::size_t i = 0; i < sp.n(); ++i)
    if ((S >> i) & 1) vs.push_back(Vertex(i + 1));
  double sum = 0;
  for (const auto& M : enumerate_matchings(GroundSet(vs), vs.size() / 2)) {
    auto it = corr.find(M);
    if (it != corr.end()) sum += it->second;
  }
  double rhs = to_double(Rational(sp.size(), BigInt(A.size()))) * std::sqrt(psi_d(sp.n(), sp.m(), vs.size() / 2)) * sum;
  return {fhat.at(S), rhs};
}

inline BridgeCheck coefficient_bridge_check(const OmegaSubset& A, std::uint64_t S) {
  auto fhat = fourier(f_from_conditional(A));
  auto corr = level_coefficients(OmegaFunction::indicator(A), std::popcount(S) / 2);
  return coefficient_bridge_check(A, S, fhat, corr);
}

// h(x) = 2^{n - |z'|} Pr[x|A] - 1 on L(z), z extending the base z' of A
inline CubeFunction h_from_conditional(const OmegaSubset& A, const std::vector<LabeledEdge>& z) {
  const auto& sp = A.space()->space();
  for (const auto& le : A.base().edges())
    if (std::find(z.begin(), z.end(), le) == z.end()) throw std::domain_error("constraint must extend the base of A");
  auto V = subspace_from_constraint(z, sp.n());
  auto hits = subspace_hits(A);
  double scale = std::ldexp(1.0, int(sp.m() - A.base().size())) / double(A.size());
  std::vector<double> v(std::size_t(1) << V.k());
  for (std::uint64_t t = 0; t < v.size(); ++t) v[t] = scale * hits[V.embed(t)] - 1.0;
  return {V, std::move(v)};
}

struct UnrefinementReport {
  double max_error = 0;
  bool disjoint = true;
  bool covering = true;
};

// h = g restricted to V^{B,b}; hhat(S) = sum over T in T(S) of ghat(T), where T(S) holds the T whose
// count of fine blocks inside B_l is odd exactly for l in S
inline UnrefinementReport unrefinement_check(const CubeFunction& g, const PartitionSubspace& coarse) {
  const auto& fine = g.subspace;
  if (!coarse.coarsens(fine)) throw std::domain_error("coarse partition is not a union of fine blocks");
  if (coarse.b != fine.b) throw std::domain_error("partitions must share the base string");
  const std::size_t kp = fine.k(), k = coarse.k();
  check_dim(kp);

  std::vector<double> hv(std::size_t(1) << k);
  for (std::uint64_t t = 0; t < hv.size(); ++t) hv[t] = g.values[fine.identify(coarse.embed(t))];
  auto hhat = fourier(hv);
  auto ghat = fourier(g.values);

  std::vector<std::size_t> owner(kp);
  for (std::size_t j = 0; j < kp; ++j) {
    Vertex v = fine.blocks[j][0];
    for (std::size_t l = 0; l < k; ++l)
      if (std::find(coarse.blocks[l].begin(), coarse.blocks[l].end(), v) != coarse.blocks[l].end()) owner[j] = l;
  }

  UnrefinementReport rep;
  std::vector<int> claimed(std::size_t(1) << kp, 0);
  for (std::uint64_t S = 0; S < hv.size(); ++S) {
    double sum = 0;
    for (std::uint64_t T = 0; T < claimed.size(); ++T) {
      bool in = true;
      for (std::size_t l = 0; l < k && in; ++l) {
        int cnt = 0;
        for (std::size_t j = 0; j < kp; ++j) cnt += ((T >> j) & 1) && owner[j] == l;
        in = (cnt % 2 == 1) == bool((S >> l) & 1);
      }
      if (!in) continue;
      if (claimed[T]++) rep.disjoint = false;
      sum += ghat[T];
    }
    rep.max_error = std::max(rep.max_error, std::abs(sum - hhat[S]));
  }
  rep.covering = std::all_of(claimed.begin(), claimed.end(), [](int c) { return c == 1; });
  return rep;
}

// coefficient dump rows: level, S as sorted ids, value
inline std::string coefficient_csv(const std::vector<double>& coeffs, double threshold = 0.0) {
  std::string out = "level,S,coefficient\n";
  for (std::size_t S = 0; S < coeffs.size(); ++S) {
    if (std::abs(coeffs[S]) <= threshold) continue;
    std::string ids;
    for (std::size_t i = 0; (S >> i) != 0; ++i)
      if ((S >> i) & 1) ids += (ids.empty() ? "" : " ") + std::to_string(i + 1);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", coeffs[S]);
    out += std::to_string(std::popcount(S)) + "," + ids + "," + buf + "\n";
  }
  return out;
}

}  // namespace dihp
