#pragma once

#include "omega_subset.hpp"

#include <json.hpp>

#include <map>

namespace dihp {

namespace detail {

// |A cap Omega_z| for every z extending base(A) that some member agrees with;
// every other z meets A in the empty set
inline std::map<Restriction, std::size_t> restriction_counts(const OmegaSubset& A) {
  std::map<Restriction, std::size_t> counts;
  const auto& base = A.base();
  for (auto i : A.indices()) {
    const auto& y = A.space()->at(i);
    std::vector<LabeledEdge> fresh;
    for (const auto& le : y.edges())
      if (base.label(le.e) == 0) fresh.push_back(le);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << fresh.size()); ++mask) {
      auto es = base.edges();
      for (std::size_t j = 0; j < fresh.size(); ++j)
        if ((mask >> j) & 1) es.push_back(fresh[j]);
      ++counts[Restriction(std::move(es))];
    }
  }
  return counts;
}

}  // namespace detail

struct GlobalityCheck {
  bool global = true;
  std::optional<Restriction> witness;  // largest violating restriction, canonical-first on ties
  std::size_t violations = 0;
};

// A is z'-global when |A cap Omega_z|/|Omega_z| <= 2^{|z|-|z'|} |A|/|Omega_z'| for all z extending z'
inline GlobalityCheck is_global(const OmegaSubset& A) {
  if (A.empty()) throw std::domain_error("globalness of an empty set");
  const auto& sp = A.space()->space();
  const BigInt omega_base = A.base_size();
  const BigInt a = A.size();
  GlobalityCheck out;
  for (const auto& [z, cnt] : detail::restriction_counts(A)) {
    unsigned extra = unsigned(z.size() - A.base().size());
    if (BigInt(cnt) * omega_base > pow2(extra) * a * sp.restricted_size(z)) {
      ++out.violations;
      if (!out.witness || z.size() > out.witness->size()) out.witness = z;
    }
  }
  out.global = out.violations == 0;
  return out;
}

struct Piece {
  OmegaSubset set;          // base() is the piece's restriction
  Rational density_ratio;   // (|piece|/|Omega_z|) / (|remaining|/|Omega_z'|) when extracted
};

inline Bitset agreeing_members(const SpacePtr& space, const Restriction& z) {
  Bitset b(space->size());
  for (std::size_t i = 0; i < space->size(); ++i)
    if (agrees(space->at(i), z)) b.set(i);
  return b;
}

// repeatedly peel off the densest-possible restriction until the rest is global
inline std::vector<Piece> decompose(const OmegaSubset& A) {
  if (A.empty()) throw std::domain_error("decomposition of an empty set");
  const auto& sp = A.space()->space();
  const Restriction& zp = A.base();
  const BigInt omega_zp = A.base_size();
  std::vector<Piece> pieces;
  Bitset rest = A.members();
  while (rest.any()) {
    OmegaSubset cur(A.space(), zp, rest);
    auto chk = is_global(cur);
    if (chk.global) break;
    const Restriction& z = *chk.witness;
    Bitset piece = rest & agreeing_members(A.space(), z);
    Rational ratio = Rational(BigInt(piece.count()), sp.restricted_size(z)) / Rational(BigInt(cur.size()), omega_zp);
    if (!(ratio > Rational(pow2(unsigned(z.size() - zp.size())))))
      throw std::logic_error("extracted piece does not exceed the density threshold");
    pieces.push_back({OmegaSubset(A.space(), z, piece), ratio});
    rest -= piece;
  }
  if (rest.any()) pieces.push_back({OmegaSubset(A.space(), zp, rest), Rational(1)});
  return pieces;
}

// |supp z| + log2(|Omega_z| / |A|)
inline double set_potential(const OmegaSubset& A) {
  if (A.empty()) throw std::domain_error("potential of an empty set");
  return double(A.base().size()) + log2_ratio(A.base_size(), BigInt(A.size()));
}

struct PotentialBound {
  double lhs = 0, rhs = 0;
  bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
};

// weighted piece potential against |z'| + log2(|Omega_z'|/|A|) + 2
inline PotentialBound decomposition_bound(const OmegaSubset& A, const std::vector<Piece>& pieces) {
  PotentialBound b;
  for (const auto& p : pieces) b.lhs += double(p.set.size()) / double(A.size()) * set_potential(p.set);
  b.rhs = set_potential(A) + 2.0;
  return b;
}

inline nlohmann::json piece_record(const Piece& p) {
  return {{"restriction", p.set.base().str()},
          {"size", p.set.size()},
          {"density_ratio", to_double(p.density_ratio)},
          {"density_ratio_exact", p.density_ratio.str()}};
}

inline std::string decomposition_jsonl(const std::vector<Piece>& pieces) {
  std::string out;
  for (const auto& p : pieces) out += piece_record(p).dump() + "\n";
  return out;
}

using RestrictionTuple = std::vector<Restriction>;

inline std::size_t tuple_size(const RestrictionTuple& zeta) {
  std::size_t s = 0;
  for (const auto& z : zeta) s += z.size();
  return s;
}

// product set A^(1) x ... x A^(K); factor i lives in Omega_{zeta_i}
struct Rectangle {
  std::vector<OmegaSubset> factors;

  std::size_t K() const { return factors.size(); }
  bool empty() const {
    return std::any_of(factors.begin(), factors.end(), [](const auto& f) { return f.empty(); });
  }
  RestrictionTuple restrictions() const {
    RestrictionTuple z;
    for (const auto& f : factors) z.push_back(f.base());
    return z;
  }
  bool contains(const std::vector<LabeledMatching>& ys) const {
    if (ys.size() != factors.size()) return false;
    for (std::size_t i = 0; i < ys.size(); ++i)
      if (!factors[i].contains(ys[i])) return false;
    return true;
  }
  // every factor contained in the corresponding factor of `outer`
  bool inside(const Rectangle& outer) const {
    for (std::size_t i = 0; i < factors.size(); ++i)
      if (!factors[i].members().is_subset_of(outer.factors[i].members())) return false;
    return true;
  }
};

inline double potential(const Rectangle& R) {
  double p = 0;
  for (const auto& f : R.factors) p += set_potential(f);
  return p;
}

inline bool rectangle_is_global(const Rectangle& R) {
  return std::all_of(R.factors.begin(), R.factors.end(), [](const auto& f) { return is_global(f).global; });
}

}  // namespace dihp
