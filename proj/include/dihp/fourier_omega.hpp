#pragma once

#include "omega_subset.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <map>

namespace dihp {

// probability that a fixed d-matching lies inside a uniform m-matching on n vertices
inline Rational psi(std::size_t n, std::size_t m, std::size_t d) {
  Rational r = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (m < k + 1 || n < 2 * k + 2) return 0;
    r *= Rational(BigInt(m - k), binomial(unsigned(n - 2 * k), 2));
  }
  return r;
}

inline double psi_d(std::size_t n, std::size_t m, std::size_t d) { return to_double(psi(n, m, d)); }

class OmegaFunction {
 public:
  OmegaFunction(SpacePtr space, std::vector<double> values) : space_(std::move(space)), v_(std::move(values)) {
    if (v_.size() != space_->size()) throw std::invalid_argument("value count does not match space");
  }
  explicit OmegaFunction(SpacePtr space) : space_(space), v_(space->size(), 0.0) {}

  static OmegaFunction indicator(const OmegaSubset& A) {
    OmegaFunction f(A.space());
    for (auto i : A.indices()) f.v_[i] = 1.0;
    return f;
  }

  static OmegaFunction random(SpacePtr space, Rng& rng) {
    OmegaFunction f(space);
    for (auto& x : f.v_) x = rng.uniform(-1.0, 1.0);
    return f;
  }

  template <class F>
  static OmegaFunction from(SpacePtr space, F fn) {
    OmegaFunction f(space);
    for (std::size_t i = 0; i < space->size(); ++i) f.v_[i] = fn(space->at(i));
    return f;
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  const std::vector<double>& values() const { return v_; }

  double at(const LabeledMatching& y) const { return v_[space_->index_of(y)]; }

  OmegaFunction& operator+=(const OmegaFunction& g) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += g.v_[i];
    return *this;
  }
  OmegaFunction& operator*=(double c) {
    for (auto& x : v_) x *= c;
    return *this;
  }
  friend OmegaFunction operator-(OmegaFunction a, const OmegaFunction& b) {
    for (std::size_t i = 0; i < a.v_.size(); ++i) a.v_[i] -= b.v_[i];
    return a;
  }

  double max_abs() const {
    double m = 0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  SpacePtr space_;
  std::vector<double> v_;
};

inline double inner(const OmegaFunction& f, const OmegaFunction& g) {
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s / double(f.size());
}

inline double norm(const OmegaFunction& f, double p) {
  if (std::isinf(p)) return f.max_abs();
  double s = 0;
  for (double x : f.values()) s += std::pow(std::abs(x), p);
  return std::pow(s / double(f.size()), 1.0 / p);
}

// chi_S(y) = Psi(|U|,m,|S|)^{-1/2} prod_{e in S} y_e, zero when S is not inside supp(y)
inline OmegaFunction character(const SpacePtr& space, const Matching& S) {
  const auto& sp = space->space();
  if (!is_matching(S)) throw std::domain_error("character index must be a matching");
  if (S.size() > sp.m()) throw std::domain_error("character level exceeds m");
  double scale = 1.0 / std::sqrt(psi_d(sp.n(), sp.m(), S.size()));
  return OmegaFunction::from(space, [&](const LabeledMatching& y) { return scale * y.monomial(S); });
}

// all d-subsets of the edges of y
inline void for_each_submatching(const Matching& M, std::size_t d, const std::function<void(const Matching&)>& fn) {
  Matching cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (cur.size() == d) {
      fn(cur);
      return;
    }
    for (std::size_t j = from; j + (d - cur.size()) <= M.size(); ++j) {
      cur.push_back(M[j]);
      self(self, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

// <f, chi_S> for every d-matching S with a nonzero coefficient
inline std::map<Matching, double> level_coefficients(const OmegaFunction& f, std::size_t d) {
  const auto& sp = f.space()->space();
  std::map<Matching, double> c;
  if (d > sp.m()) return c;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& y = f.space()->at(i);
    auto M = y.support();
    for_each_submatching(M, d, [&](const Matching& S) { c[S] += f[i] * y.monomial(S); });
  }
  double scale = 1.0 / (std::sqrt(psi_d(sp.n(), sp.m(), d)) * double(f.size()));
  for (auto& [S, v] : c) v *= scale;
  return c;
}

inline double coefficient(const OmegaFunction& f, const Matching& S) { return inner(f, character(f.space(), S)); }

// P^{=d} f = sum_{|S|=d} <f, chi_S> chi_S
inline OmegaFunction project_level(const OmegaFunction& f, std::size_t d) {
  const auto& sp = f.space()->space();
  OmegaFunction g(f.space());
  if (d > sp.m()) return g;
  auto c = level_coefficients(f, d);
  double scale = 1.0 / std::sqrt(psi_d(sp.n(), sp.m(), d));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& y = f.space()->at(i);
    double s = 0;
    for_each_submatching(y.support(), d, [&](const Matching& S) {
      auto it = c.find(S);
      if (it != c.end()) s += it->second * y.monomial(S);
    });
    g[i] = scale * s;
  }
  return g;
}

// D_S f(y) = E_z[z^S f(i(y,z))] on Omega^{U \ N(S), m - |S|}
inline OmegaFunction derivative(const OmegaFunction& f, const Matching& S) {
  const auto& sp = f.space()->space();
  if (!is_matching(S) || S.size() > sp.m()) throw std::domain_error("derivative index must be a matching of size <= m");
  for (const auto& e : S)
    if (!sp.ground().contains(e.u) || !sp.ground().contains(e.v)) throw std::domain_error("derivative edge outside U");
  auto sub = IndexedSpace::make(MatchingSpace(sp.ground().without(matching_vertices(S)), sp.m() - S.size()));
  OmegaFunction g(sub);
  const std::size_t k = S.size();
  std::vector<LabeledMatching> zs;
  std::vector<int> sgn;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
    zs.emplace_back(S, sign_vector(k, mask));
    sgn.push_back(std::popcount(mask) % 2 ? -1 : 1);
  }
  for (std::size_t i = 0; i < sub->size(); ++i) {
    double s = 0;
    for (std::size_t t = 0; t < zs.size(); ++t) s += sgn[t] * f.at(sub->at(i).merged(zs[t]));
    g[i] = s / double(zs.size());
  }
  return g;
}

// all matchings of size <= d on the ground set of f
inline std::vector<Matching> matchings_up_to(const GroundSet& U, std::size_t d) {
  std::vector<Matching> out;
  for (std::size_t s = 0; s <= d && 2 * s <= U.size(); ++s)
    for (auto& M : enumerate_matchings(U, s)) out.push_back(std::move(M));
  return out;
}

struct DerivativeGlobalness {
  bool global = true;
  double worst_ratio = 0;  // max ||D_S f||_p / (r^{|S|} lambda)
  Matching witness;
};

// ||D_S f||_p <= r^{|S|} lambda for every S with |S| <= d
inline DerivativeGlobalness derivative_globalness(const OmegaFunction& f, double r, double lambda, std::size_t d,
                                                  double p, double tol = 1e-12) {
  DerivativeGlobalness out;
  const auto& sp = f.space()->space();
  for (const auto& S : matchings_up_to(sp.ground(), std::min(d, sp.m()))) {
    double lhs = norm(S.empty() ? f : derivative(f, S), p);
    double rhs = std::pow(r, double(S.size())) * lambda;
    double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? INFINITY : 0.0);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.witness = S;
    }
    if (lhs > rhs * (1 + tol) + tol) out.global = false;
  }
  return out;
}

struct ReportRow {
  std::size_t n = 0, m = 0, d = 0;
  double q = 0;
  double lhs = 0, rhs = 0;
  bool preconditions_met = false;
  double ratio() const { return rhs != 0 ? lhs / rhs : (lhs == 0 ? 0.0 : INFINITY); }
  bool holds(double tol = 1e-9) const { return lhs <= rhs * (1 + tol); }
};

inline bool size_preconditions(std::size_t n, std::size_t m, std::size_t d) { return n >= 10 * m && m >= 10 * (d + 1); }

struct ApproxProductRow {
  std::size_t s;
  bool lower_ok, upper_ok;  // lower only applies for s <= d
};

// with p = Psi(n,m,d)^{1/d}: p^s <= Psi(n,m,s) <= (2p)^s for s <= d, Psi(n,m,s) <= p^s for s >= d.
// Both sides are raised to the d-th power so the comparison stays exact.
inline std::vector<ApproxProductRow> approximate_product_report(std::size_t n, std::size_t m, std::size_t d) {
  if (d == 0) throw std::domain_error("approximate product needs d >= 1");
  std::vector<ApproxProductRow> rows;
  Rational pd = psi(n, m, d);
  for (std::size_t s = 1; s <= m; ++s) {
    Rational ps = psi(n, m, s);
    Rational lhs = rpow(ps, unsigned(d));
    Rational pds = rpow(pd, unsigned(s));
    ApproxProductRow row{s, true, true};
    if (s <= d) {
      row.lower_ok = pds <= lhs;
      row.upper_ok = lhs <= pds * Rational(pow2(unsigned(s * d)));
    } else {
      row.upper_ok = lhs <= pds;
    }
    rows.push_back(row);
  }
  return rows;
}

struct HyperParams {
  double rho, beta;
};

inline HyperParams hyper_params(double q, double r) {
  double rho = 1.0 / (4.0 * std::sqrt(2.0)) * std::min(1.0 / std::sqrt(q), 1.0 / q * std::pow(r, -(q - 1.0) / q));
  double beta = rho * std::sqrt(2.0 * q) * (1.0 + 4.0 * (q - 1.0) / std::log(1.0 / (rho * std::sqrt(2.0 * q))));
  return {rho, beta};
}

// ||f||_{2q}^{2q} against 2^d rho^{-2dq} ||f||_2^2 max_S (r^{-|S|} ||D_S f||_2)^{2q-2}; f at level d
inline ReportRow hypercontractivity_report(const OmegaFunction& f, std::size_t d, std::size_t q, double r) {
  const auto& sp = f.space()->space();
  ReportRow row{sp.n(), sp.m(), d, double(q)};
  row.lhs = std::pow(norm(f, 2.0 * q), 2.0 * q);
  double best = 0;
  for (const auto& S : matchings_up_to(sp.ground(), std::min(d, sp.m())))
    best = std::max(best, std::pow(r, -double(S.size())) * norm(S.empty() ? f : derivative(f, S), 2.0));
  auto hp = hyper_params(double(q), r);
  double n2 = std::pow(norm(f, 2.0), 2);
  row.rhs = std::pow(2.0, double(d)) * std::pow(hp.rho, -2.0 * d * q) * n2 * std::pow(best, 2.0 * q - 2.0);
  row.preconditions_met = size_preconditions(sp.n(), sp.m(), d);
  return row;
}

// same report for a single level-d character, evaluated in closed form so that
// spaces far beyond enumeration can be used
inline ReportRow hypercontractivity_character_report(std::size_t n, std::size_t m, std::size_t d, std::size_t q,
                                                     double r) {
  ReportRow row{n, m, d, double(q)};
  double pd = psi_d(n, m, d);
  row.lhs = std::pow(pd, 1.0 - double(q));
  double best = 0;
  for (std::size_t t = 0; t <= d; ++t) best = std::max(best, std::pow(r, -double(t)) / std::sqrt(psi_d(n, m, t)));
  auto hp = hyper_params(double(q), r);
  row.rhs = std::pow(2.0, double(d)) * std::pow(hp.rho, -2.0 * d * q) * std::pow(best, 2.0 * q - 2.0);
  row.preconditions_met = size_preconditions(n, m, d);
  return row;
}

// ||P^{=d} 1_A||^2 against lambda1^2 (1e5 r^2 log2(lambda2/lambda1) / d)^d, lambda_p = ||1_A||_p
inline ReportRow level_d_report(const OmegaSubset& A, std::size_t d, double r = 2.0) {
  const auto& sp = A.space()->space();
  auto phi = OmegaFunction::indicator(A);
  ReportRow row{sp.n(), sp.m(), d, 0.0};
  double l1 = norm(phi, 1.0), l2 = norm(phi, 2.0);
  row.lhs = std::pow(norm(project_level(phi, d), 2.0), 2);
  double L = l1 > 0 ? std::log2(l2 / l1) : 0.0;
  row.rhs = d == 0 ? l1 * l1 : l1 * l1 * std::pow(1e5 * r * r * L / double(d), double(d));
  row.preconditions_met = size_preconditions(sp.n(), sp.m(), d) && r >= 1.0 && double(d) <= L &&
                          derivative_globalness(phi, r, l1, d, 1.0).global &&
                          derivative_globalness(phi, r, l2, d, 2.0).global;
  return row;
}

}  // namespace dihp
