#pragma once

#include "fourier_cube.hpp"
#include "fourier_omega.hpp"
#include "globalness.hpp"
#include "protocol.hpp"
#include "streaming.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

namespace dihp {

// rows of JSON scalars, rendered as CSV (header first) or JSON lines
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match header");
    rows.push_back(std::move(row));
  }

  static std::string cell(const nlohmann::json& v) {
    if (v.is_number_float()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
      return buf;
    }
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    return v.dump();
  }

  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell(r[i]);
      out += "\n";
    }
    return out;
  }

  std::string jsonl() const {
    std::string out;
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < r.size(); ++i) o[columns[i]] = r[i];
      out += o.dump() + "\n";
    }
    return out;
  }

  std::string render(const std::string& format) const {
    if (format == "csv") return csv();
    if (format == "jsonl") return jsonl();
    throw std::invalid_argument("unknown format '" + format + "'");
  }
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

struct Config {
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string format = "csv";
  std::size_t cap = kDefaultCap;
  std::size_t n = 6, m = 2, K = 2;
  std::size_t trials = 200;
  std::size_t depth = 3;
  std::size_t trees = 10;
  std::size_t d = 2, q = 2;
  double r = 2.0;
  double density = 0.5;
  double tol = 1e-9;
  std::string convention = "crossing";
};

inline Config config_from_json(const nlohmann::json& j, Config c = {}) {
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
  };
  get("seed", c.seed);
  get("out", c.out);
  get("format", c.format);
  get("cap", c.cap);
  get("n", c.n);
  get("m", c.m);
  get("K", c.K);
  get("trials", c.trials);
  get("depth", c.depth);
  get("trees", c.trees);
  get("d", c.d);
  get("q", c.q);
  get("r", c.r);
  get("density", c.density);
  get("tol", c.tol);
  get("convention", c.convention);
  return c;
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Check {
  std::string name;
  std::string kind;  // "exact", "float" or "report"
  bool pass = true;
  std::string detail;
  std::optional<double> lhs, rhs, tol;

  std::string status() const { return kind == "report" ? "report" : pass ? "pass" : "fail"; }
};

struct RunReport {
  std::vector<Check> checks;

  Check& add(std::string name, std::string kind, bool pass, std::string detail = "") {
    checks.push_back({std::move(name), std::move(kind), pass, std::move(detail), {}, {}, {}});
    return checks.back();
  }
  // float check: error against tolerance
  Check& add_float(std::string name, double err, double tol) {
    auto& c = add(std::move(name), "float", err <= tol, "max error " + fmt(err));
    c.lhs = err;
    c.rhs = tol;
    c.tol = tol;
    return c;
  }
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || c.kind == "report"; });
  }
  std::size_t count(const std::string& status) const {
    return std::count_if(checks.begin(), checks.end(), [&](const Check& c) { return c.status() == status; });
  }
  Table table() const {
    Table t{{"check", "kind", "status", "lhs", "rhs", "tolerance", "detail"}, {}};
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(""); };
    for (const auto& c : checks) t.add({c.name, c.kind, c.status(), opt(c.lhs), opt(c.rhs), opt(c.tol), c.detail});
    return t;
  }
};


// random subset of the given size (the whole space when size exceeds it)
inline OmegaSubset random_subset(const SpacePtr& space, std::size_t size, Rng& rng, const Restriction& base = {}) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < space->size(); ++i)
    if (agrees(space->at(i), base)) pool.push_back(i);
  rng.shuffle(pool);
  Bitset b(space->size());
  for (std::size_t i = 0; i < std::min(size, pool.size()); ++i) b.set(pool[i]);
  return OmegaSubset(space, base, b);
}

inline OmegaSubset random_subset_density(const SpacePtr& space, double density, Rng& rng) {
  auto size = std::size_t(std::llround(density * double(space->size())));
  return random_subset(space, std::max<std::size_t>(size, 1), rng);
}

inline Rectangle random_rectangle(const SpacePtr& space, std::size_t K, Rng& rng) {
  Rectangle R;
  for (std::size_t i = 0; i < K; ++i) R.factors.push_back(random_subset(space, 1 + rng.below(space->size()), rng));
  return R;
}

// ---------------------------------------------------------------------------
// experiments

inline Table gap_table(const std::vector<GapRow>& rows) {
  Table t{{"trial", "label", "edges", "maxcut", "ratio"}, {}};
  for (const auto& r : rows) t.add({r.trial, r.yes ? "yes" : "no", r.edges, r.maxcut, r.ratio});
  return t;
}

inline Table decay_table(const DecayReport& rep) {
  Table t{{"d", "weight", "envelope", "pass"}, {}};
  for (const auto& r : rep.rows) t.add({r.d, r.weight, r.bound, r.pass});
  return t;
}

inline Table report_table(const std::vector<ReportRow>& rows) {
  Table t{{"n", "m", "d", "q", "lhs", "rhs", "ratio", "preconditions_met"}, {}};
  for (const auto& r : rows) t.add({r.n, r.m, r.d, r.q, r.lhs, r.rhs, r.ratio(), r.preconditions_met});
  return t;
}

struct DecayExperiment {
  DecayReport report;
  double w;  // log2 (|Omega| / |A|)
  bool global;
};

// global-decay relation for a random set: f from the conditional distribution
// measured against (w/2, 0, 2)-decay
inline DecayExperiment decay_experiment(std::size_t n, std::size_t m, double density, std::uint64_t seed,
                                        std::size_t cap = kDefaultCap) {
  auto space = IndexedSpace::make(MatchingSpace::standard(n, m), cap);
  Rng rng(seed);
  auto A = random_subset_density(space, density, rng);
  double w = log2_ratio(space->space().size(), BigInt(A.size()));
  auto f = f_from_conditional(A);
  return {is_decaying(fourier(f), w / 2.0, 0.0, 2.0), w, is_global(A).global};
}

// level-d rows for random sets, plus the closed-form character rows for hypercontractivity
inline std::vector<ReportRow> level_d_rows(std::size_t n, std::size_t m, double density, std::uint64_t seed,
                                           std::size_t cap = kDefaultCap) {
  auto space = IndexedSpace::make(MatchingSpace::standard(n, m), cap);
  Rng rng(seed);
  auto A = random_subset_density(space, density, rng);
  std::vector<ReportRow> rows;
  for (std::size_t d = 0; d <= m; ++d) rows.push_back(level_d_report(A, d));
  return rows;
}

inline std::vector<ReportRow> hyper_rows(std::size_t n, std::size_t m, std::size_t d, std::size_t q, double r,
                                         std::uint64_t seed, std::size_t cap = kDefaultCap) {
  std::vector<ReportRow> rows;
  auto space = IndexedSpace::make(MatchingSpace::standard(n, m), cap);
  Rng rng(seed);
  // random combination of level-d characters
  OmegaFunction f(space);
  auto mats = enumerate_matchings(space->space().ground(), d);
  for (const auto& S : mats) {
    auto chi = character(space, S);
    chi *= rng.uniform(-1.0, 1.0);
    f += chi;
  }
  for (std::size_t qq = 1; qq <= q; ++qq) rows.push_back(hypercontractivity_report(f, d, qq, r));
  // single characters at sizes far past enumeration, where the size preconditions hold
  for (auto [nn, mm, dd] : {std::tuple{200, 20, 1}, std::tuple{400, 30, 2}, std::tuple{1000, 50, 3}})
    for (std::size_t qq = 1; qq <= q; ++qq) rows.push_back(hypercontractivity_character_report(nn, mm, dd, qq, r));
  return rows;
}

struct KNormRow {
  std::size_t n, m, K;
  double lhs, rhs, gamma, eta;
};

// measured ||h||_K on L(z) for a random global set against the stated bound (report only)
inline std::vector<KNormRow> k_norm_rows(std::size_t n, std::size_t m, double density, std::uint64_t seed,
                                         std::size_t Kmax = 6, std::size_t cap = kDefaultCap) {
  auto space = IndexedSpace::make(MatchingSpace::standard(n, m), cap);
  Rng rng(seed);
  auto A = random_subset_density(space, density, rng);
  auto pieces = decompose(A);
  const auto& G = pieces.back().set;  // global piece
  auto z = G.base().edges();
  auto h = h_from_conditional(G, z);
  double n3 = std::cbrt(double(n));
  double gamma = double(z.size()) / n3;
  double eta = log2_ratio(G.base_size(), BigInt(G.size())) / n3;
  std::vector<KNormRow> rows;
  for (std::size_t K = 1; K <= Kmax; ++K)
    rows.push_back({n, m, K, k_norm(h, double(K)),
                    std::sqrt(4 * eta * gamma * gamma * K * K + 4 * eta + 2 * gamma), gamma, eta});
  return rows;
}

struct DiscrepancyRow {
  std::size_t tree;
  std::size_t depth, leaves;
  Rational adv, disc, refined_adv;
};

inline std::vector<DiscrepancyRow> discrepancy_scan(std::size_t n, std::size_t m, std::size_t K, std::size_t trees,
                                                    std::size_t depth, std::uint64_t seed,
                                                    std::size_t cap = kDefaultCap) {
  auto space = IndexedSpace::make(MatchingSpace::standard(n, m), cap);
  std::vector<DiscrepancyRow> rows;
  for (std::size_t t = 0; t < trees; ++t) {
    Rng rng = Rng::derive(seed, t);
    auto tree = random_tree(space, K, depth, rng);
    auto tr = refine(tree);
    rows.push_back({t, tree.depth(), tree.leaf_rectangles().size(), advantage(tree, cap).advantage(),
                    discrepancy_sum(tree), tr.advantage().advantage()});
  }
  return rows;
}

inline Table discrepancy_table(const std::vector<DiscrepancyRow>& rows) {
  Table t{{"tree", "depth", "leaves", "advantage", "discrepancy_bound", "refined_advantage"}, {}};
  for (const auto& r : rows)
    t.add({r.tree, r.depth, r.leaves, to_double(r.adv), to_double(r.disc), to_double(r.refined_adv)});
  return t;
}

// ---------------------------------------------------------------------------
// verification suite

inline RunReport verify_suite(const Config& c) {
  RunReport rep;
  const double tol = c.tol;
  auto space = IndexedSpace::make(MatchingSpace::standard(c.n, c.m), c.cap);
  const auto& sp = space->space();

  // counts
  {
    bool ok = true;
    for (std::size_t n = 2; n <= c.n; ++n)
      for (std::size_t m = 0; 2 * m <= n && m <= c.m; ++m)
        ok &= BigInt(enumerate_space(MatchingSpace::standard(n, m), c.cap).size()) ==
              count_matchings(n, m) * pow2(unsigned(m));
    rep.add("enumeration_counts", "exact", ok);
  }
  // psi against containment frequency
  {
    bool ok = true;
    for (std::size_t d = 0; d <= c.m; ++d) {
      auto mats = enumerate_matchings(sp.ground(), c.m, c.cap);
      Matching S = enumerate_matchings(sp.ground(), d).front();
      std::size_t hit = 0;
      for (const auto& M : mats) hit += std::includes(M.begin(), M.end(), S.begin(), S.end());
      ok &= Rational(BigInt(hit), BigInt(mats.size())) == psi(c.n, c.m, d);
    }
    rep.add("psi_containment", "exact", ok);
  }
  // orthonormality
  {
    auto mats = matchings_up_to(sp.ground(), c.m);
    std::vector<OmegaFunction> chis;
    for (const auto& S : mats) chis.push_back(character(space, S));
    double err = 0;
    for (std::size_t a = 0; a < chis.size(); ++a)
      for (std::size_t b = a; b < chis.size(); ++b)
        err = std::max(err, std::abs(inner(chis[a], chis[b]) - (a == b ? 1.0 : 0.0)));
    rep.add_float("orthonormality", err, tol);
  }
  // derivative composition and projection commutation
  {
    Rng rng = Rng::derive(c.seed, 1);
    auto f = OmegaFunction::random(space, rng);
    auto singles = enumerate_matchings(sp.ground(), 1);
    double err = 0;
    for (std::size_t t = 0; t < 10 && c.m >= 2; ++t) {
      Edge e1 = singles[rng.below(singles.size())][0], e2;
      do e2 = singles[rng.below(singles.size())][0];
      while (e2.shares_vertex(e1));
      Matching S{e1}, T{e2}, ST{std::min(e1, e2), std::max(e1, e2)};
      auto lhs = derivative(derivative(f, T), S), rhs = derivative(f, ST);
      err = std::max(err, (lhs - rhs).max_abs());
    }
    for (std::size_t t = 0; t < 5 && c.m >= 1; ++t) {
      Matching S = singles[rng.below(singles.size())];
      for (std::size_t d = 1; d <= c.m; ++d) {
        auto lhs = derivative(project_level(f, d), S), rhs = project_level(derivative(f, S), d - 1);
        err = std::max(err, (lhs - rhs).max_abs());
      }
    }
    rep.add_float("derivative_algebra", err, tol);
  }
  // yes-mass identity
  {
    Rng rng = Rng::derive(c.seed, 2);
    bool ok = true;
    for (std::size_t t = 0; t < 5; ++t) {
      auto R = random_rectangle(space, c.K, rng);
      auto cmp = yes_mass_formula(R, c.cap);
      ok &= cmp.formula == cmp.direct && cmp.direct == yes_mass(R);
    }
    rep.add("yes_mass_formula", "exact", ok);
  }
  // bad rectangle
  if (c.m >= 1 && c.K >= 2) {
    auto R = bad_rectangle(space, c.K, Edge(1, 2));
    Rational expect = rpow(psi(c.n, c.m, 1) / 2, unsigned(c.K));
    bool ok = yes_mass(R) == 0 && no_mass(R) == expect;
    rep.add("bad_rectangle", "exact", ok, "D_no = " + no_mass(R).str());
  }
  // decomposition
  {
    Rng rng = Rng::derive(c.seed, 3);
    bool exact_ok = true;
    double worst = -1e300;
    for (std::size_t t = 0; t < 10; ++t) {
      auto A = random_subset_density(space, t % 2 ? 0.5 : 0.25, rng);
      auto pieces = decompose(A);
      Bitset uni(space->size());
      std::size_t total = 0;
      for (const auto& p : pieces) {
        exact_ok &= !uni.intersects(p.set.members()) && is_global(p.set).global;
        uni |= p.set.members();
        total += p.set.size();
      }
      exact_ok &= uni == A.members() && total == A.size();
      auto b = decomposition_bound(A, pieces);
      worst = std::max(worst, b.lhs - b.rhs);
    }
    rep.add("decompose_partition", "exact", exact_ok);
    auto& ch = rep.add("decompose_potential", "float", worst <= tol, "max lhs - rhs " + fmt(worst));
    ch.lhs = worst;
    ch.rhs = 0;
    ch.tol = tol;
  }
  // refinement
  if (c.K >= 1) {
    Rng rng = Rng::derive(c.seed, 4);
    bool adv_ok = true, trace_ok = true;
    for (std::size_t t = 0; t < 3; ++t) {
      auto tree = random_tree(space, c.K, std::min<std::size_t>(c.depth, 2), rng);
      auto tr = refine(tree);
      adv_ok &= tr.advantage().advantage() >= advantage(tree, c.cap).advantage() && refines(tr, tree);
      trace_ok &= verify_global_trace(tr, tol).ok();
    }
    rep.add("refinement_advantage", "exact", adv_ok);
    rep.add("refinement_trace", "float", trace_ok);
  }
  // conditional bridge
  if (c.n <= 12) {
    Rng rng = Rng::derive(c.seed, 5);
    auto A = random_subset_density(space, c.density, rng);
    auto fhat = fourier(f_from_conditional(A));
    std::vector<std::map<Matching, double>> corr;
    auto phi = OmegaFunction::indicator(A);
    for (std::size_t d = 0; d <= c.m; ++d) corr.push_back(level_coefficients(phi, d));
    double err = std::abs(fhat[0]);
    for (std::uint64_t S = 1; S < fhat.size(); ++S) {
      int s = std::popcount(S);
      if (s % 2) {
        err = std::max(err, std::abs(fhat[S]));
        continue;
      }
      if (std::size_t(s / 2) > c.m) continue;
      auto b = coefficient_bridge_check(A, S, fhat, corr[s / 2]);
      err = std::max(err, std::abs(b.lhs - b.rhs));
    }
    rep.add_float("conditional_bridge", err, tol);
  }
  // unrefinement
  {
    Rng rng = Rng::derive(c.seed, 6);
    auto fine = PartitionSubspace::cube(6);
    for (auto& x : fine.b) x = rng.coin();
    auto coarse = fine;
    coarse.blocks = {{1, 2}, {3}, {4, 5, 6}};
    std::vector<double> g(std::size_t(1) << fine.k());
    for (auto& x : g) x = rng.uniform(-1, 1);
    auto u = unrefinement_check({fine, g}, coarse);
    rep.add_float("unrefinement", u.max_error, tol).pass &= u.disjoint && u.covering;
  }
  // streaming gap, small run
  {
    std::size_t n = std::min<std::size_t>(std::max<std::size_t>(c.n, 4), 16);
    std::size_t m = std::max<std::size_t>(1, std::min(c.m, n / 2));
    auto rows = gap_experiment(n, m, std::max<std::size_t>(c.K, 2), 20, c.seed,
                               StreamConvention::KeepCrossing);
    auto s = summarize_gap(rows);
    rep.add("gap_yes_fully_cut", "exact", s.yes_all_full);
    rep.add("gap_separation", "report", s.mean_no < 1.0, "yes " + fmt(s.mean_yes) + " no " + fmt(s.mean_no));
  }
  return rep;
}

}  // namespace dihp
