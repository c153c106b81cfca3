// One line per acceptance criterion; exit code is the number of failures.

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

using namespace dihp;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs <= budget_s;
  bool ok = o.pass && in_time;
  failures += !ok;
  std::printf("%s %2d %-28s %s [%.2fs / %.0fs%s]\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs, budget_s,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

SpacePtr space(std::size_t n, std::size_t m) { return IndexedSpace::make(MatchingSpace::standard(n, m)); }

std::string num(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = 20240601;
  std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(out);

  criterion(1, "enumeration counts", 5, [] {
    bool ok = true;
    int cases = 0;
    for (int n = 0; n <= 10; ++n)
      for (int m = 0; m <= 3 && 2 * m <= n; ++m) {
        auto ys = enumerate_space(MatchingSpace::standard(n, m));
        ok &= BigInt(ys.size()) == count_matchings(n, m) * pow2(m);
        ok &= BigInt(ys.size()) == oracle::count_rec(n, m) * pow2(m);
        ++cases;
      }
    return Outcome{ok, std::to_string(cases) + " (n,m) pairs exact"};
  });

  criterion(2, "psi oracle", 10, [] {
    bool ok = true;
    int cases = 0;
    for (int n = 0; n <= 10; ++n)
      for (int m = 0; m <= 4 && 2 * m <= n; ++m)
        for (int d = 0; d <= m; ++d) {
          ok &= psi(n, m, d) == oracle::psi_brute(n, m, d);
          ok &= psi(n, m, d) == oracle::psi_recursive(n, m, d);
          ++cases;
        }
    return Outcome{ok, std::to_string(cases) + " triples exact"};
  });

  criterion(3, "orthonormality", 30, [] {
    double err = 0;
    for (auto [n, m] : {std::pair{6, 2}, {8, 2}}) {
      auto sp = space(n, m);
      auto Ss = matchings_up_to(sp->space().ground(), m);
      std::vector<std::vector<double>> chi;
      for (const auto& S : Ss) chi.push_back(character(sp, S).values());
      for (std::size_t a = 0; a < chi.size(); ++a)
        for (std::size_t b = a; b < chi.size(); ++b)
          err = std::max(err, std::abs(oracle::mean_product(chi[a], chi[b]) - (a == b ? 1.0 : 0.0)));
      // library characters against oracle characters
      for (std::size_t a = 0; a < Ss.size(); ++a) {
        auto ref = oracle::character(sp, Ss[a]);
        for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - chi[a][i]));
      }
    }
    return Outcome{err <= 1e-12, "max error " + num(err)};
  });

  criterion(4, "derivative algebra", 60, [&] {
    auto sp = space(8, 3);
    auto singles = enumerate_matchings(sp->space().ground(), 1);
    auto pairs = enumerate_matchings(sp->space().ground(), 2);
    Rng rng = Rng::derive(seed, 4);
    double err = 0;
    for (int t = 0; t < 20; ++t) {
      auto f = OmegaFunction::random(sp, rng);
      // composition over disjoint S, T
      for (int k = 0; k < 3; ++k) {
        Matching ST = pairs[rng.below(pairs.size())];
        Matching S{ST[0]}, T{ST[1]};
        err = std::max(err, (derivative(derivative(f, S), T) - derivative(f, ST)).max_abs());
        err = std::max(err, (derivative(derivative(f, T), S) - derivative(f, ST)).max_abs());
      }
      // commutation with level projections
      Matching S = singles[rng.below(singles.size())];
      for (std::size_t d = 1; d <= 3; ++d)
        err = std::max(err, (derivative(project_level(f, d), S) - project_level(derivative(f, S), d - 1)).max_abs());
      Matching S2 = pairs[rng.below(pairs.size())];
      for (std::size_t d = 2; d <= 3; ++d)
        err = std::max(err, (derivative(project_level(f, d), S2) - project_level(derivative(f, S2), d - 2)).max_abs());
    }
    return Outcome{err <= 1e-12, "max error " + num(err)};
  });

  criterion(5, "yes-mass formula", 60, [&] {
    auto sp = space(4, 1);
    Rng rng = Rng::derive(seed, 5);
    bool ok = true;
    int cases = 0;
    for (std::size_t K : {2, 3})
      for (int t = 0; t < 100; ++t) {
        auto R = random_rectangle(sp, K, rng);
        auto cmp = yes_mass_formula(R);
        auto ref = oracle::yes_mass(R);
        ok &= cmp.formula == cmp.direct && cmp.direct == ref && yes_mass(R) == ref;
        ++cases;
      }
    return Outcome{ok, std::to_string(cases) + " rectangles, exact rational agreement"};
  });

  criterion(6, "bad rectangle", 5, [] {
    auto sp = space(4, 1);
    auto R = bad_rectangle(sp, 2, Edge(1, 2));
    Rational dy = yes_mass(R), dn = no_mass(R);
    bool ok = dy == 0 && oracle::yes_mass(R) == 0 && dn == Rational(1, 144) &&
              dn == rpow(oracle::psi_recursive(4, 1, 1) / 2, 2);
    return Outcome{ok, "D_yes = " + dy.str() + ", D_no = " + dn.str()};
  });

  criterion(7, "decompose", 120, [&] {
    auto sp = space(6, 2);
    Rng rng = Rng::derive(seed, 7);
    bool ok = true;
    double worst = -1e300;
    std::size_t pieces_total = 0;
    for (int t = 0; t < 100; ++t) {
      auto A = random_subset_density(sp, t % 2 ? 0.5 : 0.25, rng);
      auto pieces = decompose(A);
      Bitset uni(sp->size());
      for (const auto& p : pieces) {
        ok &= !uni.intersects(p.set.members());
        uni |= p.set.members();
        ok &= oracle::is_global(p.set) && subsumes(p.set.base(), A.base());
      }
      ok &= uni == A.members();
      auto b = decomposition_bound(A, pieces);
      worst = std::max(worst, b.lhs - b.rhs);
      pieces_total += pieces.size();
    }
    ok &= worst <= 1e-9;
    return Outcome{ok, std::to_string(pieces_total) + " pieces, max lhs-rhs " + num(worst)};
  });

  criterion(8, "refinement", 120, [&] {
    auto sp = space(4, 1);
    Rng rng = Rng::derive(seed, 8);
    bool ok = true;
    double worst_round = -1e300;
    int gained = 0;
    for (int t = 0; t < 50; ++t) {
      auto tree = random_tree(sp, 2, 3, rng);
      auto tr = refine(tree);
      auto a0 = advantage(tree).advantage(), a1 = tr.advantage().advantage();
      ok &= a1 >= a0 && refines(tr, tree);
      gained += a1 > a0;
      auto chk = verify_global_trace(tr);
      ok &= chk.ok();
      worst_round = std::max(worst_round, chk.max_round_increase);
      for (std::size_t d = 0; d < chk.mean_potential.size(); ++d) ok &= chk.mean_potential[d] <= 3.0 * d + 1e-9;
      // masses of the refined leaves must still cover everything
      Rational tot = 0;
      for (const auto& nd : tr.leaves()) tot += nd.mass_no;
      ok &= tot == 1;
    }
    ok &= worst_round <= 3.0 + 1e-9;
    return Outcome{ok, "max round growth " + num(worst_round) + ", strict gains " + std::to_string(gained) + "/50"};
  });

  criterion(9, "conditional bridge", 120, [&] {
    auto sp = space(8, 2);
    Rng rng = Rng::derive(seed, 9);
    double err = 0;
    for (int t = 0; t < 20; ++t) {
      auto A = random_subset(sp, 1 + rng.below(sp->size()), rng);
      auto fhat = fourier(f_from_conditional(A));
      auto ref = oracle::fourier(oracle::conditional_f(A));
      auto ind = OmegaFunction::indicator(A).values();
      double ratio = double(sp->size()) / double(A.size());
      err = std::max(err, std::abs(fhat[0]));
      for (std::uint64_t S = 0; S < fhat.size(); ++S) {
        err = std::max(err, std::abs(fhat[S] - ref[S]));
        int s = std::popcount(S);
        if (s % 2) {
          err = std::max(err, std::abs(fhat[S]));
          continue;
        }
        if (s == 0 || s > 4) continue;
        double sum = 0;
        for (const auto& M : oracle::perfect_matchings(S)) sum += oracle::mean_product(ind, oracle::character(sp, M));
        err = std::max(err, std::abs(fhat[S] - ratio * std::sqrt(psi_d(8, 2, s / 2)) * sum));
      }
    }
    return Outcome{err <= 1e-10, "max error " + num(err)};
  });

  criterion(10, "unrefinement", 30, [&] {
    Rng rng = Rng::derive(seed, 10);
    double err = 0;
    bool structure = true;
    for (int t = 0; t < 30; ++t) {
      std::size_t kp = 2 + rng.below(9);  // fine dimension 2..10
      auto fine = PartitionSubspace::cube(kp);
      for (auto& x : fine.b) x = rng.coin();
      // random coarsening: shuffle vertices, cut into contiguous runs
      std::vector<Vertex> vs(kp);
      std::iota(vs.begin(), vs.end(), 1);
      rng.shuffle(vs);
      auto coarse = fine;
      coarse.blocks.clear();
      for (std::size_t i = 0; i < kp;) {
        std::size_t len = 1 + rng.below(3);
        std::vector<Vertex> B(vs.begin() + i, vs.begin() + std::min(kp, i + len));
        std::sort(B.begin(), B.end());
        coarse.blocks.push_back(B);
        i += len;
      }
      std::sort(coarse.blocks.begin(), coarse.blocks.end());
      std::vector<double> g(std::size_t(1) << kp);
      for (auto& x : g) x = rng.uniform(-1, 1);
      auto rep = unrefinement_check({fine, g}, coarse);
      structure &= rep.disjoint && rep.covering;
      err = std::max(err, rep.max_error);
      // oracle: restriction then naive transform, against parity buckets
      std::vector<double> h(std::size_t(1) << coarse.k());
      for (std::uint64_t z = 0; z < h.size(); ++z) h[z] = g[fine.identify(coarse.embed(z))];
      auto hhat = oracle::fourier(h);
      auto ghat = oracle::fourier(g);
      std::vector<double> bucket(h.size(), 0.0);
      for (std::uint64_t T = 0; T < ghat.size(); ++T) {
        std::uint64_t S = 0;
        for (std::size_t l = 0; l < coarse.k(); ++l) {
          int par = 0;
          for (Vertex v : coarse.blocks[l]) par ^= int((T >> (v - 1)) & 1);
          S |= std::uint64_t(par) << l;
        }
        bucket[S] += ghat[T];
      }
      for (std::size_t S = 0; S < h.size(); ++S) err = std::max(err, std::abs(bucket[S] - hhat[S]));
    }
    return Outcome{err <= 1e-12 && structure, "30 coarsenings, max error " + num(err)};
  });

  criterion(11, "streaming gap", 120, [&] {
    auto rows = gap_experiment(16, 4, 8, 200, seed, StreamConvention::KeepCrossing);
    auto s = summarize_gap(rows);
    // independent max-cut on the first trials
    bool oracle_ok = true;
    for (std::size_t t = 0; t < 10; ++t) {
      Rng r = Rng::derive(seed, 2 * t);
      auto inst = sample_yes(16, 4, 8, r);
      auto st = build_stream(inst);
      oracle_ok &= oracle::max_cut(16, st.edges) == st.edges.size() && rows[2 * t].maxcut == st.edges.size();
      Rng r2 = Rng::derive(seed, 2 * t + 1);
      auto no = build_stream(sample_no(16, 4, 8, r2));
      oracle_ok &= oracle::max_cut(16, no.edges) == rows[2 * t + 1].maxcut;
    }
    write_file(out / "gap.csv", gap_table(rows).csv());
    bool ok = rows.size() == 400 && s.yes_all_full && s.mean_no < 1.0 && oracle_ok;
    return Outcome{ok, "YES fully cut " + std::string(s.yes_all_full ? "200/200" : "no") + ", NO mean ratio " +
                           num(s.mean_no)};
  });

  criterion(12, "report-only inequalities", 120, [&] {
    std::vector<ReportRow> all;
    auto add = [&](const std::string& stem, const std::vector<ReportRow>& rows) {
      write_file(out / (stem + ".csv"), report_table(rows).csv());
      all.insert(all.end(), rows.begin(), rows.end());
    };
    add("leveld", level_d_rows(8, 2, 0.5, seed));
    add("hyper", hyper_rows(8, 2, 2, 2, 2.0, seed));
    auto dec = decay_experiment(8, 2, 0.5, seed);
    write_file(out / "decay.csv", decay_table(dec.report).csv());
    Table kt{{"n", "m", "K", "lhs", "rhs", "gamma", "eta", "preconditions_met"}, {}};
    for (const auto& r : k_norm_rows(8, 2, 0.5, seed, 6)) kt.add({r.n, r.m, r.K, r.lhs, r.rhs, r.gamma, r.eta, false});
    write_file(out / "knorm.csv", kt.csv());
    std::size_t met = 0, bad = 0;
    for (const auto& r : all)
      if (r.preconditions_met) {
        ++met;
        bad += !r.holds();
      }
    return Outcome{bad == 0, std::to_string(all.size()) + " rows, " + std::to_string(met) +
                                 " with preconditions met, violations " + std::to_string(bad)};
  });

  std::printf("%d failed\n", failures);
  return failures;
}
