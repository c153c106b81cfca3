#include <dihp/dihp.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstring>
#include <iostream>

using namespace dihp;
namespace fs = std::filesystem;

namespace {

Config load_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      path = a.substr(9);
    if (path.empty()) continue;
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config " + path);
    return config_from_json(nlohmann::json::parse(f));
  }
  return {};
}

fs::path out_file(const Config& c, const std::string& stem) {
  return fs::path(c.out) / (stem + "." + c.format);
}

void emit(const Config& c, const std::string& stem, const Table& t) {
  auto p = out_file(c, stem);
  write_file(p, t.render(c.format));
  std::cout << "wrote " << p.string() << " (" << t.rows.size() << " rows)\n";
}

// field-level checks before dispatch
void validate(const Config& c, const std::string& sub) {
  auto bad = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("invalid " + field + ": " + why);
  };
  if (c.n < 2) bad("n", "need at least 2 vertices");
  if (2 * c.m > c.n) bad("m", "need 2m <= n");
  if (c.K == 0) bad("K", "need at least one player");
  if (c.trials == 0) bad("trials", "need at least one trial");
  if (sub == "hyper" && c.d > c.m) bad("d", "level exceeds m");
  if (c.q == 0) bad("q", "need q >= 1");
  if (!(c.r > 0)) bad("r", "need r > 0");
  if (!(c.density > 0 && c.density <= 1)) bad("density", "need 0 < density <= 1");
  if (!(c.tol >= 0)) bad("tol", "need tol >= 0");
  if (c.format != "csv" && c.format != "jsonl") bad("format", "csv or jsonl");
  parse_convention(c.convention);
}

int cmd_verify(const Config& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto rep = verify_suite(c);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& ch : rep.checks)
    std::cout << (ch.status() == "pass" ? "PASS " : ch.status() == "fail" ? "FAIL " : "NOTE ") << ch.name << " ["
              << ch.kind << "]" << (ch.detail.empty() ? "" : "  " + ch.detail) << "\n";
  std::cout << rep.count("pass") << " passed, " << rep.count("fail") << " failed, " << rep.count("report")
            << " report-only in " << secs << " s\n";
  emit(c, "verify", rep.table());
  return rep.ok() ? 0 : 1;
}

int cmd_gap(const Config& c) {
  auto conv = parse_convention(c.convention);
  auto rows = gap_experiment(c.n, c.m, c.K, c.trials, c.seed, conv);
  emit(c, "gap", gap_table(rows));
  auto s = summarize_gap(rows);
  std::cout << "mean ratio yes " << s.mean_yes << " no " << s.mean_no << " separation " << s.separation() << "\n";
  if (conv == StreamConvention::KeepCrossing && !s.yes_all_full) {
    std::cout << "FAIL some YES graph is not fully cut\n";
    return 1;
  }
  return 0;
}

int cmd_decay(const Config& c) {
  auto ex = decay_experiment(c.n, c.m, c.density, c.seed, c.cap);
  emit(c, "decay", decay_table(ex.report));
  std::cout << "w " << ex.w << " global " << ex.global << " odd levels vanish " << ex.report.odd_ok << "\n";
  Table kt{{"n", "m", "K", "lhs", "rhs", "gamma", "eta", "preconditions_met"}, {}};
  for (const auto& r : k_norm_rows(c.n, c.m, c.density, c.seed, 6, c.cap))
    kt.add({r.n, r.m, r.K, r.lhs, r.rhs, r.gamma, r.eta, false});
  emit(c, "knorm", kt);
  // odd-level vanishing is an identity, not a report
  return ex.report.odd_ok ? 0 : 1;
}

int check_rows(const std::vector<ReportRow>& rows) {
  int rc = 0;
  for (const auto& r : rows)
    if (r.preconditions_met && !r.holds()) {
      std::cout << "FAIL n=" << r.n << " m=" << r.m << " d=" << r.d << " q=" << r.q << " lhs " << r.lhs << " > rhs "
                << r.rhs << "\n";
      rc = 1;
    }
  return rc;
}

int cmd_leveld(const Config& c) {
  auto rows = level_d_rows(c.n, c.m, c.density, c.seed, c.cap);
  emit(c, "leveld", report_table(rows));
  return check_rows(rows);
}

int cmd_hyper(const Config& c) {
  auto rows = hyper_rows(c.n, c.m, c.d, c.q, c.r, c.seed, c.cap);
  emit(c, "hyper", report_table(rows));
  return check_rows(rows);
}

int cmd_discrepancy(const Config& c) {
  auto rows = discrepancy_scan(c.n, c.m, c.K, c.trees, c.depth, c.seed, c.cap);
  emit(c, "discrepancy", discrepancy_table(rows));
  int rc = 0;
  for (const auto& r : rows)
    if (r.adv > r.disc || r.refined_adv < r.adv) {
      std::cout << "FAIL tree " << r.tree << "\n";
      rc = 1;
    }
  return rc;
}

int cmd_decompose(const Config& c) {
  auto space = IndexedSpace::make(MatchingSpace::standard(c.n, c.m), c.cap);
  Rng rng(c.seed);
  auto A = random_subset_density(space, c.density, rng);
  auto pieces = decompose(A);
  auto p = fs::path(c.out) / "decompose.jsonl";
  write_file(p, decomposition_jsonl(pieces));
  auto b = decomposition_bound(A, pieces);
  std::cout << "wrote " << p.string() << " (" << pieces.size() << " pieces)\n"
            << "weighted potential " << b.lhs << " bound " << b.rhs << "\n";
  bool ok = b.holds(c.tol);
  for (const auto& pc : pieces) ok &= is_global(pc.set).global;
  return ok ? 0 : 1;
}

int cmd_refine(const Config& c) {
  auto space = IndexedSpace::make(MatchingSpace::standard(c.n, c.m), c.cap);
  Rng rng(c.seed);
  auto tree = random_tree(space, c.K, c.depth, rng);
  write_file(fs::path(c.out) / "tree.json", tree.to_json().dump(1) + "\n");
  auto tr = refine(tree);
  auto p = fs::path(c.out) / "refine.csv";
  write_file(p, tr.csv());
  auto chk = verify_global_trace(tr, c.tol);
  auto a0 = advantage(tree, c.cap).advantage(), a1 = tr.advantage().advantage();
  std::cout << "wrote " << p.string() << "\nadvantage " << to_double(a0) << " refined " << to_double(a1)
            << " max round increase " << chk.max_round_increase << "\n";
  auto cls = classify_leaves(tr, 3.0 * double(tr.depth()));
  std::cout << "leaf classes (high potential / cyclic / rest): " << cls.counts[0] << " " << cls.counts[1] << " "
            << cls.counts[2] << "\n";
  for (const auto& f : chk.failures) std::cout << "FAIL " << f << "\n";
  return chk.ok() && a1 >= a0 && refines(tr, tree) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  try {
    cfg = load_config_arg(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Experiments on the distributional implicit hidden partition problem"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default settings (flags win)");
  app.add_option("--seed", cfg.seed, "root seed");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--format", cfg.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--cap", cfg.cap, "enumeration cap");

  auto sizes = [&](CLI::App* s) {
    s->add_option("--n", cfg.n);
    s->add_option("--m", cfg.m);
  };
  std::function<int(const Config&)> run;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Config&)) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&run, fn] { run = fn; });
    sizes(s);
    return s;
  };

  auto* verify = sub("verify", "run the property checks", cmd_verify);
  verify->add_option("--K", cfg.K);
  verify->add_option("--tol", cfg.tol, "float tolerance");
  verify->add_option("--depth", cfg.depth);

  auto* gap = sub("gap", "max-cut gap between YES and NO streams", cmd_gap);
  gap->add_option("--K", cfg.K);
  gap->add_option("--trials", cfg.trials);
  gap->add_option("--convention", cfg.convention, "crossing or positive");

  auto* decay = sub("decay", "Fourier decay of the conditional distribution", cmd_decay);
  decay->add_option("--density", cfg.density);

  auto* leveld = sub("leveld", "level-d inequality report", cmd_leveld);
  leveld->add_option("--density", cfg.density);

  auto* hyper = sub("hyper", "derivative hypercontractivity report", cmd_hyper);
  hyper->add_option("--d", cfg.d);
  hyper->add_option("--q", cfg.q);
  hyper->add_option("--r", cfg.r);

  auto* disc = sub("discrepancy", "advantage vs discrepancy on random protocols", cmd_discrepancy);
  disc->add_option("--K", cfg.K);
  disc->add_option("--trees", cfg.trees);
  disc->add_option("--depth", cfg.depth);

  auto* dec = sub("decompose", "decompose a random set into global pieces", cmd_decompose);
  dec->add_option("--density", cfg.density);
  dec->add_option("--tol", cfg.tol);

  auto* ref = sub("refine", "refine a random protocol into a global one", cmd_refine);
  ref->add_option("--K", cfg.K);
  ref->add_option("--depth", cfg.depth);
  ref->add_option("--tol", cfg.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    validate(cfg, app.get_subcommands().front()->get_name());
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    return run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
