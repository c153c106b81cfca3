#pragma once

#include "distributions.hpp"
#include "globalness.hpp"

#include <json.hpp>

#include <numeric>

namespace dihp {

struct ProtocolNode {
  bool leaf = true;
  int output = 0;
  std::size_t speaker = 0;  // 0-based player index
  Bitset part[2];           // split of the speaker's current set
  std::size_t child[2] = {0, 0};
};

struct LeafRectangle {
  Rectangle rect;
  int output = 0;
  std::size_t node = 0;
  std::size_t depth = 0;
};

// deterministic K-party protocol tree over Omega^K
class ProtocolTree {
 public:
  ProtocolTree(SpacePtr space, std::size_t K) : space_(std::move(space)), K_(K) {
    if (K_ == 0) throw std::invalid_argument("need at least one player");
    if (!space_->space().ground().is_standard()) throw std::domain_error("protocol spaces use ground set 1..n");
  }

  const SpacePtr& space() const { return space_; }
  std::size_t K() const { return K_; }
  std::size_t root() const { return root_; }
  void set_root(std::size_t r) { root_ = r; }
  const std::vector<ProtocolNode>& nodes() const { return nodes_; }
  const ProtocolNode& node(std::size_t i) const { return nodes_.at(i); }

  std::size_t add_leaf(int output) {
    ProtocolNode nd;
    nd.output = output ? 1 : 0;
    nodes_.push_back(nd);
    return nodes_.size() - 1;
  }

  std::size_t add_split(std::size_t speaker, Bitset part0, Bitset part1, std::size_t c0, std::size_t c1) {
    if (speaker >= K_) throw std::out_of_range("speaker index");
    if (part0.size() != space_->size() || part1.size() != space_->size())
      throw std::invalid_argument("part bitsets must span the space");
    if (part0.intersects(part1)) throw std::invalid_argument("parts overlap");
    ProtocolNode nd;
    nd.leaf = false;
    nd.speaker = speaker;
    nd.part[0] = std::move(part0);
    nd.part[1] = std::move(part1);
    nd.child[0] = c0;
    nd.child[1] = c1;
    nodes_.push_back(std::move(nd));
    return nodes_.size() - 1;
  }

  Rectangle full_rectangle() const {
    Rectangle R;
    for (std::size_t i = 0; i < K_; ++i) R.factors.push_back(OmegaSubset::full(space_));
    return R;
  }

  // walks the tree with per-player sets, checking each split partitions the current set
  std::vector<LeafRectangle> leaf_rectangles() const {
    std::vector<LeafRectangle> out;
    walk(root_, full_rectangle(), 0, out);
    return out;
  }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& l : leaf_rectangles()) d = std::max(d, l.depth);
    return d;
  }

  bool uniform_depth() const {
    auto ls = leaf_rectangles();
    return std::all_of(ls.begin(), ls.end(), [&](const auto& l) { return l.depth == ls.front().depth; });
  }

  int route(const std::vector<LabeledMatching>& ys) const {
    if (ys.size() != K_) throw std::invalid_argument("wrong number of players");
    std::size_t v = root_;
    std::size_t guard = 0;
    while (!nodes_[v].leaf) {
      const auto& nd = nodes_[v];
      std::size_t idx = space_->index_of(ys[nd.speaker]);
      if (nd.part[1].test(idx))
        v = nd.child[1];
      else if (nd.part[0].test(idx))
        v = nd.child[0];
      else
        throw std::logic_error("input falls outside both parts");
      if (++guard > nodes_.size()) throw std::logic_error("cycle in protocol tree");
    }
    return nodes_[v].output;
  }

  // extend short leaves with dummy splits (everything goes to child 0)
  void pad_to_uniform_depth() {
    std::size_t r = depth();
    Rectangle R = full_rectangle();
    root_ = pad(root_, R, 0, r);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n"] = space_->space().n();
    j["m"] = space_->space().m();
    j["K"] = K_;
    j["root"] = root_;
    j["nodes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& nd = nodes_[i];
      nlohmann::json o{{"id", i}};
      if (nd.leaf) {
        o["leaf"] = true;
        o["output"] = nd.output;
      } else {
        o["leaf"] = false;
        o["speaker"] = nd.speaker;
        o["children"] = {nd.child[0], nd.child[1]};
        for (int b = 0; b < 2; ++b) {
          std::vector<std::size_t> idx;
          for (auto k = nd.part[b].find_first(); k != Bitset::npos; k = nd.part[b].find_next(k)) idx.push_back(k);
          o[b ? "part1" : "part0"] = idx;
        }
      }
      j["nodes"].push_back(o);
    }
    return j;
  }

  static ProtocolTree from_json(const nlohmann::json& j) {
    auto space = IndexedSpace::make(MatchingSpace::standard(j.at("n"), j.at("m")));
    ProtocolTree t(space, j.at("K"));
    for (const auto& o : j.at("nodes")) {
      if (o.at("id").get<std::size_t>() != t.nodes_.size()) throw std::invalid_argument("node ids must be 0..N-1 in order");
      if (o.at("leaf").get<bool>()) {
        t.add_leaf(o.at("output"));
      } else {
        Bitset p[2] = {Bitset(space->size()), Bitset(space->size())};
        for (int b = 0; b < 2; ++b)
          for (std::size_t k : o.at(b ? "part1" : "part0")) p[b].set(k);
        t.add_split(o.at("speaker"), p[0], p[1], o.at("children")[0], o.at("children")[1]);
      }
    }
    t.root_ = j.at("root");
    return t;
  }

 private:
  void walk(std::size_t v, const Rectangle& R, std::size_t d, std::vector<LeafRectangle>& out) const {
    if (d > nodes_.size()) throw std::logic_error("cycle in protocol tree");
    const auto& nd = nodes_.at(v);
    if (nd.leaf) {
      out.push_back({R, nd.output, v, d});
      return;
    }
    const Bitset& cur = R.factors[nd.speaker].members();
    if ((nd.part[0] | nd.part[1]) != cur)
      throw std::logic_error("split at node " + std::to_string(v) + " does not partition the speaker's set");
    for (int b = 0; b < 2; ++b) {
      Rectangle C = R;
      C.factors[nd.speaker] = R.factors[nd.speaker].intersect(nd.part[b]);
      walk(nd.child[b], C, d + 1, out);
    }
  }

  std::size_t pad(std::size_t v, const Rectangle& R, std::size_t d, std::size_t r) {
    if (nodes_[v].leaf) {
      if (d == r) return v;
      int out = nodes_[v].output;
      std::size_t c0 = pad(add_leaf(out), R, d + 1, r);
      Rectangle E = R;
      E.factors[0] = R.factors[0].intersect(Bitset(space_->size()));
      std::size_t c1 = pad(add_leaf(out), E, d + 1, r);
      return add_split(0, R.factors[0].members(), Bitset(space_->size()), c0, c1);
    }
    std::size_t s = nodes_[v].speaker;
    for (int b = 0; b < 2; ++b) {
      Rectangle C = R;
      C.factors[s] = R.factors[s].intersect(nodes_[v].part[b]);
      std::size_t c = pad(nodes_[v].child[b], C, d + 1, r);
      nodes_[v].child[b] = c;
    }
    return v;
  }

  SpacePtr space_;
  std::size_t K_;
  std::vector<ProtocolNode> nodes_;
  std::size_t root_ = 0;
};

inline BigInt rectangle_count(const Rectangle& R) {
  BigInt c = 1;
  for (const auto& f : R.factors) c *= f.size();
  return c;
}

inline Rational no_mass(const Rectangle& R) {
  if (R.factors.empty()) throw std::invalid_argument("rectangle without factors");
  BigInt den = 1;
  for (std::size_t i = 0; i < R.K(); ++i) den *= R.factors[0].space()->size();
  return Rational(rectangle_count(R), den);
}

// yes-mass from the sampling process: x uniform, matchings uniform, labels read off x
inline Rational yes_mass(const Rectangle& R) {
  if (R.empty()) return 0;
  const auto& sp = R.factors[0].space()->space();
  std::vector<std::vector<std::uint32_t>> hits;
  for (const auto& f : R.factors) hits.push_back(subspace_hits(f));
  BigInt total = 0;
  for (std::size_t x = 0; x < hits[0].size(); ++x) {
    BigInt prod = 1;
    for (const auto& h : hits) {
      if (h[x] == 0) {
        prod = 0;
        break;
      }
      prod *= h[x];
    }
    total += prod;
  }
  BigInt den = pow2(unsigned(sp.n()));
  for (std::size_t i = 0; i < R.K(); ++i) den *= sp.matchings();
  return Rational(total, den);
}

// same quantity by listing every (x, M_1..M_K) outcome
inline Rational yes_mass_direct(const Rectangle& R, std::size_t cap = kDefaultCap) {
  const auto& sp = R.factors.at(0).space()->space();
  const std::size_t n = sp.n(), K = R.K();
  BigInt outcomes = pow2(unsigned(n));
  for (std::size_t i = 0; i < K; ++i) outcomes *= sp.matchings();
  check_cap(outcomes, cap, "yes-mass enumeration");
  auto mats = enumerate_matchings(sp.ground(), sp.m());
  BigInt hits = 0;
  std::vector<std::size_t> idx(K, 0);
  std::vector<std::vector<char>> in(K, std::vector<char>(mats.size()));
  for (std::uint64_t b = 0; b < (std::uint64_t(1) << n); ++b) {
    Bipartition x{n, b};
    for (std::size_t j = 0; j < mats.size(); ++j) {
      auto y = label_by(x, mats[j]);
      for (std::size_t i = 0; i < K; ++i) in[i][j] = R.factors[i].contains(y);
    }
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      bool all = true;
      for (std::size_t i = 0; i < K && all; ++i) all = in[i][idx[i]];
      hits += all;
      std::size_t i = 0;
      for (; i < K; ++i) {
        if (++idx[i] < mats.size()) break;
        idx[i] = 0;
      }
      if (i == K) break;
    }
  }
  return Rational(hits, outcomes);
}

struct YesMassComparison {
  Rational formula, direct;
};

// D_yes(R) = D_no(R) 2^{(K-1)n} sum_x prod_i Pr[x | A^(i)]
inline YesMassComparison yes_mass_formula(const Rectangle& R, std::size_t cap = kDefaultCap) {
  const auto& sp = R.factors.at(0).space()->space();
  YesMassComparison out{0, yes_mass_direct(R, cap)};
  if (R.empty()) return out;
  std::vector<std::vector<Rational>> pr;
  for (const auto& f : R.factors) pr.push_back(conditional_distribution(f));
  Rational sum = 0;
  for (std::size_t x = 0; x < pr[0].size(); ++x) {
    Rational prod = 1;
    for (const auto& p : pr) prod *= p[x];
    sum += prod;
  }
  out.formula = no_mass(R) * Rational(pow2(unsigned((R.K() - 1) * sp.n()))) * sum;
  return out;
}

// exact advantage by pushing every instance of both distributions through the tree
inline ExactAdvantage advantage(const ProtocolTree& t, std::size_t cap = kDefaultCap) {
  const auto& sp = t.space()->space();
  return advantage_exact([&](const std::vector<LabeledMatching>& ys) { return t.route(ys) == 1; }, sp.n(), sp.m(),
                         t.K(), cap);
}

// half the summed leaf discrepancy; upper-bounds the advantage
inline Rational discrepancy_sum(const ProtocolTree& t) {
  Rational s = 0;
  for (const auto& l : t.leaf_rectangles()) {
    if (l.rect.empty()) continue;
    Rational d = yes_mass(l.rect) - no_mass(l.rect);
    s += d >= 0 ? d : Rational(-d);
  }
  return s / 2;
}

// A^(i) = {y : y_e = (-1)^i}, players numbered from 1
inline Rectangle bad_rectangle(const SpacePtr& space, std::size_t K, const Edge& e) {
  if (K < 2) throw std::domain_error("bad rectangle needs K >= 2");
  Rectangle R;
  for (std::size_t i = 1; i <= K; ++i) {
    int s = i % 2 ? -1 : 1;
    R.factors.push_back(OmegaSubset::where(space, [&](const LabeledMatching& y) { return y.label(e) == s; }));
  }
  return R;
}

// ---------------------------------------------------------------------------
// refinement into global rectangles

struct TraceNode {
  Rectangle rect;  // factor bases hold the restriction tuple
  std::size_t parent = std::size_t(-1);
  std::size_t tree_node = 0;
  Rational mass_no, mass_yes;
};

struct GlobalTrace {
  SpacePtr space;
  std::size_t K = 0;
  std::vector<std::vector<TraceNode>> rounds;  // rounds[0] holds the root
  std::vector<int> outputs;                    // one per node of the last round

  std::size_t depth() const { return rounds.empty() ? 0 : rounds.size() - 1; }
  const std::vector<TraceNode>& leaves() const { return rounds.back(); }

  ExactAdvantage advantage() const {
    ExactAdvantage a{0, 0};
    for (std::size_t j = 0; j < leaves().size(); ++j)
      if (outputs[j]) {
        a.p_yes += leaves()[j].mass_yes;
        a.p_no += leaves()[j].mass_no;
      }
    return a;
  }

  std::string csv() const {
    std::string out = "round,rectangle,zeta_size,potential,mass_no,mass_yes\n";
    for (std::size_t d = 0; d < rounds.size(); ++d)
      for (std::size_t j = 0; j < rounds[d].size(); ++j) {
        const auto& nd = rounds[d][j];
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", potential(nd.rect), to_double(nd.mass_no),
                      to_double(nd.mass_yes));
        out += std::to_string(d) + "," + std::to_string(j) + "," + std::to_string(tuple_size(nd.rect.restrictions())) +
               "," + buf + "\n";
      }
    return out;
  }
};

inline TraceNode make_trace_node(Rectangle R, std::size_t parent, std::size_t tree_node) {
  TraceNode nd{std::move(R), parent, tree_node, 0, 0};
  nd.mass_no = no_mass(nd.rect);
  nd.mass_yes = yes_mass(nd.rect);
  return nd;
}

// walk the tree; whenever the speaker's new set stops being global, split it
// into global pieces and branch on which piece holds the input
inline GlobalTrace refine(const ProtocolTree& t) {
  if (!t.uniform_depth()) throw std::invalid_argument("refinement expects all leaves at the same depth");
  const std::size_t r = t.depth();
  GlobalTrace tr;
  tr.space = t.space();
  tr.K = t.K();
  tr.rounds.push_back({make_trace_node(t.full_rectangle(), std::size_t(-1), t.root())});
  for (std::size_t d = 0; d < r; ++d) {
    std::vector<TraceNode> next;
    for (std::size_t j = 0; j < tr.rounds[d].size(); ++j) {
      const auto& cur = tr.rounds[d][j];
      const auto& nd = t.node(cur.tree_node);
      const std::size_t i = nd.speaker;
      for (int b = 0; b < 2; ++b) {
        OmegaSubset Ab = cur.rect.factors[i].intersect(nd.part[b]);
        if (Ab.empty()) continue;
        std::vector<OmegaSubset> parts;
        if (is_global(Ab).global)
          parts.push_back(Ab);
        else
          for (auto& p : decompose(Ab)) parts.push_back(std::move(p.set));
        for (auto& piece : parts) {
          Rectangle C = cur.rect;
          C.factors[i] = std::move(piece);
          next.push_back(make_trace_node(std::move(C), j, nd.child[b]));
        }
      }
    }
    tr.rounds.push_back(std::move(next));
  }
  for (const auto& leaf : tr.leaves()) tr.outputs.push_back(leaf.mass_yes >= leaf.mass_no ? 1 : 0);
  return tr;
}

struct TraceCheck {
  std::vector<std::string> failures;
  double max_round_increase = 0;     // worst weighted child potential minus parent potential
  std::vector<double> mean_potential;  // per round, weighted by no-mass
  bool ok() const { return failures.empty(); }
};

inline TraceCheck verify_global_trace(const GlobalTrace& tr, double tol = 1e-9) {
  TraceCheck chk;
  chk.max_round_increase = -1e300;
  BigInt total = 1;
  for (std::size_t i = 0; i < tr.K; ++i) total *= tr.space->size();
  for (std::size_t d = 0; d < tr.rounds.size(); ++d) {
    const auto& round = tr.rounds[d];
    double mean = 0;
    std::vector<double> child_sum(d ? tr.rounds[d - 1].size() : 0, 0.0);
    for (std::size_t j = 0; j < round.size(); ++j) {
      const auto& nd = round[j];
      std::string where = "round " + std::to_string(d) + " rectangle " + std::to_string(j);
      if (nd.rect.empty()) {
        chk.failures.push_back(where + ": empty rectangle");
        continue;
      }
      if (!rectangle_is_global(nd.rect)) chk.failures.push_back(where + ": not global under its restrictions");
      double p = potential(nd.rect);
      mean += to_double(Rational(rectangle_count(nd.rect), total)) * p;
      if (d) {
        const auto& par = tr.rounds[d - 1].at(nd.parent);
        for (std::size_t i = 0; i < tr.K; ++i)
          if (!subsumes(nd.rect.factors[i].base(), par.rect.factors[i].base()))
            chk.failures.push_back(where + ": restriction does not extend the parent's");
        if (!nd.rect.inside(par.rect)) chk.failures.push_back(where + ": not contained in the parent");
        child_sum[nd.parent] += to_double(Rational(rectangle_count(nd.rect), rectangle_count(par.rect))) * p;
      }
    }
    if (d)
      for (std::size_t k = 0; k < child_sum.size(); ++k) {
        double inc = child_sum[k] - potential(tr.rounds[d - 1][k].rect);
        chk.max_round_increase = std::max(chk.max_round_increase, inc);
        if (inc > 3.0 + tol)
          chk.failures.push_back("round " + std::to_string(d) + ": children of rectangle " + std::to_string(k) +
                                 " raise the potential by " + std::to_string(inc));
      }
    chk.mean_potential.push_back(mean);
    if (mean > 3.0 * d + tol)
      chk.failures.push_back("round " + std::to_string(d) + ": mean potential " + std::to_string(mean) +
                             " exceeds 3 per round");
  }
  return chk;
}

// every final rectangle sits inside the leaf rectangle of the original tree it reached
inline bool refines(const GlobalTrace& tr, const ProtocolTree& t) {
  std::map<std::size_t, Rectangle> leaf_of;
  for (auto& l : t.leaf_rectangles()) leaf_of.emplace(l.node, l.rect);
  for (const auto& nd : tr.leaves()) {
    auto it = leaf_of.find(nd.tree_node);
    if (it == leaf_of.end() || !nd.rect.inside(it->second)) return false;
  }
  return true;
}

struct CycleMass {
  Rational direct;       // D_no of tuples whose fresh edges land inside N(zeta)
  Rational union_bound;  // per-edge union bound using globalness of each factor
  double closed_form;    // D_no(R) C(2|zeta|,2) 8mK/n^2
};

inline CycleMass cycle_event_mass(const Rectangle& R) {
  const auto& sp = R.factors.at(0).space()->space();
  std::vector<Vertex> N;
  for (const auto& f : R.factors)
    for (Vertex v : f.base().vertices()) N.push_back(v);
  std::sort(N.begin(), N.end());
  N.erase(std::unique(N.begin(), N.end()), N.end());
  auto inside = [&](Vertex v) { return std::binary_search(N.begin(), N.end(), v); };

  BigInt clean = 1;
  Rational frac_sum = 0;
  for (const auto& f : R.factors) {
    std::size_t good = 0;
    for (auto k : f.indices()) {
      bool bad = false;
      for (const auto& le : f.space()->at(k).edges())
        if (f.base().label(le.e) == 0 && inside(le.e.u) && inside(le.e.v)) bad = true;
      good += !bad;
    }
    clean *= good;
    const BigInt omega_z = f.base_size();
    for (std::size_t a = 0; a < N.size(); ++a)
      for (std::size_t b = a + 1; b < N.size(); ++b) {
        Edge e(N[a], N[b]);
        if (f.base().covers(e.u) || f.base().covers(e.v)) continue;
        if (f.base().size() >= sp.m()) continue;
        Restriction ze = f.base().merged(Restriction({{e, 1}}));
        frac_sum += Rational(4 * sp.restricted_size(ze), omega_z);
      }
  }
  Rational dno = no_mass(R);
  BigInt all = rectangle_count(R);
  Rational direct = all == 0 ? Rational(0) : dno * Rational(all - clean, all);
  std::size_t zs = tuple_size(R.restrictions());
  double cf = to_double(dno) * to_double(binomial(unsigned(2 * zs), 2)) * 8.0 * double(sp.m()) * double(R.K()) /
              (double(sp.n()) * double(sp.n()));
  return {direct, dno * frac_sum, cf};
}

struct LeafClasses {
  Rational high_potential_no, high_potential_yes;  // p >= threshold
  Rational cyclic_no, cyclic_yes;                  // supports close a cycle or repeat an edge
  Rational rest_no, rest_yes;
  std::size_t counts[3] = {0, 0, 0};
};

inline bool supports_have_cycle(const RestrictionTuple& zeta) {
  std::map<Vertex, Vertex> parent;
  std::function<Vertex(Vertex)> find = [&](Vertex v) {
    auto it = parent.find(v);
    if (it == parent.end() || it->second == v) return v;
    return it->second = find(it->second);
  };
  for (const auto& z : zeta)
    for (const auto& le : z.edges()) {
      Vertex a = find(le.e.u), b = find(le.e.v);
      if (a == b) return true;
      parent[a] = b;
    }
  return false;
}

inline LeafClasses classify_leaves(const GlobalTrace& tr, double threshold) {
  LeafClasses c;
  for (const auto& nd : tr.leaves()) {
    if (potential(nd.rect) >= threshold) {
      c.high_potential_no += nd.mass_no;
      c.high_potential_yes += nd.mass_yes;
      ++c.counts[0];
    } else if (supports_have_cycle(nd.rect.restrictions())) {
      c.cyclic_no += nd.mass_no;
      c.cyclic_yes += nd.mass_yes;
      ++c.counts[1];
    } else {
      c.rest_no += nd.mass_no;
      c.rest_yes += nd.mass_yes;
      ++c.counts[2];
    }
  }
  return c;
}

// random protocol of depth <= max_depth, padded to uniform depth
inline ProtocolTree random_tree(const SpacePtr& space, std::size_t K, std::size_t max_depth, Rng& rng,
                                double stop_prob = 0.2) {
  ProtocolTree t(space, K);
  const auto& sp = space->space();
  auto edges = enumerate_matchings(sp.ground(), 1);
  auto build = [&](auto&& self, const Rectangle& R, std::size_t d) -> std::size_t {
    if (d == max_depth || (d > 0 && rng.uniform01() < stop_prob)) return t.add_leaf(int(rng.coin()));
    std::size_t s = rng.below(K);
    const auto& cur = R.factors[s];
    Bitset p1(space->size());
    std::uint64_t mode = rng.below(3);
    Edge e = edges[rng.below(edges.size())][0];
    for (auto k : cur.indices()) {
      const auto& y = space->at(k);
      bool side;
      if (mode == 0)
        side = rng.coin();
      else if (mode == 1)
        side = y.label(e) != 0;
      else
        side = y.label(e) == 0 ? rng.coin() : y.label(e) > 0;
      if (side) p1.set(k);
    }
    Bitset p0 = cur.members() - p1;
    Rectangle C0 = R, C1 = R;
    C0.factors[s] = cur.intersect(p0);
    C1.factors[s] = cur.intersect(p1);
    std::size_t c0 = self(self, C0, d + 1);
    std::size_t c1 = self(self, C1, d + 1);
    return t.add_split(s, p0, p1, c0, c1);
  };
  t.set_root(build(build, t.full_rectangle(), 0));
  t.pad_to_uniform_depth();
  return t;
}

}  // namespace dihp
