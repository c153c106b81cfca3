#pragma once

#include "distributions.hpp"

#include <bit>
#include <memory>

namespace dihp {

// which labelled edges enter the graph; crossing edges are the ones a hidden
// bipartition cuts
enum class StreamConvention { KeepCrossing, KeepPositive };

inline StreamConvention parse_convention(const std::string& s) {
  if (s == "crossing") return StreamConvention::KeepCrossing;
  if (s == "positive") return StreamConvention::KeepPositive;
  throw std::invalid_argument("unknown stream convention '" + s + "'");
}

struct EdgeStream {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<std::size_t> offsets;  // player i owns edges[offsets[i], offsets[i+1])

  std::size_t players() const { return offsets.empty() ? 0 : offsets.size() - 1; }

  std::string dump() const {
    std::string out;
    for (const auto& e : edges) out += std::to_string(e.u) + "-" + std::to_string(e.v) + "\n";
    return out;
  }
};

inline EdgeStream build_stream(const std::vector<LabeledMatching>& players, std::size_t n,
                               StreamConvention conv = StreamConvention::KeepCrossing) {
  EdgeStream st{n, {}, {0}};
  int keep = conv == StreamConvention::KeepCrossing ? -1 : 1;
  for (const auto& y : players) {
    for (const auto& le : y.edges())
      if (le.s == keep) st.edges.push_back(le.e);
    st.offsets.push_back(st.edges.size());
  }
  return st;
}

inline EdgeStream build_stream(const DihpInstance& inst, StreamConvention conv = StreamConvention::KeepCrossing) {
  return build_stream(inst.players, inst.n, conv);
}

// brute force over bipartitions in Gray-code order, vertex n pinned to side 0
inline std::size_t max_cut_exact(std::size_t n, const std::vector<Edge>& edges) {
  if (n > 24) throw CapacityError("max-cut enumeration", pow2(unsigned(n)));
  if (n < 2) return 0;
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (const auto& e : edges) {
    if (e.u < 1 || std::size_t(e.v) > n) throw std::domain_error("edge outside 1..n");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> side(n + 1, 0);
  long cut = 0, best = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t(1) << (n - 1)); ++i) {
    Vertex v = Vertex(std::countr_zero(i)) + 1;
    for (Vertex w : adj[v]) cut += side[w] == side[v] ? 1 : -1;
    side[v] ^= 1;
    best = std::max(best, cut);
  }
  return std::size_t(best);
}

inline double trivial_half_approx(const std::vector<Edge>& edges) { return double(edges.size()) / 2.0; }

class StreamingAlgorithm {
 public:
  virtual ~StreamingAlgorithm() = default;
  virtual std::size_t state_bits() const = 0;
  virtual std::size_t passes() const { return 1; }
  virtual void reset() = 0;
  virtual void begin_pass(std::size_t) {}
  virtual void process(const Edge& e) = 0;
  virtual std::vector<bool> save() const = 0;
  virtual void load(const std::vector<bool>& bits) = 0;
  virtual double output() const = 0;
};

// counts edges and reports |E|/2
class EdgeCounter : public StreamingAlgorithm {
 public:
  explicit EdgeCounter(std::size_t max_edges) : width_(std::bit_width(max_edges)) {}

  std::size_t state_bits() const override { return width_; }
  void reset() override { count_ = 0; }
  void process(const Edge&) override {
    if (++count_ >> width_) throw std::overflow_error("edge counter overflow");
  }
  std::vector<bool> save() const override {
    std::vector<bool> b(width_);
    for (std::size_t i = 0; i < width_; ++i) b[i] = (count_ >> i) & 1;
    return b;
  }
  void load(const std::vector<bool>& b) override {
    if (b.size() != width_) throw std::invalid_argument("state has the wrong width");
    count_ = 0;
    for (std::size_t i = 0; i < width_; ++i) count_ |= std::uint64_t(b[i]) << i;
  }
  double output() const override { return double(count_) / 2.0; }

 private:
  std::size_t width_;
  std::uint64_t count_ = 0;
};

// zero-bit state, constant answer
class ConstantAlgorithm : public StreamingAlgorithm {
 public:
  explicit ConstantAlgorithm(double value) : value_(value) {}
  std::size_t state_bits() const override { return 0; }
  void reset() override {}
  void process(const Edge&) override {}
  std::vector<bool> save() const override { return {}; }
  void load(const std::vector<bool>&) override {}
  double output() const override { return value_; }

 private:
  double value_;
};

inline double run_monolithic(StreamingAlgorithm& alg, const EdgeStream& st) {
  alg.reset();
  for (std::size_t p = 0; p < alg.passes(); ++p) {
    alg.begin_pass(p);
    for (const auto& e : st.edges) alg.process(e);
  }
  return alg.output();
}

struct ProtocolRun {
  double output = 0;
  std::size_t bits = 0;
  std::size_t messages = 0;
};

// player i runs the algorithm on its own edges, then hands the s-bit state on;
// after the last pass the final state is decoded into the output
inline ProtocolRun run_as_protocol(StreamingAlgorithm& alg, const EdgeStream& st) {
  ProtocolRun run;
  alg.reset();
  std::vector<bool> msg;
  bool first = true;
  for (std::size_t p = 0; p < alg.passes(); ++p)
    for (std::size_t i = 0; i < st.players(); ++i) {
      if (!first) alg.load(msg);
      first = false;
      if (i == 0) alg.begin_pass(p);
      for (std::size_t j = st.offsets[i]; j < st.offsets[i + 1]; ++j) alg.process(st.edges[j]);
      msg = alg.save();
      if (msg.size() != alg.state_bits()) throw std::logic_error("state exceeds its declared size");
      run.bits += msg.size();
      ++run.messages;
    }
  if (!first) alg.load(msg);
  run.output = alg.output();
  return run;
}

using AlgorithmFactory = std::function<std::unique_ptr<StreamingAlgorithm>()>;

// accept when the algorithm's estimate exceeds the threshold
inline Decision streaming_decision(AlgorithmFactory make, std::size_t n, double threshold,
                                   StreamConvention conv = StreamConvention::KeepCrossing) {
  return [=](const std::vector<LabeledMatching>& ys) {
    auto alg = make();
    return run_as_protocol(*alg, build_stream(ys, n, conv)).output > threshold;
  };
}

struct GapRow {
  std::size_t trial;
  bool yes;
  std::size_t edges, maxcut;
  double ratio;  // maxcut / |E|, 1 for an empty graph
};

struct GapSummary {
  double mean_yes = 0, mean_no = 0;
  bool yes_all_full = true;  // every YES graph fully cut
  double separation() const { return mean_yes - mean_no; }
};

inline std::vector<GapRow> gap_experiment(std::size_t n, std::size_t m, std::size_t K, std::size_t trials,
                                          std::uint64_t seed, StreamConvention conv = StreamConvention::KeepCrossing) {
  std::vector<GapRow> rows;
  for (std::size_t t = 0; t < trials; ++t)
    for (int label = 1; label >= 0; --label) {
      Rng rng = Rng::derive(seed, 2 * t + (label ? 0 : 1));
      auto inst = label ? sample_yes(n, m, K, rng) : sample_no(n, m, K, rng);
      auto st = build_stream(inst, conv);
      std::size_t mc = max_cut_exact(n, st.edges);
      double ratio = st.edges.empty() ? 1.0 : double(mc) / double(st.edges.size());
      rows.push_back({t, bool(label), st.edges.size(), mc, ratio});
    }
  return rows;
}

inline GapSummary summarize_gap(const std::vector<GapRow>& rows) {
  GapSummary s;
  std::size_t ny = 0, nn = 0;
  for (const auto& r : rows) {
    if (r.yes) {
      s.mean_yes += r.ratio;
      ++ny;
      if (r.maxcut != r.edges) s.yes_all_full = false;
    } else {
      s.mean_no += r.ratio;
      ++nn;
    }
  }
  if (ny) s.mean_yes /= double(ny);
  if (nn) s.mean_no /= double(nn);
  return s;
}

}  // namespace dihp
