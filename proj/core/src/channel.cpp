#include "bbtpolar/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace bbtpolar {

namespace {

constexpr double kRowSumTol = 1e-12;

double log2_safe(double x) { return std::log2(x); }

// Capacity contribution (in bits) of a symbol pair {y, conj(y)} with
// W(y|0)=a, W(y|1)=b under uniform input.
double pair_capacity(double a, double b) {
  double s = a + b;
  if (s <= 0.0) return 0.0;
  double c = 0.0;
  if (a > 0.0) c += a * log2_safe(2.0 * a / s);
  if (b > 0.0) c += b * log2_safe(2.0 * b / s);
  return c;
}

}  // namespace

BmsChannel BmsChannel::bec(double erasure_prob) {
  if (erasure_prob < 0.0 || erasure_prob > 1.0)
    throw std::invalid_argument("BEC erasure probability out of [0,1]");
  BmsChannel w;
  w.kind_ = Kind::Bec;
  w.param_ = erasure_prob;
  return w;
}

BmsChannel BmsChannel::bsc(double crossover_prob) {
  if (crossover_prob < 0.0 || crossover_prob > 0.5)
    throw std::invalid_argument("BSC crossover probability out of [0,1/2]");
  BmsChannel w;
  w.kind_ = Kind::Bsc;
  w.param_ = crossover_prob;
  return w;
}

BmsChannel BmsChannel::discrete(std::vector<Output> outputs,
                                std::vector<int> conjugate) {
  if (outputs.size() != conjugate.size())
    throw std::invalid_argument("conjugate map size mismatch");
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t y = 0; y < outputs.size(); ++y) {
    if (outputs[y].p0 < 0.0 || outputs[y].p1 < 0.0)
      throw std::invalid_argument("negative transition probability");
    s0 += outputs[y].p0;
    s1 += outputs[y].p1;
    int c = conjugate[y];
    if (c < 0 || static_cast<std::size_t>(c) >= outputs.size() ||
        conjugate[static_cast<std::size_t>(c)] != static_cast<int>(y))
      throw std::invalid_argument("conjugate map is not an involution");
    if (std::abs(outputs[y].p0 - outputs[static_cast<std::size_t>(c)].p1) > 1e-9)
      throw std::invalid_argument("symmetry pairing violated");
  }
  if (std::abs(s0 - 1.0) > kRowSumTol || std::abs(s1 - 1.0) > kRowSumTol)
    throw std::invalid_argument("transition rows must sum to 1");
  BmsChannel w;
  w.kind_ = Kind::Discrete;
  w.outputs_ = std::move(outputs);
  w.conjugate_ = std::move(conjugate);
  return w;
}

std::size_t BmsChannel::alphabet_size() const {
  switch (kind_) {
    case Kind::Bec:
      return 3;
    case Kind::Bsc:
      return 2;
    case Kind::Discrete:
      return outputs_.size();
  }
  return 0;
}

BmsChannel BmsChannel::as_discrete() const {
  if (kind_ == Kind::Discrete) return *this;
  if (kind_ == Kind::Bec) {
    double e = param_;
    // outputs: 0, erasure, 1
    return discrete({{1.0 - e, 0.0}, {e, e}, {0.0, 1.0 - e}}, {2, 1, 0});
  }
  double p = param_;
  return discrete({{1.0 - p, p}, {p, 1.0 - p}}, {1, 0});
}

namespace {

BmsChannel star_tables(const BmsChannel& a, const BmsChannel& b) {
  const auto& y0 = a.outputs();
  const auto& y1 = b.outputs();
  const auto& c0 = a.conjugate();
  std::size_t m0 = y0.size(), m1 = y1.size();
  std::vector<BmsChannel::Output> out(m0 * m1);
  std::vector<int> conj(m0 * m1);
  for (std::size_t i = 0; i < m0; ++i) {
    for (std::size_t j = 0; j < m1; ++j) {
      // W*(y0,y1|x0) = 1/2 sum_{x1} W0(y0|x0^x1) W1(y1|x1)
      double p0 = 0.5 * (y0[i].p0 * y1[j].p0 + y0[i].p1 * y1[j].p1);
      double p1 = 0.5 * (y0[i].p1 * y1[j].p0 + y0[i].p0 * y1[j].p1);
      out[i * m1 + j] = {p0, p1};
      conj[i * m1 + j] = static_cast<int>(
          static_cast<std::size_t>(c0[i]) * m1 + j);
    }
  }
  return BmsChannel::discrete(std::move(out), std::move(conj));
}

BmsChannel circle_tables(const BmsChannel& a, const BmsChannel& b) {
  const auto& y0 = a.outputs();
  const auto& y1 = b.outputs();
  const auto& c1 = b.conjugate();
  std::size_t m0 = y0.size(), m1 = y1.size();
  std::vector<BmsChannel::Output> out(2 * m0 * m1);
  std::vector<int> conj(2 * m0 * m1);
  for (std::size_t i = 0; i < m0; ++i) {
    for (std::size_t j = 0; j < m1; ++j) {
      for (int x0 = 0; x0 < 2; ++x0) {
        // Wo(y0,y1,x0|x1) = 1/2 W0(y0|x0^x1) W1(y1|x1)
        double p0 = 0.5 * (x0 == 0 ? y0[i].p0 : y0[i].p1) * y1[j].p0;
        double p1 = 0.5 * (x0 == 0 ? y0[i].p1 : y0[i].p0) * y1[j].p1;
        std::size_t idx = (i * m1 + j) * 2 + static_cast<std::size_t>(x0);
        out[idx] = {p0, p1};
        conj[idx] = static_cast<int>(
            (i * m1 + static_cast<std::size_t>(c1[j])) * 2 +
            static_cast<std::size_t>(1 - x0));
      }
    }
  }
  return BmsChannel::discrete(std::move(out), std::move(conj));
}

}  // namespace

BmsChannel star(const BmsChannel& w0, const BmsChannel& w1) {
  if (w0.kind() == BmsChannel::Kind::Bec && w1.kind() == BmsChannel::Kind::Bec) {
    double e0 = w0.param(), e1 = w1.param();
    return BmsChannel::bec(e0 + e1 - e0 * e1);
  }
  return star_tables(w0.as_discrete(), w1.as_discrete());
}

BmsChannel circle(const BmsChannel& w0, const BmsChannel& w1) {
  if (w0.kind() == BmsChannel::Kind::Bec && w1.kind() == BmsChannel::Kind::Bec) {
    return BmsChannel::bec(w0.param() * w1.param());
  }
  return circle_tables(w0.as_discrete(), w1.as_discrete());
}

double capacity(const BmsChannel& w) {
  switch (w.kind()) {
    case BmsChannel::Kind::Bec:
      return 1.0 - w.param();
    case BmsChannel::Kind::Bsc: {
      double p = w.param();
      double h = 0.0;
      if (p > 0.0) h -= p * log2_safe(p);
      if (p < 1.0) h -= (1.0 - p) * log2_safe(1.0 - p);
      return 1.0 - h;
    }
    case BmsChannel::Kind::Discrete: {
      // Per-symbol contribution under uniform input is pair_capacity/2.
      double c = 0.0;
      for (const auto& o : w.outputs()) c += 0.5 * pair_capacity(o.p0, o.p1);
      return c;
    }
  }
  return 0.0;
}

namespace {

struct SymPair {
  double p0;  // toward-zero side mass, p0 >= p1
  double p1;
};

// Decompose a symmetric table into representative pairs; self-conjugate
// outputs are split into two mirrored halves so everything is a pair.
std::vector<SymPair> to_pairs(const BmsChannel& w) {
  std::vector<SymPair> pairs;
  const auto& out = w.outputs();
  const auto& conj = w.conjugate();
  for (std::size_t y = 0; y < out.size(); ++y) {
    double p0 = out[y].p0, p1 = out[y].p1;
    if (p0 + p1 == 0.0) continue;  // unreachable symbol
    int c = conj[y];
    if (static_cast<std::size_t>(c) == y) {
      // Self-conjugate symbol (p0 == p1): split into two mirrored halves.
      pairs.push_back({p0 / 2.0, p1 / 2.0});
    } else if (static_cast<std::size_t>(c) > y) {
      if (p0 >= p1)
        pairs.push_back({p0, p1});
      else
        pairs.push_back({p1, p0});
    }
  }
  return pairs;
}

BmsChannel from_pairs(const std::vector<SymPair>& pairs) {
  std::vector<BmsChannel::Output> out;
  std::vector<int> conj;
  out.reserve(pairs.size() * 2);
  // Each pair {y, conj(y)} contributes p0 + p1 to either input row.
  double row_sum = 0.0;
  for (const auto& p : pairs) row_sum += p.p0 + p.p1;
  // Renormalize away accumulated rounding so row sums stay within tolerance.
  double scale = row_sum > 0.0 ? 1.0 / row_sum : 1.0;
  for (const auto& p : pairs) {
    int base = static_cast<int>(out.size());
    out.push_back({p.p0 * scale, p.p1 * scale});
    out.push_back({p.p1 * scale, p.p0 * scale});
    conj.push_back(base + 1);
    conj.push_back(base);
  }
  return BmsChannel::discrete(std::move(out), std::move(conj));
}

}  // namespace

BmsChannel quantize(const BmsChannel& w, int max_outputs) {
  if (max_outputs < 2) throw std::invalid_argument("max_outputs must be >= 2");
  if (w.kind() != BmsChannel::Kind::Discrete) return w;
  if (w.alphabet_size() <= static_cast<std::size_t>(max_outputs)) return w;

  std::vector<SymPair> pairs = to_pairs(w);
  std::sort(pairs.begin(), pairs.end(), [](const SymPair& a, const SymPair& b) {
    // Descending likelihood ratio p0/p1; compare cross products to dodge 0/0.
    return a.p0 * b.p1 > b.p0 * a.p1;
  });
  std::size_t target = static_cast<std::size_t>(max_outputs) / 2;

  // Doubly linked list over `pairs` with a lazy-deletion min-heap of merge
  // losses between adjacent survivors.
  std::size_t m = pairs.size();
  std::vector<std::size_t> next(m), prev(m);
  std::vector<int> version(m, 0);
  std::vector<bool> alive(m, true);
  for (std::size_t i = 0; i < m; ++i) {
    next[i] = i + 1;
    prev[i] = (i == 0) ? m : i - 1;
  }
  struct Cand {
    double loss;
    std::size_t left;
    int ver;
  };
  auto cmp = [](const Cand& a, const Cand& b) { return a.loss > b.loss; };
  std::priority_queue<Cand, std::vector<Cand>, decltype(cmp)> heap(cmp);
  auto merge_loss = [&](std::size_t i, std::size_t j) {
    return pair_capacity(pairs[i].p0, pairs[i].p1) +
           pair_capacity(pairs[j].p0, pairs[j].p1) -
           pair_capacity(pairs[i].p0 + pairs[j].p0, pairs[i].p1 + pairs[j].p1);
  };
  auto push_cand = [&](std::size_t i) {
    if (i >= m || next[i] >= m) return;
    heap.push({merge_loss(i, next[i]), i, version[i]});
  };
  for (std::size_t i = 0; i + 1 < m; ++i) push_cand(i);

  std::size_t count = m;
  while (count > target && !heap.empty()) {
    Cand c = heap.top();
    heap.pop();
    std::size_t i = c.left;
    if (!alive[i] || c.ver != version[i] || next[i] >= m) continue;
    std::size_t j = next[i];
    pairs[i].p0 += pairs[j].p0;
    pairs[i].p1 += pairs[j].p1;
    alive[j] = false;
    next[i] = next[j];
    if (next[j] < m) prev[next[j]] = i;
    ++version[i];
    --count;
    push_cand(i);
    if (prev[i] < m) {
      ++version[prev[i]];
      push_cand(prev[i]);
    }
  }

  std::vector<SymPair> kept;
  kept.reserve(count);
  for (std::size_t i = 0; i < m; ++i)
    if (alive[i]) kept.push_back(pairs[i]);
  return from_pairs(kept);
}

namespace {

void transform_node(const BbtTree& tree, NodeId id,
                    const std::vector<BmsChannel>& seq, int max_outputs,
                    std::vector<BmsChannel>& leaves) {
  if (tree.is_leaf(id)) {
    leaves[static_cast<std::size_t>(tree.offset_of(id))] = seq[0];
    return;
  }
  int len = tree.length_of(id);
  int half = (len + 1) / 2;
  int rlen = len - half;
  std::vector<BmsChannel> left(static_cast<std::size_t>(half));
  std::vector<BmsChannel> right(static_cast<std::size_t>(rlen));
  for (int i = 0; i < rlen; ++i) {
    left[static_cast<std::size_t>(i)] =
        quantize(star(seq[static_cast<std::size_t>(i)],
                      seq[static_cast<std::size_t>(half + i)]),
                 max_outputs);
    right[static_cast<std::size_t>(i)] =
        quantize(circle(seq[static_cast<std::size_t>(i)],
                        seq[static_cast<std::size_t>(half + i)]),
                 max_outputs);
  }
  if (half > rlen) left[static_cast<std::size_t>(half - 1)] =
      seq[static_cast<std::size_t>(half - 1)];  // odd length: pass-through
  transform_node(tree, BbtTree::left_child(id), left, max_outputs, leaves);
  transform_node(tree, BbtTree::right_child(id), right, max_outputs, leaves);
}

}  // namespace

std::vector<BmsChannel> transform_leaf_channels(const BmsChannel& w,
                                                const BbtTree& tree,
                                                int max_outputs) {
  if (max_outputs < 2) throw std::invalid_argument("max_outputs must be >= 2");
  std::vector<BmsChannel> leaves(
      static_cast<std::size_t>(tree.block_length()), w);
  std::vector<BmsChannel> root_seq(
      static_cast<std::size_t>(tree.block_length()), w);
  transform_node(tree, BbtTree::root(), root_seq, max_outputs, leaves);
  return leaves;
}

std::vector<double> bec_leaf_erasures(double erasure_prob,
                                      const BbtTree& tree) {
  if (erasure_prob < 0.0 || erasure_prob > 1.0)
    throw std::invalid_argument("erasure probability out of [0,1]");
  int n = tree.block_length();
  std::vector<double> leaves(static_cast<std::size_t>(n), 0.0);
  struct Frame {
    NodeId id;
    std::vector<double> seq;
  };
  std::vector<Frame> stack;
  stack.push_back({BbtTree::root(),
                   std::vector<double>(static_cast<std::size_t>(n), erasure_prob)});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (tree.is_leaf(f.id)) {
      leaves[static_cast<std::size_t>(tree.offset_of(f.id))] = f.seq[0];
      continue;
    }
    int len = tree.length_of(f.id);
    int half = (len + 1) / 2;
    int rlen = len - half;
    std::vector<double> left(static_cast<std::size_t>(half));
    std::vector<double> right(static_cast<std::size_t>(rlen));
    for (int i = 0; i < rlen; ++i) {
      double e0 = f.seq[static_cast<std::size_t>(i)];
      double e1 = f.seq[static_cast<std::size_t>(half + i)];
      left[static_cast<std::size_t>(i)] = e0 + e1 - e0 * e1;
      right[static_cast<std::size_t>(i)] = e0 * e1;
    }
    if (half > rlen)
      left[static_cast<std::size_t>(half - 1)] =
          f.seq[static_cast<std::size_t>(half - 1)];
    stack.push_back({BbtTree::left_child(f.id), std::move(left)});
    stack.push_back({BbtTree::right_child(f.id), std::move(right)});
  }
  return leaves;
}

PolarizationStats polarization_stats(const std::vector<double>& capacities,
                                     double a, double b) {
  if (!(a > 0.0 && a < b && b < 1.0))
    throw std::invalid_argument("thresholds must satisfy 0 < a < b < 1");
  if (capacities.empty()) throw std::invalid_argument("empty channel set");
  PolarizationStats st;
  st.a = a;
  st.b = b;
  std::size_t n_psi = 0, n_omega = 0, n_phi = 0;
  double mu = 0.0, mu_c = 0.0, nu = 0.0, nu_c = 0.0;  // Kahan accumulators
  for (double cap : capacities) {
    if (cap < a)
      ++n_psi;
    else if (cap < b)
      ++n_omega;
    else
      ++n_phi;
    double y = cap - mu_c;
    double t = mu + y;
    mu_c = (t - mu) - y;
    mu = t;
    double y2 = cap * cap - nu_c;
    double t2 = nu + y2;
    nu_c = (t2 - nu) - y2;
    nu = t2;
  }
  double total = static_cast<double>(capacities.size());
  st.psi = static_cast<double>(n_psi) / total;
  st.omega = static_cast<double>(n_omega) / total;
  st.phi = static_cast<double>(n_phi) / total;
  st.mu = mu / total;
  st.nu = nu / total;
  return st;
}

PolarizationStats polarization_stats(const std::vector<BmsChannel>& channels,
                                     double a, double b) {
  std::vector<double> caps;
  caps.reserve(channels.size());
  for (const auto& w : channels) caps.push_back(capacity(w));
  return polarization_stats(caps, a, b);
}

ChannelLiteral parse_channel_literal(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("channel literal must look like bec:0.5");
  std::string name = text.substr(0, colon);
  double value = std::stod(text.substr(colon + 1));
  if (name == "bec") return {ChannelLiteral::Model::Bec, value};
  if (name == "bsc") return {ChannelLiteral::Model::Bsc, value};
  if (name == "awgn") return {ChannelLiteral::Model::Awgn, value};
  throw std::invalid_argument("unknown channel model: " + name);
}

}  // namespace bbtpolar
