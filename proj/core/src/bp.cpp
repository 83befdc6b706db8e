#include "bbtpolar/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bbtpolar {

DecodeMetrics& DecodeMetrics::operator+=(const DecodeMetrics& o) {
  iterations_used += o.iterations_used;
  layers_traversed += o.layers_traversed;
  adds += o.adds;
  mults += o.mults;
  comparisons += o.comparisons;
  lut_accesses += o.lut_accesses;
  return *this;
}

namespace {

double clip_msg(double x) {
  return std::clamp(x, -kBpMessageClip, kBpMessageClip);
}

SubcodeBook build_codebook(const Code& code, NodeId node) {
  const BbtTree& tree = code.tree();
  const NormalGraph& graph = code.graph();
  SubcodeBook book;
  book.node = node;
  book.offset = tree.offset_of(node);
  book.length = tree.length_of(node);
  if (book.length > 24)
    throw std::invalid_argument("leaf subcode too large to enumerate");
  for (int col = book.offset; col < book.offset + book.length; ++col)
    if (code.is_active_leaf(col)) book.active_cols.push_back(col);
  book.k_sub = static_cast<int>(book.active_cols.size());

  const int n = graph.depth();
  const int level = node.level;
  std::vector<std::uint8_t> span(static_cast<std::size_t>(book.length), 0);
  for (std::uint32_t pattern = 0; pattern < (1u << book.k_sub); ++pattern) {
    std::fill(span.begin(), span.end(), 0);
    for (int b = 0; b < book.k_sub; ++b)
      span[static_cast<std::size_t>(book.active_cols[static_cast<std::size_t>(b)] -
                                    book.offset)] = (pattern >> b) & 1u;
    // Encode the span through the subtree stages (all their columns lie
    // inside the span).
    for (int s = n - 1; s >= level; --s) {
      for (const Transform& t : graph.stage_transforms(s)) {
        if (t.upper < book.offset || t.upper >= book.offset + book.length) continue;
        span[static_cast<std::size_t>(t.upper - book.offset)] ^=
            span[static_cast<std::size_t>(t.lower - book.offset)];
      }
    }
    std::uint32_t word = 0;
    for (int q = 0; q < book.length; ++q)
      word |= static_cast<std::uint32_t>(span[static_cast<std::size_t>(q)]) << q;
    book.words.push_back(word);
    book.patterns.push_back(pattern);
    book.index.emplace(word, pattern);
  }
  return book;
}

}  // namespace

namespace {

TruncationInfo make_truncation(const Code& code, const NormalGraph& graph,
                               int tau) {
  const BbtTree& tree = code.tree();
  const int n = graph.depth();
  TruncationInfo info;
  info.tau = tau;
  if (tau == 0) {
    // Full graph: length-1 subcodes, one per column. Enumerated codebooks
    // are trivial and unused by the decoder, but callers can inspect them.
    for (int j = 0; j < tree.block_length(); ++j) {
      SubcodeBook book;
      book.node = tree.leaf_order()[static_cast<std::size_t>(j)];
      book.offset = j;
      book.length = 1;
      if (code.is_active_leaf(j)) {
        book.k_sub = 1;
        book.active_cols = {j};
        book.words = {0u, 1u};
        book.patterns = {0u, 1u};
      } else {
        book.words = {0u};
        book.patterns = {0u};
      }
      for (std::size_t w = 0; w < book.words.size(); ++w)
        book.index.emplace(book.words[w], book.patterns[w]);
      info.leaf_subcodes.push_back(std::move(book));
    }
    return info;
  }
  for (NodeId id : tree.nodes_at_level(n - tau))
    info.leaf_subcodes.push_back(build_codebook(code, id));
  std::sort(info.leaf_subcodes.begin(), info.leaf_subcodes.end(),
            [](const SubcodeBook& a, const SubcodeBook& b) {
              return a.offset < b.offset;
            });
  return info;
}

}  // namespace

TruncationInfo derive_truncation(const Code& code, const NormalGraph& graph,
                                 int l_max) {
  const BbtTree& tree = code.tree();
  const int n = graph.depth();
  if (l_max < 1 || l_max > tree.block_length())
    throw std::invalid_argument("l_max out of [1, N]");
  int tau = 0;
  for (int cand = n; cand >= 0; --cand) {
    int max_len = 0;
    if (n - cand == n) {
      max_len = 1;  // bottom layer: leaves and duplicates only
    } else {
      for (NodeId id : tree.nodes_at_level(n - cand))
        max_len = std::max(max_len, tree.length_of(id));
    }
    if (max_len <= l_max) {
      tau = cand;
      break;
    }
  }
  return make_truncation(code, graph, tau);
}

namespace {

double max_star(double a, double b, BpConfig::FMode mode, DecodeMetrics* m) {
  if (mode == BpConfig::FMode::MinSum) {
    if (m) ++m->comparisons;
    return std::max(a, b);
  }
  if (m) {
    ++m->adds;
    ++m->lut_accesses;
  }
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

std::vector<double> app_extrinsic(const SubcodeBook& book,
                                  const std::vector<double>& down_llrs,
                                  BpConfig::FMode f_mode,
                                  DecodeMetrics* metrics) {
  if (book.words.empty()) throw std::invalid_argument("empty codebook");
  const int len = book.length;
  if (static_cast<int>(down_llrs.size()) != len)
    throw std::invalid_argument("down LLR length mismatch");
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> l0(static_cast<std::size_t>(len), ninf);
  std::vector<double> l1(static_cast<std::size_t>(len), ninf);
  for (std::uint32_t word : book.words) {
    double metric = 0.0;
    for (int q = 0; q < len; ++q) {
      double d = down_llrs[static_cast<std::size_t>(q)];
      metric += ((word >> q) & 1u) ? -0.5 * d : 0.5 * d;
    }
    if (metrics) metrics->adds += len;
    for (int p = 0; p < len; ++p) {
      auto& dst = ((word >> p) & 1u) ? l1[static_cast<std::size_t>(p)]
                                     : l0[static_cast<std::size_t>(p)];
      dst = (dst == ninf) ? metric : max_star(dst, metric, f_mode, metrics);
    }
  }
  std::vector<double> out(static_cast<std::size_t>(len));
  for (int p = 0; p < len; ++p) {
    double a = l0[static_cast<std::size_t>(p)];
    double b = l1[static_cast<std::size_t>(p)];
    double u;
    if (a == ninf)
      u = -kBpMessageClip;  // bit is 1 in every codeword
    else if (b == ninf)
      u = kBpMessageClip;  // bit is 0 in every codeword
    else
      u = a - b - down_llrs[static_cast<std::size_t>(p)];
    if (metrics) {
      metrics->adds += 2;
      ++metrics->comparisons;  // output clip
    }
    out[static_cast<std::size_t>(p)] = clip_msg(u);
  }
  return out;
}

BpDecoder::BpDecoder(const Code& code, BpConfig config)
    : code_(code), config_(config) {
  if (config_.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be >= 1");
  trunc_ = derive_truncation(code_, code_.graph(), config_.max_leaf_subcode);
  if (config_.tau_override) {
    if (*config_.tau_override < 0 || *config_.tau_override > code_.graph().depth())
      throw std::invalid_argument("tau override out of range");
    if (*config_.tau_override != trunc_.tau)
      trunc_ = make_truncation(code_, code_.graph(), *config_.tau_override);
  }
}

namespace {

// Standard BP butterfly updates specialized to this graph, reconstructed
// from the encoding relations B[i][u] = B[i+1][u] xor B[i+1][l] and
// B[i][l] = B[i+1][l]:
//   upward:   U[i][u] = f(U[i+1][u], U[i+1][l] + D[i][l])
//             U[i][l] = f(U[i+1][u], D[i][u]) + U[i+1][l]
//   downward: D[i+1][u] = f(D[i][u], U[i+1][l] + D[i][l])
//             D[i+1][l] = f(D[i][u], U[i+1][u]) + D[i][l]
// Pass-through edges copy messages unchanged.
template <bool MinSum>
double f_kernel(double a, double b) {
  if constexpr (MinSum)
    return f_llr_minsum(a, b);
  else
    return f_llr(a, b);
}

template <bool MinSum>
void up_stage(const NormalGraph& graph, int i, MessageState& st,
              DecodeMetrics& m) {
  const int width = st.width;
  const double* u1 = st.up.data() + static_cast<std::size_t>(i + 1) * width;
  double* u0 = st.up.data() + static_cast<std::size_t>(i) * width;
  const double* d0 = st.down.data() + static_cast<std::size_t>(i) * width;
  const auto& ts = graph.stage_transforms(i);
  for (const Transform& t : ts) {
    u0[t.upper] = clip_msg(f_kernel<MinSum>(u1[t.upper], u1[t.lower] + d0[t.lower]));
    u0[t.lower] = clip_msg(f_kernel<MinSum>(u1[t.upper], d0[t.upper]) + u1[t.lower]);
  }
  for (const PassThrough& p : graph.stage_passes(i)) u0[p.index] = u1[p.index];
  auto count = static_cast<std::int64_t>(ts.size());
  m.adds += 2 * count;
  m.comparisons += 2 * count;  // clips
  if constexpr (MinSum)
    m.comparisons += 2 * count;
  else {
    m.mults += 2 * count;
    m.lut_accesses += 2 * count;
  }
}

template <bool MinSum>
void down_stage(const NormalGraph& graph, int i, MessageState& st,
                DecodeMetrics& m) {
  const int width = st.width;
  const double* u1 = st.up.data() + static_cast<std::size_t>(i + 1) * width;
  double* d1 = st.down.data() + static_cast<std::size_t>(i + 1) * width;
  const double* d0 = st.down.data() + static_cast<std::size_t>(i) * width;
  const auto& ts = graph.stage_transforms(i);
  for (const Transform& t : ts) {
    d1[t.upper] = clip_msg(f_kernel<MinSum>(d0[t.upper], u1[t.lower] + d0[t.lower]));
    d1[t.lower] = clip_msg(f_kernel<MinSum>(d0[t.upper], u1[t.upper]) + d0[t.lower]);
  }
  for (const PassThrough& p : graph.stage_passes(i)) d1[p.index] = d0[p.index];
  auto count = static_cast<std::int64_t>(ts.size());
  m.adds += 2 * count;
  m.comparisons += 2 * count;
  if constexpr (MinSum)
    m.comparisons += 2 * count;
  else {
    m.mults += 2 * count;
    m.lut_accesses += 2 * count;
  }
}

}  // namespace

bool BpDecoder::check_constraints(const std::vector<std::uint8_t>& b) const {
  const NormalGraph& graph = code_.graph();
  const int width = graph.width();
  const int bottom = graph.depth() - trunc_.tau;
  auto at = [&](int i, int j) -> std::uint8_t {
    return b[static_cast<std::size_t>(i) * width + j];
  };
  for (int i = 0; i < bottom; ++i) {
    for (const Transform& t : graph.stage_transforms(i)) {
      if (at(i, t.upper) != (at(i + 1, t.upper) ^ at(i + 1, t.lower))) return false;
      if (at(i, t.lower) != at(i + 1, t.lower)) return false;
    }
    for (const PassThrough& p : graph.stage_passes(i))
      if (at(i, p.index) != at(i + 1, p.index)) return false;
  }
  for (const SubcodeBook& book : trunc_.leaf_subcodes) {
    std::uint32_t word = 0;
    for (int q = 0; q < book.length; ++q)
      word |= static_cast<std::uint32_t>(at(bottom, book.offset + q)) << q;
    if (!book.index.count(word)) return false;
  }
  return true;
}

BpResult BpDecoder::decode(const std::vector<double>& channel_llrs) const {
  const NormalGraph& graph = code_.graph();
  const int n = graph.depth();
  const int width = graph.width();
  if (static_cast<int>(channel_llrs.size()) != width)
    throw std::invalid_argument("LLR length mismatch");
  const int bottom = n - trunc_.tau;
  const bool minsum = config_.f_mode == BpConfig::FMode::MinSum;

  BpResult res;
  MessageState& st = res.state;
  st.layers = n + 1;
  st.width = width;
  st.up.assign(static_cast<std::size_t>(n + 1) * width, 0.0);
  st.down.assign(static_cast<std::size_t>(n + 1) * width, 0.0);
  for (int j = 0; j < width; ++j) st.d(0, j) = clip_msg(channel_llrs[static_cast<std::size_t>(j)]);
  for (int j = 0; j < width; ++j)
    st.u(n, j) = code_.is_active_leaf(j) ? 0.0 : kFrozenPrior;

  DecodeMetrics& m = res.metrics;
  auto run_up = [&](int i) {
    if (minsum)
      up_stage<true>(graph, i, st, m);
    else
      up_stage<false>(graph, i, st, m);
  };
  auto run_down = [&](int i) {
    if (minsum)
      down_stage<true>(graph, i, st, m);
    else
      down_stage<false>(graph, i, st, m);
  };

  // Seed the sub-graph boundary from the fixed layer-n priors.
  for (int i = n - 1; i >= bottom; --i) run_up(i);
  m.layers_traversed += trunc_.tau;

  std::vector<std::uint8_t> decisions(static_cast<std::size_t>(n + 1) * width, 0);
  auto harden = [&]() {
    for (int i = 0; i <= bottom; ++i)
      for (int j = 0; j < width; ++j)
        decisions[static_cast<std::size_t>(i) * width + j] =
            (st.d(i, j) + st.u(i, j) <= 0.0) ? 1 : 0;
  };

  std::vector<double> span_llrs;
  res.converged = false;
  for (int iter = 1; iter <= config_.max_iterations; ++iter) {
    m.iterations_used = iter;
    for (int i = bottom - 1; i >= 0; --i) run_up(i);
    for (int i = 0; i < bottom; ++i) run_down(i);
    m.layers_traversed += 2 * bottom;
    if (trunc_.tau > 0) {
      for (const SubcodeBook& book : trunc_.leaf_subcodes) {
        span_llrs.assign(static_cast<std::size_t>(book.length), 0.0);
        for (int q = 0; q < book.length; ++q)
          span_llrs[static_cast<std::size_t>(q)] = st.d(bottom, book.offset + q);
        std::vector<double> u = app_extrinsic(book, span_llrs, config_.f_mode, &m);
        for (int q = 0; q < book.length; ++q)
          st.u(bottom, book.offset + q) = u[static_cast<std::size_t>(q)];
      }
      m.layers_traversed += 1;
    }
    if (config_.early_stop) {
      harden();
      if (check_constraints(decisions)) {
        res.converged = true;
        break;
      }
    }
  }
  if (!res.converged) harden();

  res.codeword.assign(decisions.begin(), decisions.begin() + width);
  // Message extraction: invert the layer-(n-tau) spans back to leaf bits.
  Bits leaf_bits(static_cast<std::size_t>(width), 0);
  if (trunc_.tau == 0) {
    for (int j = 0; j < width; ++j)
      leaf_bits[static_cast<std::size_t>(j)] =
          decisions[static_cast<std::size_t>(n) * width + j];
  } else {
    for (const SubcodeBook& book : trunc_.leaf_subcodes) {
      std::uint32_t pattern = 0;
      std::uint32_t word = 0;
      for (int q = 0; q < book.length; ++q)
        word |= static_cast<std::uint32_t>(
                    decisions[static_cast<std::size_t>(bottom) * width +
                              book.offset + q])
                << q;
      auto hit = book.index.find(word);
      if (hit != book.index.end()) {
        pattern = hit->second;
      } else {
        // No valid span: fall back to the best codeword under the final
        // downward messages.
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < book.words.size(); ++idx) {
          double metric = 0.0;
          for (int q = 0; q < book.length; ++q) {
            double d = st.d(bottom, book.offset + q);
            metric += ((book.words[idx] >> q) & 1u) ? -d : d;
          }
          if (metric > best) {
            best = metric;
            pattern = book.patterns[idx];
          }
        }
      }
      for (int bidx = 0; bidx < book.k_sub; ++bidx)
        leaf_bits[static_cast<std::size_t>(
            book.active_cols[static_cast<std::size_t>(bidx)])] =
            (pattern >> bidx) & 1u;
    }
  }
  res.message.reserve(code_.spec().info_set.size());
  for (int idx : code_.spec().info_set)
    res.message.push_back(leaf_bits[static_cast<std::size_t>(idx)]);
  return res;
}

BpResult bp_decode(const Code& code, const BpConfig& config,
                   const std::vector<double>& channel_llrs) {
  return BpDecoder(code, config).decode(channel_llrs);
}

}  // namespace bbtpolar
