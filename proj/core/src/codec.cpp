#include "bbtpolar/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace bbtpolar {

void CodeSpec::validate() const {
  if (block_length < 1) throw std::invalid_argument("block length must be >= 1");
  if (static_cast<int>(info_set.size()) > block_length)
    throw std::invalid_argument("K exceeds N");
  int prev = -1;
  for (int idx : info_set) {
    if (idx <= prev) throw std::invalid_argument("info set must be sorted and unique");
    if (idx < 0 || idx >= block_length)
      throw std::invalid_argument("info set index out of range");
    prev = idx;
  }
  if (flavor == CodeFlavor::Ibbt && !interleaver_seed)
    throw std::invalid_argument("IBBT spec requires an interleaver seed");
  if (flavor == CodeFlavor::Bbt && interleaver_seed)
    throw std::invalid_argument("BBT spec must not carry an interleaver seed");
}

CodeSpec CodeSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CodeSpec spec;
  spec.block_length = j.at("n").get<int>();
  spec.info_set = j.at("info_set").get<std::vector<int>>();
  std::sort(spec.info_set.begin(), spec.info_set.end());
  std::string flavor = j.value("flavor", std::string("bbt"));
  if (flavor == "bbt")
    spec.flavor = CodeFlavor::Bbt;
  else if (flavor == "ibbt")
    spec.flavor = CodeFlavor::Ibbt;
  else
    throw std::invalid_argument("flavor must be \"bbt\" or \"ibbt\"");
  if (j.contains("seed") && !j.at("seed").is_null())
    spec.interleaver_seed = j.at("seed").get<std::uint64_t>();
  // K is defined by the info set; an explicit k must agree.
  if (j.contains("k") && j.at("k").get<int>() != spec.dimension())
    throw std::invalid_argument("k does not match |info_set|");
  spec.validate();
  return spec;
}

std::string CodeSpec::to_json() const {
  nlohmann::json j;
  j["n"] = block_length;
  j["k"] = dimension();
  j["info_set"] = info_set;
  j["flavor"] = flavor == CodeFlavor::Bbt ? "bbt" : "ibbt";
  if (interleaver_seed) j["seed"] = *interleaver_seed;
  return j.dump();
}

double f_llr(double a, double b) {
  double s = a + b;
  double d = a - b;
  return std::max(s, 0.0) - std::max(a, b) + std::log1p(std::exp(-std::abs(s))) -
         std::log1p(std::exp(-std::abs(d)));
}

double f_llr_minsum(double a, double b) {
  double m = std::min(std::abs(a), std::abs(b));
  return (a < 0.0) == (b < 0.0) ? m : -m;
}

double g_llr(double a, double b, int c) { return c ? b - a : b + a; }

Code::Code(CodeSpec spec)
    : spec_(std::move(spec)),
      tree_((spec_.validate(), spec_.block_length)),
      graph_(build_normal_graph(tree_, spec_.flavor == CodeFlavor::Ibbt
                                           ? spec_.interleaver_seed
                                           : std::nullopt)) {
  active_.assign(static_cast<std::size_t>(spec_.block_length), 0);
  for (int idx : spec_.info_set) active_[static_cast<std::size_t>(idx)] = 1;
}

Bits Code::encode_full(const Bits& leaf_bits) const {
  if (static_cast<int>(leaf_bits.size()) != spec_.block_length)
    throw std::invalid_argument("leaf assignment length mismatch");
  Bits x = leaf_bits;
  for (int s = graph_.depth() - 1; s >= 0; --s)
    for (const Transform& t : graph_.stage_transforms(s))
      x[static_cast<std::size_t>(t.upper)] ^= x[static_cast<std::size_t>(t.lower)];
  return x;
}

Bits Code::encode(const Bits& message) const {
  if (static_cast<int>(message.size()) != dimension())
    throw std::invalid_argument("message length mismatch");
  Bits x(static_cast<std::size_t>(spec_.block_length), 0);
  for (std::size_t i = 0; i < spec_.info_set.size(); ++i)
    x[static_cast<std::size_t>(spec_.info_set[i])] = message[i];
  return encode_full(x);
}

namespace {

struct ScWorkspace {
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<std::uint8_t>> beta;

  explicit ScWorkspace(const BbtTree& tree) {
    int n = tree.depth();
    alpha.resize(static_cast<std::size_t>(n) + 1);
    beta.resize(static_cast<std::size_t>(n) + 1);
    int len = tree.block_length();
    for (int s = 0; s <= n; ++s) {
      alpha[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(len));
      beta[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(len));
      len = (len + 1) / 2;
    }
  }
};

}  // namespace

// Shared SC recursion. LeafFn(column, llr) -> hard bit for each leaf, in
// depth-first (ascending column) order.
template <typename LeafFn>
static void sc_recurse(const BbtTree& tree, const NormalGraph& graph,
                       NodeId id, ScWorkspace& ws, LeafFn&& leaf_fn) {
  const std::size_t s = static_cast<std::size_t>(id.level);
  if (tree.is_leaf(id)) {
    ws.beta[s][0] = leaf_fn(tree.offset_of(id), ws.alpha[s][0]);
    return;
  }
  const int len = tree.length_of(id);
  const int half = (len + 1) / 2;
  const int rlen = len - half;
  const std::vector<int>& perm = graph.interleaver(id);
  auto& alpha = ws.alpha[s];
  auto& alpha_child = ws.alpha[s + 1];
  auto& beta = ws.beta[s];
  auto& beta_child = ws.beta[s + 1];

  for (int k = 0; k < half; ++k) {
    alpha_child[static_cast<std::size_t>(k)] =
        perm[static_cast<std::size_t>(k)] < rlen
            ? f_llr(alpha[static_cast<std::size_t>(k)],
                    alpha[static_cast<std::size_t>(half + perm[static_cast<std::size_t>(k)])])
            : alpha[static_cast<std::size_t>(k)];
  }
  sc_recurse(tree, graph, BbtTree::left_child(id), ws, leaf_fn);
  // Left child decisions, kept across the right-child recursion.
  std::copy_n(beta_child.begin(), half, beta.begin());

  for (int k = 0; k < half; ++k) {
    int j = perm[static_cast<std::size_t>(k)];
    if (j < rlen) {
      alpha_child[static_cast<std::size_t>(j)] =
          g_llr(alpha[static_cast<std::size_t>(k)],
                alpha[static_cast<std::size_t>(half + j)],
                beta[static_cast<std::size_t>(k)]);
    }
  }
  sc_recurse(tree, graph, BbtTree::right_child(id), ws, leaf_fn);

  for (int k = 0; k < half; ++k) {
    int j = perm[static_cast<std::size_t>(k)];
    if (j < rlen) beta[static_cast<std::size_t>(k)] ^= beta_child[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < rlen; ++j)
    beta[static_cast<std::size_t>(half + j)] = beta_child[static_cast<std::size_t>(j)];
}

ScResult Code::sc_decode(const std::vector<double>& channel_llrs) const {
  if (static_cast<int>(channel_llrs.size()) != spec_.block_length)
    throw std::invalid_argument("LLR length mismatch");
  ScWorkspace ws(tree_);
  for (std::size_t j = 0; j < channel_llrs.size(); ++j)
    ws.alpha[0][j] = std::clamp(channel_llrs[j], -kChannelLlrClip, kChannelLlrClip);
  Bits leaves(static_cast<std::size_t>(spec_.block_length), 0);
  sc_recurse(tree_, graph_, BbtTree::root(), ws,
             [&](int col, double llr) -> std::uint8_t {
               std::uint8_t bit = 0;
               if (active_[static_cast<std::size_t>(col)]) bit = llr <= 0.0 ? 1 : 0;
               leaves[static_cast<std::size_t>(col)] = bit;
               return bit;
             });
  ScResult res;
  res.message.reserve(spec_.info_set.size());
  for (int idx : spec_.info_set)
    res.message.push_back(leaves[static_cast<std::size_t>(idx)]);
  res.codeword.assign(ws.beta[0].begin(),
                      ws.beta[0].begin() + spec_.block_length);
  return res;
}

void Code::sc_genie(const std::vector<double>& channel_llrs,
                    const Bits& true_leaf_bits,
                    std::vector<std::uint32_t>& error_counts) const {
  if (static_cast<int>(channel_llrs.size()) != spec_.block_length ||
      static_cast<int>(true_leaf_bits.size()) != spec_.block_length ||
      static_cast<int>(error_counts.size()) != spec_.block_length)
    throw std::invalid_argument("genie input length mismatch");
  ScWorkspace ws(tree_);
  for (std::size_t j = 0; j < channel_llrs.size(); ++j)
    ws.alpha[0][j] = std::clamp(channel_llrs[j], -kChannelLlrClip, kChannelLlrClip);
  sc_recurse(tree_, graph_, BbtTree::root(), ws,
             [&](int col, double llr) -> std::uint8_t {
               std::uint8_t decided = llr <= 0.0 ? 1 : 0;
               std::uint8_t truth = true_leaf_bits[static_cast<std::size_t>(col)];
               if (decided != truth) ++error_counts[static_cast<std::size_t>(col)];
               return truth;  // genie correction
             });
}

std::vector<Bits> Code::generator_matrix() const {
  std::vector<Bits> rows;
  rows.reserve(static_cast<std::size_t>(spec_.block_length));
  for (int j = 0; j < spec_.block_length; ++j) {
    Bits e(static_cast<std::size_t>(spec_.block_length), 0);
    e[static_cast<std::size_t>(j)] = 1;
    rows.push_back(encode_full(e));
  }
  return rows;
}

std::vector<Bits> Code::generator_rows() const {
  std::vector<Bits> rows;
  rows.reserve(spec_.info_set.size());
  for (int j : spec_.info_set) {
    Bits e(static_cast<std::size_t>(spec_.block_length), 0);
    e[static_cast<std::size_t>(j)] = 1;
    rows.push_back(encode_full(e));
  }
  return rows;
}

Bits encode(const CodeSpec& spec, const Bits& message) {
  return Code(spec).encode(message);
}

ScResult sc_decode(const CodeSpec& spec, const std::vector<double>& llrs) {
  return Code(spec).sc_decode(llrs);
}

std::vector<Bits> generator_matrix(const CodeSpec& spec) {
  return Code(spec).generator_matrix();
}

Bits parse_bit_string(const std::string& text) {
  Bits bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0')
      bits.push_back(0);
    else if (c == '1')
      bits.push_back(1);
    else if (c != ' ' && c != '\t' && c != '\r' && c != '\n')
      throw std::invalid_argument("bit strings may contain only 0 and 1");
  }
  return bits;
}

std::string format_bit_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (std::uint8_t b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace bbtpolar
