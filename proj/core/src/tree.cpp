#include "bbtpolar/tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "bbtpolar/prng.hpp"

namespace bbtpolar {

namespace {

int ceil_log2(int n) {
  int d = 0;
  while ((1 << d) < n) ++d;
  return d;
}

}  // namespace

BbtTree::BbtTree(int block_length) : n_total_(block_length) {
  if (block_length < 1) throw std::invalid_argument("block length must be >= 1");
  depth_ = ceil_log2(block_length);
  lengths_.resize(depth_ + 1);
  offsets_.resize(depth_ + 1);
  for (int s = 0; s <= depth_; ++s) {
    lengths_[s].assign(std::size_t{1} << s, 0);
    offsets_[s].assign(std::size_t{1} << s, 0);
  }
  lengths_[0][0] = block_length;
  offsets_[0][0] = 0;
  for (int s = 0; s < depth_; ++s) {
    for (int t = 0; t < (1 << s); ++t) {
      int len = lengths_[s][t];
      if (len < 2) continue;
      int half = (len + 1) / 2;
      lengths_[s + 1][2 * t] = half;
      offsets_[s + 1][2 * t] = offsets_[s][t];
      lengths_[s + 1][2 * t + 1] = len - half;
      offsets_[s + 1][2 * t + 1] = offsets_[s][t] + half;
    }
  }
  // Leaves in column order; column j is the unique leaf with offset j.
  leaf_order_.resize(block_length);
  for (int s = 0; s <= depth_; ++s) {
    for (int t = 0; t < (1 << s); ++t) {
      NodeId id{s, t};
      if (lengths_[s][t] == 1 && is_leaf(id)) leaf_order_[offsets_[s][t]] = id;
    }
  }
}

bool BbtTree::exists(NodeId id) const {
  return id.level >= 0 && id.level <= depth_ && id.pos >= 0 &&
         id.pos < (1 << id.level) && lengths_[id.level][id.pos] > 0;
}

bool BbtTree::is_leaf(NodeId id) const {
  if (!exists(id)) return false;
  if (lengths_[id.level][id.pos] > 1) return false;
  return true;
}

int BbtTree::length_of(NodeId id) const {
  if (!exists(id)) throw std::out_of_range("node does not exist");
  return lengths_[id.level][id.pos];
}

int BbtTree::offset_of(NodeId id) const {
  if (!exists(id)) throw std::out_of_range("node does not exist");
  return offsets_[id.level][id.pos];
}

std::vector<NodeId> BbtTree::nodes_at_level(int level) const {
  std::vector<NodeId> out;
  if (level < 0 || level > depth_) return out;
  for (int t = 0; t < (1 << level); ++t)
    if (lengths_[level][t] > 0) out.push_back({level, t});
  return out;
}

BbtTree build_tree(int block_length) { return BbtTree(block_length); }

namespace {

std::vector<int> keyed_permutation(std::uint64_t seed, NodeId id, int size) {
  std::vector<int> perm(size);
  for (int i = 0; i < size; ++i) perm[i] = i;
  SplitMix64 rng(mix_key(seed, static_cast<std::uint64_t>(id.level),
                         static_cast<std::uint64_t>(id.pos)));
  for (int i = size - 1; i > 0; --i) {
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

const std::vector<int>& NormalGraph::interleaver(NodeId id) const {
  return interleavers_.at(id.level).at(id.pos);
}

NormalGraph build_normal_graph(const BbtTree& tree,
                               std::optional<std::uint64_t> interleaver_seed) {
  NormalGraph g;
  const int n = tree.depth();
  g.width_ = tree.block_length();
  g.depth_ = n;
  g.seeded_ = interleaver_seed.has_value();
  g.stage_transforms_.resize(std::max(n, 0));
  g.stage_passes_.resize(std::max(n, 0));
  g.interleavers_.resize(n + 1);
  for (int s = 0; s <= n; ++s)
    g.interleavers_[s].resize(std::size_t{1} << s);

  for (int s = 0; s < n; ++s) {
    for (NodeId id : tree.nodes_at_level(s)) {
      int len = tree.length_of(id);
      int c = tree.offset_of(id);
      if (len == 1) {
        // Penultimate-level leaf: duplicated straight down to the last layer.
        for (int i = s; i < n; ++i) g.stage_passes_[i].push_back({i, c});
        continue;
      }
      int half = (len + 1) / 2;  // left-child length, also padded-right length
      int rlen = len - half;
      std::vector<int> perm(half);
      if (interleaver_seed) {
        perm = keyed_permutation(*interleaver_seed, id, half);
      } else {
        for (int k = 0; k < half; ++k) perm[k] = k;
      }
      g.interleavers_[s][id.pos] = perm;
      for (int k = 0; k < half; ++k) {
        if (perm[k] < rlen) {
          g.stage_transforms_[s].push_back({s, c + k, c + half + perm[k]});
        } else {
          // k combines with the zero pad: the left-child bit passes through.
          g.stage_passes_[s].push_back({s, c + k});
        }
      }
    }
    std::sort(g.stage_transforms_[s].begin(), g.stage_transforms_[s].end(),
              [](const Transform& a, const Transform& b) { return a.upper < b.upper; });
    std::sort(g.stage_passes_[s].begin(), g.stage_passes_[s].end(),
              [](const PassThrough& a, const PassThrough& b) { return a.index < b.index; });
    for (const Transform& t : g.stage_transforms_[s]) g.transforms_.push_back(t);
    for (const PassThrough& p : g.stage_passes_[s]) g.passes_.push_back(p);
  }
  return g;
}

SubsetLabeling label_subsets(int block_length) {
  BbtTree tree = build_tree(block_length);
  NormalGraph graph = build_normal_graph(tree, std::nullopt);
  const int n = tree.depth();
  SubsetLabeling out;
  out.delta = n;
  out.labels.assign(static_cast<std::size_t>(block_length), 0);
  // Replay the stages channel-wise: the lower (equality) output of stage s
  // acquires stage index s, everything else keeps its label.
  for (int s = 0; s < n; ++s)
    for (const Transform& t : graph.stage_transforms(s))
      out.labels[static_cast<std::size_t>(t.lower)] |= (1u << s);
  return out;
}

std::uint64_t sperner_bound(int delta) {
  if (delta < 0) throw std::invalid_argument("delta must be >= 0");
  std::uint64_t result = 1;
  int k = delta / 2;
  for (int i = 1; i <= k; ++i)
    result = result * static_cast<std::uint64_t>(delta - k + i) /
             static_cast<std::uint64_t>(i);
  return result;
}

}  // namespace bbtpolar
