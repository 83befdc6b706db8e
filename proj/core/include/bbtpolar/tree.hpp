#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace bbtpolar {

// Tree node address: level s (root = 0), position t within the level.
// Children of (s,t) are (s+1,2t) and (s+1,2t+1).
struct NodeId {
  int level = 0;
  int pos = 0;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

// Balanced binary tree over a block of length N: each internal node of
// length l splits into a left child of length ceil(l/2) and a right child
// of length floor(l/2). Leaves all have length 1 and sit on the last two
// levels. Nodes are stored densely per level (0 marks an absent slot).
class BbtTree {
 public:
  explicit BbtTree(int block_length);

  int block_length() const { return n_total_; }
  int depth() const { return depth_; }  // n = ceil(log2 N)

  bool exists(NodeId id) const;
  bool is_leaf(NodeId id) const;
  int length_of(NodeId id) const;
  // First column of the node's contiguous span; spans of the two children
  // partition the parent span, left first.
  int offset_of(NodeId id) const;

  static NodeId root() { return {0, 0}; }
  static NodeId left_child(NodeId id) { return {id.level + 1, 2 * id.pos}; }
  static NodeId right_child(NodeId id) { return {id.level + 1, 2 * id.pos + 1}; }

  // Leaves left to right; leaf i occupies column i.
  const std::vector<NodeId>& leaf_order() const { return leaf_order_; }

  // All nodes of one level, ascending position.
  std::vector<NodeId> nodes_at_level(int level) const;

 private:
  int n_total_;
  int depth_;
  std::vector<std::vector<int>> lengths_;  // [level][pos], 0 = absent
  std::vector<std::vector<int>> offsets_;
  std::vector<NodeId> leaf_order_;
};

BbtTree build_tree(int block_length);

// One polar transform between layers `layer` and `layer`+1 of the normal
// graph, acting on columns `upper` (sum node) and `lower` (equality node):
//   B[layer][upper] = B[layer+1][upper] xor B[layer+1][lower]
//   B[layer][lower] = B[layer+1][lower]
struct Transform {
  int layer = 0;
  int upper = 0;
  int lower = 0;

  friend bool operator==(const Transform&, const Transform&) = default;
};

// Plain copy edge between adjacent layers (odd-length unpaired channel, or
// the duplicate introduced for a penultimate-level leaf):
//   B[layer][index] = B[layer+1][index]
struct PassThrough {
  int layer = 0;
  int index = 0;

  friend bool operator==(const PassThrough&, const PassThrough&) = default;
};

// Layered normal-graph form of the tree: n+1 layers of N variable nodes.
// Layer 0 carries the codeword, layer n the leaf assignment. Per-node
// interleavers permute the (zero-padded) right-child vector before the
// bitwise combination; identity interleavers reproduce the plain graph.
class NormalGraph {
 public:
  int layers() const { return depth_ + 1; }
  int width() const { return width_; }
  int depth() const { return depth_; }

  const std::vector<Transform>& transforms() const { return transforms_; }
  const std::vector<PassThrough>& pass_throughs() const { return passes_; }

  // Edges between layers `stage` and `stage`+1, ascending upper index.
  const std::vector<Transform>& stage_transforms(int stage) const {
    return stage_transforms_[stage];
  }
  const std::vector<PassThrough>& stage_passes(int stage) const {
    return stage_passes_[stage];
  }

  // Interleaver of internal node (s,t), size ceil(l/2); identity when the
  // graph was built without a seed. permuted[k] = padded_right[perm[k]].
  const std::vector<int>& interleaver(NodeId id) const;
  bool has_interleavers() const { return seeded_; }

 private:
  friend NormalGraph build_normal_graph(const BbtTree&,
                                        std::optional<std::uint64_t>);
  int width_ = 0;
  int depth_ = 0;
  bool seeded_ = false;
  std::vector<Transform> transforms_;
  std::vector<PassThrough> passes_;
  std::vector<std::vector<Transform>> stage_transforms_;
  std::vector<std::vector<PassThrough>> stage_passes_;
  std::vector<std::vector<std::vector<int>>> interleavers_;  // [level][pos]
};

// Seed absent: all interleavers identity. Seed present: each internal node
// gets an independent Fisher-Yates permutation keyed by (seed, level, pos).
NormalGraph build_normal_graph(const BbtTree& tree,
                               std::optional<std::uint64_t> interleaver_seed);

// Subset labels attached to the l channel positions after all polarization
// stages of a length-l block; delta = ceil(log2 l) stages, labels are
// subsets of {0,...,delta-1} encoded as bit masks.
struct SubsetLabeling {
  int delta = 0;
  std::vector<std::uint32_t> labels;
};

SubsetLabeling label_subsets(int block_length);

// Largest antichain in the subset lattice of a delta-stage block:
// C(delta, floor(delta/2)).
std::uint64_t sperner_bound(int delta);

}  // namespace bbtpolar
