#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbtpolar/tree.hpp"

namespace bbtpolar {

using Bits = std::vector<std::uint8_t>;

enum class CodeFlavor { Bbt, Ibbt };

// Everything defining one concrete code. The frozen set is the complement
// of info_set. K = |info_set| always; an interleaver seed is required for
// IBBT and forbidden for BBT.
struct CodeSpec {
  int block_length = 1;
  std::vector<int> info_set;  // sorted ascending
  CodeFlavor flavor = CodeFlavor::Bbt;
  std::optional<std::uint64_t> interleaver_seed;

  int dimension() const { return static_cast<int>(info_set.size()); }

  void validate() const;

  static CodeSpec from_json(const std::string& text);
  std::string to_json() const;
};

// Saturation clip applied to raw channel LLRs before SC processing.
inline constexpr double kChannelLlrClip = 1e30;

// f(a,b) = ln((1+e^{a+b})/(e^a+e^b)), evaluated in the max-plus rearranged
// form so saturated inputs take their limit values.
double f_llr(double a, double b);
// Min-sum surrogate sign(a)sign(b)min(|a|,|b|).
double f_llr_minsum(double a, double b);
// g(a,b,c) = b + (-1)^c a.
double g_llr(double a, double b, int c);

struct ScResult {
  Bits message;
  Bits codeword;
};

// One constructed code: tree, interleaved normal graph, leaf activity.
// Immutable after construction; encode/decode are const and reentrant.
class Code {
 public:
  explicit Code(CodeSpec spec);

  const CodeSpec& spec() const { return spec_; }
  const BbtTree& tree() const { return tree_; }
  const NormalGraph& graph() const { return graph_; }
  int block_length() const { return spec_.block_length; }
  int dimension() const { return spec_.dimension(); }
  bool is_active_leaf(int leaf) const { return active_[static_cast<std::size_t>(leaf)]; }

  // Message bits go to active leaves in ascending leaf order, frozen
  // leaves are zero; the root vector is the codeword.
  Bits encode(const Bits& message) const;
  // Leaf assignment -> codeword with every leaf treated as active.
  Bits encode_full(const Bits& leaf_bits) const;

  // Depth-first successive cancellation. Ties (alpha == 0) decide bit 1.
  ScResult sc_decode(const std::vector<double>& channel_llrs) const;

  // Genie-aided SC against a known transmitted leaf assignment: counts a
  // leaf error whenever the leaf LLR favors the wrong bit, then forces the
  // correct bit. Used by Monte-Carlo construction.
  void sc_genie(const std::vector<double>& channel_llrs,
                const Bits& true_leaf_bits,
                std::vector<std::uint32_t>& error_counts) const;

  // Row j = encode_full(e_j); invertible over GF(2).
  std::vector<Bits> generator_matrix() const;
  // The K rows indexed by the info set.
  std::vector<Bits> generator_rows() const;

 private:
  CodeSpec spec_;
  BbtTree tree_;
  NormalGraph graph_;
  std::vector<std::uint8_t> active_;  // per leaf column
};

// Free-function forms for one-shot use.
Bits encode(const CodeSpec& spec, const Bits& message);
ScResult sc_decode(const CodeSpec& spec, const std::vector<double>& llrs);
std::vector<Bits> generator_matrix(const CodeSpec& spec);

// 0/1 ASCII helpers shared by the CLI and tests.
Bits parse_bit_string(const std::string& text);
std::string format_bit_string(const Bits& bits);

}  // namespace bbtpolar
