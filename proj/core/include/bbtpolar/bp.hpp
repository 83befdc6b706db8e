#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bbtpolar/codec.hpp"

namespace bbtpolar {

// Message saturation for all computed BP/APP messages.
inline constexpr double kBpMessageClip = 40.0;
// Fixed prior on frozen leaf positions; deliberately outside the clip so a
// fully saturated channel can never flip a frozen decision.
inline constexpr double kFrozenPrior = 1e30;

struct BpConfig {
  int max_iterations = 50;
  int max_leaf_subcode = 1;  // l_max
  bool early_stop = true;
  enum class FMode { Exact, MinSum } f_mode = FMode::Exact;
  // Diagnostic: force the truncation depth instead of deriving it.
  std::optional<int> tau_override;
};

// Operation counters per decoded frame. Counting convention: an exact f
// evaluation costs 1 multiplication and 1 LUT access, a min-sum f costs 1
// comparison; every explicit addition costs 1 add; every computed message
// write costs 1 comparison (saturation clip); an exact max-star costs 1
// add and 1 LUT access (1 comparison instead under min-sum); APP codeword
// correlations cost the subcode length in adds per codeword. Pass-through
// copies, hard decisions, and constraint checks are not counted.
struct DecodeMetrics {
  std::int64_t iterations_used = 0;
  std::int64_t layers_traversed = 0;
  std::int64_t adds = 0;
  std::int64_t mults = 0;
  std::int64_t comparisons = 0;
  std::int64_t lut_accesses = 0;

  DecodeMetrics& operator+=(const DecodeMetrics& o);
};

// Up/down LLR lattices over the (n+1) x N normal graph. down[0][*] and
// up[n][*] are fixed by initialization.
struct MessageState {
  int layers = 0;
  int width = 0;
  std::vector<double> up;
  std::vector<double> down;

  double& u(int i, int j) { return up[static_cast<std::size_t>(i) * width + j]; }
  double& d(int i, int j) { return down[static_cast<std::size_t>(i) * width + j]; }
  double u(int i, int j) const { return up[static_cast<std::size_t>(i) * width + j]; }
  double d(int i, int j) const { return down[static_cast<std::size_t>(i) * width + j]; }
};

// Enumerated codebook of one leaf subcode: the 2^k_sub codewords of the
// subtree rooted at `node`, plus the active-leaf pattern generating each.
struct SubcodeBook {
  NodeId node;
  int offset = 0;  // first column of the span
  int length = 0;
  int k_sub = 0;
  std::vector<std::uint32_t> words;     // codeword bit masks, LSB = span bit 0
  std::vector<std::uint32_t> patterns;  // active-leaf bits per word
  std::vector<int> active_cols;         // global leaf columns, ascending
  std::unordered_map<std::uint32_t, std::uint32_t> index;  // word -> pattern
};

struct TruncationInfo {
  int tau = 0;
  std::vector<SubcodeBook> leaf_subcodes;
};

// Largest tau such that every node at layer n - tau has length <= l_max,
// with the enumerated codebooks of the layer-(n-tau) subcodes.
TruncationInfo derive_truncation(const Code& code, const NormalGraph& graph,
                                 int l_max);

// Extrinsic APP update of one subcode: U_p = L_p(0) - L_p(1) - D_p with
// the codeword log-sums accumulated max-star style. Output clipped.
std::vector<double> app_extrinsic(const SubcodeBook& book,
                                  const std::vector<double>& down_llrs,
                                  BpConfig::FMode f_mode = BpConfig::FMode::Exact,
                                  DecodeMetrics* metrics = nullptr);

struct BpResult {
  Bits codeword;
  Bits message;
  DecodeMetrics metrics;
  bool converged = false;
  MessageState state;  // final lattices, for diagnostics and tests
};

class BpDecoder {
 public:
  BpDecoder(const Code& code, BpConfig config);

  const TruncationInfo& truncation() const { return trunc_; }
  const BpConfig& config() const { return config_; }

  BpResult decode(const std::vector<double>& channel_llrs) const;

  // True iff the hard decisions satisfy every sum/equality constraint of
  // the sub-normal graph and every layer-(n-tau) span is a codeword of its
  // subcode. `decisions` is layer-major, (n+1) x N, layers above n - tau
  // ignored when tau > 0.
  bool check_constraints(const std::vector<std::uint8_t>& decisions) const;

 private:
  const Code& code_;
  BpConfig config_;
  TruncationInfo trunc_;
};

// One-shot convenience wrapper.
BpResult bp_decode(const Code& code, const BpConfig& config,
                   const std::vector<double>& channel_llrs);

}  // namespace bbtpolar
