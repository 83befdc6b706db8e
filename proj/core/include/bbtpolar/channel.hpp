#pragma once

#include <string>
#include <vector>

#include "bbtpolar/tree.hpp"

namespace bbtpolar {

// Binary-input memoryless symmetric channel, closed under the polar
// transforms. BEC and BSC are kept in closed form; everything else falls
// back to an explicit transition table with a conjugate-output pairing
// realizing the symmetry W(y|0) = W(conj(y)|1).
class BmsChannel {
 public:
  enum class Kind { Bec, Bsc, Discrete };

  struct Output {
    double p0 = 0.0;  // W(y|0)
    double p1 = 0.0;  // W(y|1)
  };

  static BmsChannel bec(double erasure_prob);
  static BmsChannel bsc(double crossover_prob);
  // outputs[conjugate[y]] mirrors outputs[y]; self-conjugate allowed when
  // p0 == p1. Validates row sums and the symmetry pairing.
  static BmsChannel discrete(std::vector<Output> outputs,
                             std::vector<int> conjugate);

  Kind kind() const { return kind_; }
  double param() const { return param_; }  // e for BEC, p for BSC
  const std::vector<Output>& outputs() const { return outputs_; }
  const std::vector<int>& conjugate() const { return conjugate_; }
  std::size_t alphabet_size() const;

  // Closed-form table view (BEC: 3 outputs, BSC: 2 outputs).
  BmsChannel as_discrete() const;

 private:
  Kind kind_ = Kind::Bec;
  double param_ = 0.0;
  std::vector<Output> outputs_;
  std::vector<int> conjugate_;
};

// "Upper" synthetic channel W0 * W1 (degraded direction).
BmsChannel star(const BmsChannel& w0, const BmsChannel& w1);
// "Lower" synthetic channel W0 o W1 (upgraded direction).
BmsChannel circle(const BmsChannel& w0, const BmsChannel& w1);

// Symmetric capacity in bits.
double capacity(const BmsChannel& w);

// Capacity-degrading output merge: adjacent outputs in likelihood-ratio
// order are greedily merged (conjugate pairs jointly) until the alphabet
// fits max_outputs. BEC/BSC are returned unchanged.
BmsChannel quantize(const BmsChannel& w, int max_outputs);

inline constexpr int kDefaultMaxOutputs = 64;

// Full root-to-leaves transform over the tree; leaf channels in column
// order. Discrete intermediates are quantized after each level.
std::vector<BmsChannel> transform_leaf_channels(
    const BmsChannel& w, const BbtTree& tree,
    int max_outputs = kDefaultMaxOutputs);

// Exact leaf erasure probabilities for a BEC input (closed form, no
// tables); used both for construction and as the polarization oracle.
std::vector<double> bec_leaf_erasures(double erasure_prob, const BbtTree& tree);

struct PolarizationStats {
  double a = 0.0;
  double b = 0.0;
  double psi = 0.0;    // fraction with I < a
  double omega = 0.0;  // fraction with I in [a, b)
  double phi = 0.0;    // fraction with I >= b
  double mu = 0.0;     // mean capacity
  double nu = 0.0;     // mean squared capacity
};

PolarizationStats polarization_stats(const std::vector<BmsChannel>& channels,
                                     double a, double b);
PolarizationStats polarization_stats(const std::vector<double>& capacities,
                                     double a, double b);

// Channel literal used by the CLI and the simulator: "bec:0.5", "bsc:0.1",
// "awgn:<snr_db>".
struct ChannelLiteral {
  enum class Model { Bec, Bsc, Awgn } model;
  double value = 0.0;
};

ChannelLiteral parse_channel_literal(const std::string& text);

}  // namespace bbtpolar
