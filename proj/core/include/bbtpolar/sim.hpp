#pragma once

#include <cstdint>
#include <vector>

#include "bbtpolar/bp.hpp"
#include "bbtpolar/channel.hpp"
#include "bbtpolar/codec.hpp"
#include "bbtpolar/prng.hpp"

namespace bbtpolar {

enum class SnrConvention { EbN0, EsN0 };
enum class DecoderKind { Sc, Bp };

// sigma for unit-energy antipodal signaling. EbN0 folds in the code rate;
// EsN0 ignores it.
double sigma_from_snr_db(double snr_db, SnrConvention convention, double rate);

struct SimConfig {
  std::vector<double> snr_points_db;
  SnrConvention convention = SnrConvention::EbN0;
  std::int64_t max_frames = 10000;
  std::int64_t max_frame_errors = 0;  // 0: run all frames
  std::uint64_t seed = 0;
  DecoderKind decoder = DecoderKind::Sc;
  BpConfig bp;
  int threads = 1;
};

struct FerPoint {
  double snr_db = 0.0;
  SnrConvention convention = SnrConvention::EbN0;
  std::int64_t frames = 0;
  std::int64_t frame_errors = 0;
  std::int64_t bit_errors = 0;
  double fer = 0.0;
  double ber = 0.0;
  double iters_avg = 0.0;
  double layers_avg = 0.0;
  double adds_avg = 0.0;
  double mults_avg = 0.0;
  double cmps_avg = 0.0;
  double luts_avg = 0.0;
};

// BPSK (0 -> +1, 1 -> -1) over AWGN; returns LLRs 2y/sigma^2 so positive
// means bit 0.
std::vector<double> bpsk_awgn_llr(const Bits& codeword, double sigma,
                                  SplitMix64& rng);

// Monte-Carlo FER/BER per SNR point. Every frame's randomness is a pure
// function of (seed, point index, frame index); frames run in fixed-size
// chunks and reduce in frame order, so results do not depend on the thread
// count. Stops a point after max_frames, or at the first chunk boundary
// where frame_errors >= max_frame_errors.
std::vector<FerPoint> run_fer(const Code& code, const SimConfig& config);

struct ConstructionResult {
  std::vector<double> error_rates;     // per leaf, estimated or exact
  std::vector<int> reliability_order;  // most reliable first, ties by index
};

// Genie-aided SC bit-channel error estimation: all-zero transmission; at
// each leaf an error is counted when the LLR favors the wrong bit, then
// the correct bit is forced. `snr_rate` only matters for the EbN0 reading
// of an awgn literal.
ConstructionResult mc_construct(int block_length, const ChannelLiteral& channel,
                                std::int64_t trials, std::uint64_t seed,
                                SnrConvention convention = SnrConvention::EsN0,
                                double snr_rate = 0.5, int threads = 1);

// Exact closed-form BEC recursion.
ConstructionResult bec_construct(int block_length, double erasure_prob);

// Spec with the K most reliable leaves active.
CodeSpec spec_from_order(int block_length, int dimension,
                         const std::vector<int>& reliability_order,
                         CodeFlavor flavor,
                         std::optional<std::uint64_t> interleaver_seed);

}  // namespace bbtpolar
