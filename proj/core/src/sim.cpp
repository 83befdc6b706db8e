#include "bbtpolar/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace bbtpolar {

double sigma_from_snr_db(double snr_db, SnrConvention convention, double rate) {
  double lin = std::pow(10.0, snr_db / 10.0);
  double denom = convention == SnrConvention::EbN0 ? 2.0 * rate * lin : 2.0 * lin;
  if (denom <= 0.0) throw std::invalid_argument("nonpositive SNR denominator");
  return std::sqrt(1.0 / denom);
}

std::vector<double> bpsk_awgn_llr(const Bits& codeword, double sigma,
                                  SplitMix64& rng) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  std::vector<double> llrs(codeword.size());
  double scale = 2.0 / (sigma * sigma);
  for (std::size_t j = 0; j < codeword.size(); ++j) {
    double y = (codeword[j] ? -1.0 : 1.0) + sigma * rng.gaussian();
    llrs[j] = scale * y;
  }
  return llrs;
}

namespace {

constexpr std::int64_t kChunkFrames = 256;

struct FrameOutcome {
  std::uint8_t frame_error = 0;
  std::int32_t bit_errors = 0;
  DecodeMetrics metrics;
};

// Static operation counts for one SC pass over the tree, under the same
// accounting as the BP counters (f: 1 mult + 1 LUT, g: 1 add).
DecodeMetrics sc_static_metrics(const BbtTree& tree) {
  DecodeMetrics m;
  m.iterations_used = 1;
  m.layers_traversed = tree.depth() + 1;
  std::int64_t pairs = 0;
  for (int s = 0; s < tree.depth(); ++s)
    for (NodeId id : tree.nodes_at_level(s)) {
      int len = tree.length_of(id);
      if (len >= 2) pairs += len / 2;
    }
  m.mults = pairs;       // f evaluations
  m.lut_accesses = pairs;
  m.adds = pairs;        // g evaluations
  return m;
}

}  // namespace

std::vector<FerPoint> run_fer(const Code& code, const SimConfig& config) {
  if (config.snr_points_db.empty())
    throw std::invalid_argument("need at least one SNR point");
  if (config.max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
  const int n_bits = code.dimension();
  const int n = code.block_length();
  const double rate = static_cast<double>(n_bits) / static_cast<double>(n);
  const int threads = std::max(config.threads, 1);

  std::optional<BpDecoder> bp;
  if (config.decoder == DecoderKind::Bp) bp.emplace(code, config.bp);
  const DecodeMetrics sc_metrics = sc_static_metrics(code.tree());

  std::vector<FerPoint> points;
  for (std::size_t pi = 0; pi < config.snr_points_db.size(); ++pi) {
    const double snr_db = config.snr_points_db[pi];
    const double sigma = sigma_from_snr_db(snr_db, config.convention, rate);

    auto run_frame = [&](std::int64_t frame, FrameOutcome& out) {
      SplitMix64 rng(mix_key(config.seed, pi, static_cast<std::uint64_t>(frame)));
      Bits message(static_cast<std::size_t>(n_bits));
      for (auto& b : message) b = rng.bit() ? 1 : 0;
      Bits codeword = code.encode(message);
      std::vector<double> llrs = bpsk_awgn_llr(codeword, sigma, rng);
      Bits decoded;
      if (config.decoder == DecoderKind::Sc) {
        decoded = code.sc_decode(llrs).message;
        out.metrics = sc_metrics;
      } else {
        BpResult res = bp->decode(llrs);
        decoded = std::move(res.message);
        out.metrics = res.metrics;
      }
      out.bit_errors = 0;
      for (int i = 0; i < n_bits; ++i)
        out.bit_errors += decoded[static_cast<std::size_t>(i)] !=
                          message[static_cast<std::size_t>(i)];
      out.frame_error = out.bit_errors > 0 ? 1 : 0;
    };

    FerPoint pt;
    pt.snr_db = snr_db;
    pt.convention = config.convention;
    DecodeMetrics metric_sum;
    std::vector<FrameOutcome> chunk(static_cast<std::size_t>(kChunkFrames));
    std::int64_t next_frame = 0;
    while (next_frame < config.max_frames) {
      std::int64_t count = std::min(kChunkFrames, config.max_frames - next_frame);
      if (threads == 1 || count < 2 * threads) {
        for (std::int64_t f = 0; f < count; ++f)
          run_frame(next_frame + f, chunk[static_cast<std::size_t>(f)]);
      } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
          std::int64_t lo = count * w / threads;
          std::int64_t hi = count * (w + 1) / threads;
          pool.emplace_back([&, lo, hi]() {
            for (std::int64_t f = lo; f < hi; ++f)
              run_frame(next_frame + f, chunk[static_cast<std::size_t>(f)]);
          });
        }
        for (auto& t : pool) t.join();
      }
      // Frame-order reduction; identical for any thread count.
      for (std::int64_t f = 0; f < count; ++f) {
        const FrameOutcome& o = chunk[static_cast<std::size_t>(f)];
        pt.frame_errors += o.frame_error;
        pt.bit_errors += o.bit_errors;
        metric_sum += o.metrics;
      }
      next_frame += count;
      pt.frames = next_frame;
      if (config.max_frame_errors > 0 && pt.frame_errors >= config.max_frame_errors)
        break;
    }
    double frames = static_cast<double>(pt.frames);
    pt.fer = static_cast<double>(pt.frame_errors) / frames;
    pt.ber = n_bits > 0
                 ? static_cast<double>(pt.bit_errors) / (frames * n_bits)
                 : 0.0;
    pt.iters_avg = static_cast<double>(metric_sum.iterations_used) / frames;
    pt.layers_avg = static_cast<double>(metric_sum.layers_traversed) / frames;
    pt.adds_avg = static_cast<double>(metric_sum.adds) / frames;
    pt.mults_avg = static_cast<double>(metric_sum.mults) / frames;
    pt.cmps_avg = static_cast<double>(metric_sum.comparisons) / frames;
    pt.luts_avg = static_cast<double>(metric_sum.lut_accesses) / frames;
    points.push_back(pt);
  }
  return points;
}

namespace {

std::vector<int> order_by_rate(const std::vector<double>& rates) {
  std::vector<int> order(rates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (rates[static_cast<std::size_t>(a)] != rates[static_cast<std::size_t>(b)])
      return rates[static_cast<std::size_t>(a)] < rates[static_cast<std::size_t>(b)];
    return a < b;
  });
  return order;
}

}  // namespace

ConstructionResult mc_construct(int block_length, const ChannelLiteral& channel,
                                std::int64_t trials, std::uint64_t seed,
                                SnrConvention convention, double snr_rate,
                                int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  CodeSpec spec;
  spec.block_length = block_length;  // all-frozen: genie ignores activity
  Code code(spec);
  const int n = block_length;
  const Bits zeros(static_cast<std::size_t>(n), 0);

  double sigma = 0.0;
  double bsc_llr = 0.0;
  switch (channel.model) {
    case ChannelLiteral::Model::Awgn:
      sigma = sigma_from_snr_db(channel.value, convention, snr_rate);
      break;
    case ChannelLiteral::Model::Bsc: {
      double p = channel.value;
      if (p < 0.0 || p > 0.5) throw std::invalid_argument("BSC p out of [0,1/2]");
      bsc_llr = p > 0.0 ? std::log((1.0 - p) / p) : kChannelLlrClip;
      break;
    }
    case ChannelLiteral::Model::Bec:
      if (channel.value < 0.0 || channel.value > 1.0)
        throw std::invalid_argument("BEC e out of [0,1]");
      break;
  }

  const int workers = std::max(threads, 1);
  std::vector<std::vector<std::uint32_t>> counts(
      static_cast<std::size_t>(workers),
      std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0));
  auto worker = [&](int w) {
    std::vector<double> llrs(static_cast<std::size_t>(n));
    for (std::int64_t t = w; t < trials; t += workers) {
      SplitMix64 rng(mix_key(seed, 0x6d63u, static_cast<std::uint64_t>(t)));
      switch (channel.model) {
        case ChannelLiteral::Model::Awgn: {
          double scale = 2.0 / (sigma * sigma);
          for (int j = 0; j < n; ++j)
            llrs[static_cast<std::size_t>(j)] =
                scale * (1.0 + sigma * rng.gaussian());
          break;
        }
        case ChannelLiteral::Model::Bsc:
          for (int j = 0; j < n; ++j) {
            bool flip = rng.uniform01() < channel.value;
            llrs[static_cast<std::size_t>(j)] = flip ? -bsc_llr : bsc_llr;
          }
          break;
        case ChannelLiteral::Model::Bec:
          for (int j = 0; j < n; ++j) {
            bool erased = rng.uniform01() < channel.value;
            llrs[static_cast<std::size_t>(j)] = erased ? 0.0 : kChannelLlrClip;
          }
          break;
      }
      code.sc_genie(llrs, zeros, counts[static_cast<std::size_t>(w)]);
    }
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  ConstructionResult res;
  res.error_rates.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    std::uint64_t total = 0;
    for (int w = 0; w < workers; ++w)
      total += counts[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)];
    res.error_rates[static_cast<std::size_t>(j)] =
        static_cast<double>(total) / static_cast<double>(trials);
  }
  res.reliability_order = order_by_rate(res.error_rates);
  return res;
}

ConstructionResult bec_construct(int block_length, double erasure_prob) {
  BbtTree tree = build_tree(block_length);
  ConstructionResult res;
  res.error_rates = bec_leaf_erasures(erasure_prob, tree);
  res.reliability_order = order_by_rate(res.error_rates);
  return res;
}

CodeSpec spec_from_order(int block_length, int dimension,
                         const std::vector<int>& reliability_order,
                         CodeFlavor flavor,
                         std::optional<std::uint64_t> interleaver_seed) {
  if (dimension < 0 || dimension > block_length)
    throw std::invalid_argument("dimension out of range");
  if (static_cast<int>(reliability_order.size()) != block_length)
    throw std::invalid_argument("reliability order size mismatch");
  CodeSpec spec;
  spec.block_length = block_length;
  spec.flavor = flavor;
  spec.interleaver_seed = interleaver_seed;
  spec.info_set.assign(reliability_order.begin(),
                       reliability_order.begin() + dimension);
  std::sort(spec.info_set.begin(), spec.info_set.end());
  spec.validate();
  return spec;
}

}  // namespace bbtpolar
