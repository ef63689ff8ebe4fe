#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "sumimo/rng.hpp"

namespace sumimo {

// Rate-1/2 parallel-concatenated convolutional code. Two identical
// recursive systematic encoders; parity streams alternately punctured.
// Polynomials are octal with bit i holding the coefficient of D^i,
// so the defaults are feedback 1 + D + D^2 and feedforward 1 + D^2.
struct TurboConfig {
  int constraint_memory = 2;
  unsigned generator_feedforward = 05;
  unsigned generator_feedback = 07;
  int iterations = 8;
  std::uint64_t interleaver_seed = 7;
};

struct CodedFrame {
  std::vector<std::uint8_t> data_bits;
  std::vector<std::uint8_t> coded_bits;  // 2x data length, systematic bits at even positions
};

// LLR convention, fixed project-wide: positive favors bit 0.
struct SoftFrame {
  std::vector<double> llrs;
};

constexpr double kLlrClamp = 50.0;

inline double clamp_llr(double x) {
  if (x > kLlrClamp) return kLlrClamp;
  if (x < -kLlrClamp) return -kLlrClamp;
  return x;
}

// Parity-preserving pseudo-random permutation: even positions shuffle among
// even sources and odd among odd, so alternate parity puncturing leaves
// every information bit covered by exactly one parity stream.
inline std::vector<std::size_t> make_interleaver(std::size_t length, std::uint64_t seed) {
  if (length < 2) throw std::invalid_argument("make_interleaver: length must be >= 2");
  std::vector<std::size_t> perm(length);
  for (std::size_t i = 0; i < length; ++i) perm[i] = i;
  Rng rng(seed);
  for (std::size_t parity = 0; parity < 2; ++parity) {
    std::vector<std::size_t> slots;
    for (std::size_t i = parity; i < length; i += 2) slots.push_back(i);
    for (std::size_t k = slots.size(); k > 1; --k) {
      const std::size_t j = rng.below(k);
      std::swap(perm[slots[k - 1]], perm[slots[j]]);
    }
  }
  return perm;
}

// Trellis of one recursive systematic constituent encoder.
struct RscTrellis {
  int memory = 0;
  int n_states = 0;
  std::vector<int> next_state;  // indexed [state*2 + input]
  std::vector<int> parity;      // indexed [state*2 + input]

  explicit RscTrellis(const TurboConfig& cfg) {
    if (cfg.constraint_memory < 1)
      throw std::invalid_argument("RscTrellis: constraint memory must be >= 1");
    if (cfg.generator_feedforward == 0 || cfg.generator_feedback == 0)
      throw std::invalid_argument("RscTrellis: generator polynomials must be nonzero");
    memory = cfg.constraint_memory;
    n_states = 1 << memory;
    next_state.resize(static_cast<std::size_t>(n_states) * 2);
    parity.resize(static_cast<std::size_t>(n_states) * 2);
    for (int s = 0; s < n_states; ++s) {
      for (int u = 0; u < 2; ++u) {
        // State bit i-1 holds the register input from i steps back.
        const int fb = u ^ taps(cfg.generator_feedback >> 1, s);
        const int par = ((cfg.generator_feedforward & 1u) ? fb : 0) ^
                        taps(cfg.generator_feedforward >> 1, s);
        next_state[static_cast<std::size_t>(s) * 2 + u] = ((s << 1) | fb) & (n_states - 1);
        parity[static_cast<std::size_t>(s) * 2 + u] = par;
      }
    }
  }

  static int taps(unsigned poly, int state) {
    return std::popcount(poly & static_cast<unsigned>(state)) & 1;
  }

  // Parity stream for one frame; encoder starts in the all-zero state and
  // is left unterminated.
  std::vector<std::uint8_t> encode_parity(std::span<const std::uint8_t> in) const {
    std::vector<std::uint8_t> out(in.size());
    int s = 0;
    for (std::size_t k = 0; k < in.size(); ++k) {
      const int u = in[k] & 1;
      const std::size_t idx = static_cast<std::size_t>(s) * 2 + u;
      out[k] = static_cast<std::uint8_t>(parity[idx]);
      s = next_state[idx];
    }
    return out;
  }
};

// max*(a, b) = log(e^a + e^b), the exact Jacobian form.
inline double max_star(double a, double b) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double hi = a > b ? a : b;
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// Log-MAP forward/backward pass over an unterminated RSC trellis.
// Takes channel LLRs for systematic and parity bits plus a priori LLRs,
// returns the full a posteriori LLR per information bit. The initial state
// is the all-zero state; the final state gets a uniform prior.
inline std::vector<double> bcjr_app(const RscTrellis& trellis, std::span<const double> sys_llr,
                                    std::span<const double> par_llr,
                                    std::span<const double> apriori_llr) {
  const std::size_t len = sys_llr.size();
  if (par_llr.size() != len || apriori_llr.size() != len)
    throw std::invalid_argument("bcjr_app: input length mismatch");
  const int n_states = trellis.n_states;
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();

  const auto branch_metric = [&](std::size_t t, int s, int u) {
    const double xu = u ? -1.0 : 1.0;
    const double xc = trellis.parity[static_cast<std::size_t>(s) * 2 + u] ? -1.0 : 1.0;
    return 0.5 * (xu * (sys_llr[t] + apriori_llr[t]) + xc * par_llr[t]);
  };

  std::vector<double> alpha((len + 1) * n_states, neg_inf);
  alpha[0] = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    const double* cur = &alpha[t * n_states];
    double* nxt = &alpha[(t + 1) * n_states];
    for (int s = 0; s < n_states; ++s) {
      if (cur[s] == neg_inf) continue;
      for (int u = 0; u < 2; ++u) {
        const int ns = trellis.next_state[static_cast<std::size_t>(s) * 2 + u];
        nxt[ns] = max_star(nxt[ns], cur[s] + branch_metric(t, s, u));
      }
    }
    double peak = neg_inf;
    for (int s = 0; s < n_states; ++s) peak = std::max(peak, nxt[s]);
    for (int s = 0; s < n_states; ++s) nxt[s] -= peak;
  }

  std::vector<double> app(len);
  std::vector<double> beta_next(static_cast<std::size_t>(n_states), 0.0);
  std::vector<double> beta_cur(static_cast<std::size_t>(n_states));
  for (std::size_t t = len; t-- > 0;) {
    const double* a = &alpha[t * n_states];
    double num0 = neg_inf;
    double num1 = neg_inf;
    for (int s = 0; s < n_states; ++s) {
      beta_cur[s] = neg_inf;
      for (int u = 0; u < 2; ++u) {
        const int ns = trellis.next_state[static_cast<std::size_t>(s) * 2 + u];
        const double g = branch_metric(t, s, u);
        beta_cur[s] = max_star(beta_cur[s], g + beta_next[ns]);
        if (a[s] == neg_inf) continue;
        const double metric = a[s] + g + beta_next[ns];
        if (u == 0)
          num0 = max_star(num0, metric);
        else
          num1 = max_star(num1, metric);
      }
    }
    app[t] = num0 - num1;
    double peak = neg_inf;
    for (int s = 0; s < n_states; ++s) peak = std::max(peak, beta_cur[s]);
    for (int s = 0; s < n_states; ++s) beta_cur[s] -= peak;
    beta_next.swap(beta_cur);
  }
  return app;
}

// Encoder/decoder pair bound to one frame length. Immutable after
// construction; decoding different frames concurrently is safe.
class TurboCodec {
 public:
  TurboCodec(const TurboConfig& cfg, std::size_t frame_len)
      : cfg_(cfg),
        trellis_(cfg),
        frame_len_(frame_len),
        perm_(make_interleaver(frame_len, cfg.interleaver_seed)) {
    if (cfg.iterations < 1) throw std::invalid_argument("TurboCodec: iterations must be >= 1");
  }

  std::size_t frame_len() const { return frame_len_; }
  std::size_t coded_len() const { return 2 * frame_len_; }
  const std::vector<std::size_t>& interleaver() const { return perm_; }

  CodedFrame encode(std::span<const std::uint8_t> data) const {
    if (data.empty()) throw std::invalid_argument("encode: empty input");
    if (data.size() != frame_len_)
      throw std::invalid_argument("encode: data length does not match codec frame length");
    const auto p1 = trellis_.encode_parity(data);
    std::vector<std::uint8_t> permuted(frame_len_);
    for (std::size_t t = 0; t < frame_len_; ++t) permuted[t] = data[perm_[t]];
    const auto p2 = trellis_.encode_parity(permuted);

    CodedFrame out;
    out.data_bits.assign(data.begin(), data.end());
    out.coded_bits.resize(2 * frame_len_);
    for (std::size_t k = 0; k < frame_len_; ++k) {
      out.coded_bits[2 * k] = data[k];
      out.coded_bits[2 * k + 1] = (k % 2 == 0) ? p1[k] : p2[k];
    }
    return out;
  }

  // Iterative decoding with extrinsic exchange; hard decisions after
  // cfg.iterations rounds.
  std::vector<std::uint8_t> decode(const SoftFrame& soft) const {
    if (soft.llrs.size() % 2 != 0)
      throw std::invalid_argument("decode: LLR count must be even");
    if (soft.llrs.size() != coded_len())
      throw std::invalid_argument("decode: LLR count does not match interleaver length");
    const std::size_t len = frame_len_;

    std::vector<double> sys(len), par1(len, 0.0), par2(len, 0.0), sys2(len);
    for (std::size_t k = 0; k < len; ++k) {
      sys[k] = clamp_llr(soft.llrs[2 * k]);
      const double lp = clamp_llr(soft.llrs[2 * k + 1]);
      if (k % 2 == 0)
        par1[k] = lp;
      else
        par2[k] = lp;
    }
    for (std::size_t t = 0; t < len; ++t) sys2[t] = sys[perm_[t]];

    std::vector<double> ext1(len, 0.0), ext2(len, 0.0);
    std::vector<double> apriori1(len, 0.0), apriori2(len);
    for (int it = 0; it < cfg_.iterations; ++it) {
      for (std::size_t t = 0; t < len; ++t) apriori1[perm_[t]] = ext2[t];
      const auto app1 = bcjr_app(trellis_, sys, par1, apriori1);
      for (std::size_t k = 0; k < len; ++k) ext1[k] = clamp_llr(app1[k] - sys[k] - apriori1[k]);

      for (std::size_t t = 0; t < len; ++t) apriori2[t] = ext1[perm_[t]];
      const auto app2 = bcjr_app(trellis_, sys2, par2, apriori2);
      for (std::size_t t = 0; t < len; ++t) ext2[t] = clamp_llr(app2[t] - sys2[t] - apriori2[t]);
    }

    std::vector<std::uint8_t> bits(len);
    for (std::size_t t = 0; t < len; ++t) apriori1[perm_[t]] = ext2[t];
    for (std::size_t k = 0; k < len; ++k) {
      const double app = sys[k] + ext1[k] + apriori1[k];
      bits[k] = app >= 0.0 ? 0 : 1;
    }
    return bits;
  }

 private:
  TurboConfig cfg_;
  RscTrellis trellis_;
  std::size_t frame_len_;
  std::vector<std::size_t> perm_;
};

}  // namespace sumimo
