#pragma once

#include "sumimo/link.hpp"

namespace sumimo {

// Matched-filter output for one raw channel use: y = H^H received plus the
// diagonal gains needed for combining.
struct MatchedFilterOutput {
  std::vector<Complex> y;          // length n_t
  std::vector<double> diag_gain;   // F_{i,i} per transmit stream
};

// Unprecoded transmission: received = H s + w.
inline ChannelUse transmit_raw(const SymbolVector& s, const LinkConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.mode != LinkMode::raw)
    throw std::invalid_argument("transmit_raw: config mode is not raw");
  if (static_cast<int>(s.symbols.size()) != cfg.n_t)
    throw std::invalid_argument("transmit_raw: symbol vector must have n_t entries");
  ChannelUse cu{LinkMode::raw, draw_channel(cfg, rng), draw_noise(cfg, rng), {}};
  cu.received = mat_vec_mul(cu.h, s.symbols);
  for (int i = 0; i < cfg.n_r; ++i) cu.received[static_cast<std::size_t>(i)] += cu.w[static_cast<std::size_t>(i)];
  return cu;
}

inline MatchedFilterOutput matched_filter(const ChannelUse& cu) {
  if (cu.mode != LinkMode::raw)
    throw std::invalid_argument("matched_filter: channel use was not produced in raw mode");
  MatchedFilterOutput out;
  out.y = mat_vec_mul(hermitian(cu.h), cu.received);
  out.diag_gain.resize(static_cast<std::size_t>(cu.h.cols));
  for (int i = 0; i < cu.h.cols; ++i) out.diag_gain[static_cast<std::size_t>(i)] = raw_diag_gain(cu.h, i);
  return out;
}

// Splits the i-th matched-filter output into desired, interference and
// filtered-noise parts; they sum back to y[i] up to rounding.
inline Decomposition decompose_raw(const ChannelUse& cu, const SymbolVector& s, int i) {
  if (cu.mode != LinkMode::raw)
    throw std::invalid_argument("decompose_raw: channel use was not produced in raw mode");
  const int n_r = cu.h.rows;
  const int n_t = cu.h.cols;
  if (i < 0 || i >= n_t) throw std::out_of_range("decompose_raw: index out of range");
  if (static_cast<int>(s.symbols.size()) != n_t)
    throw std::invalid_argument("decompose_raw: symbol vector must have n_t entries");

  Decomposition d{};
  d.desired = raw_diag_gain(cu.h, i) * s.symbols[static_cast<std::size_t>(i)];
  Complex interference{};
  for (int j = 0; j < n_t; ++j) {
    if (j == i) continue;
    Complex f{};  // F_{i,j} = sum_l conj(H_{l,i}) H_{l,j}
    for (int l = 0; l < n_r; ++l) f += std::conj(cu.h(l, i)) * cu.h(l, j);
    interference += f * s.symbols[static_cast<std::size_t>(j)];
  }
  d.interference = interference;
  Complex noise{};  // V_i = sum_j conj(H_{j,i}) w_j
  for (int j = 0; j < n_r; ++j) noise += std::conj(cu.h(j, i)) * cu.w[static_cast<std::size_t>(j)];
  d.noise = noise;
  return d;
}

inline CombinedObservation combine_raw(std::span<const MatchedFilterOutput> outputs,
                                       const LinkConfig& cfg) {
  if (outputs.empty()) throw std::invalid_argument("combine_raw: no matched-filter outputs");
  if (static_cast<int>(outputs.size()) != cfg.n_rt)
    throw std::invalid_argument("combine_raw: expected exactly n_rt outputs");
  const int n = cfg.n_t;
  CombinedObservation obs{std::vector<double>(static_cast<std::size_t>(n), 0.0),
                          std::vector<Complex>(static_cast<std::size_t>(n)), cfg.n_rt};
  for (const auto& mf : outputs) {
    if (static_cast<int>(mf.y.size()) != n)
      throw std::invalid_argument("combine_raw: inconsistent output length");
    for (int i = 0; i < n; ++i) {
      obs.y[static_cast<std::size_t>(i)] += mf.y[static_cast<std::size_t>(i)];
      obs.gain[static_cast<std::size_t>(i)] += mf.diag_gain[static_cast<std::size_t>(i)];
    }
  }
  for (int i = 0; i < n; ++i) {
    obs.y[static_cast<std::size_t>(i)] /= cfg.n_rt;
    obs.gain[static_cast<std::size_t>(i)] /= cfg.n_rt;
  }
  return obs;
}

}  // namespace sumimo
