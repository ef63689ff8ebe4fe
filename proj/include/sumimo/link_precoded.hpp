#pragma once

#include "sumimo/link.hpp"

namespace sumimo {

// Precoded transmission: received = H H^H s + w, with fresh channel and
// noise realizations drawn on every call.
inline ChannelUse transmit_precoded(const SymbolVector& s, const LinkConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.mode != LinkMode::precoded)
    throw std::invalid_argument("transmit_precoded: config mode is not precoded");
  if (static_cast<int>(s.symbols.size()) != cfg.n_r)
    throw std::invalid_argument("transmit_precoded: symbol vector must have n_r entries");
  ChannelUse cu{LinkMode::precoded, draw_channel(cfg, rng), draw_noise(cfg, rng), {}};
  const auto shaped = mat_vec_mul(hermitian(cu.h), s.symbols);
  cu.received = mat_vec_mul(cu.h, shaped);
  for (int i = 0; i < cfg.n_r; ++i) cu.received[static_cast<std::size_t>(i)] += cu.w[static_cast<std::size_t>(i)];
  return cu;
}

// Splits received[i] into desired gain term, inter-stream interference and
// noise. The three parts sum back to received[i] up to rounding.
inline Decomposition decompose(const ChannelUse& cu, const SymbolVector& s, int i) {
  if (cu.mode != LinkMode::precoded)
    throw std::invalid_argument("decompose: channel use was not produced in precoded mode");
  const int n_r = cu.h.rows;
  const int n_t = cu.h.cols;
  if (i < 0 || i >= n_r) throw std::out_of_range("decompose: index out of range");
  if (static_cast<int>(s.symbols.size()) != n_r)
    throw std::invalid_argument("decompose: symbol vector must have n_r entries");

  Decomposition d{};
  d.desired = precoded_diag_gain(cu.h, i) * s.symbols[static_cast<std::size_t>(i)];
  Complex interference{};
  for (int j = 0; j < n_r; ++j) {
    if (j == i) continue;
    Complex f{};  // F_{i,j} = sum_l H_{i,l} conj(H_{j,l})
    for (int l = 0; l < n_t; ++l) f += cu.h(i, l) * std::conj(cu.h(j, l));
    interference += f * s.symbols[static_cast<std::size_t>(j)];
  }
  d.interference = interference;
  d.noise = cu.w[static_cast<std::size_t>(i)];
  return d;
}

// Average over n_rt repeated transmissions of the same symbol vector.
// Gains come from the stored realizations (ideal receiver).
inline CombinedObservation combine(std::span<const ChannelUse> uses, const LinkConfig& cfg) {
  if (uses.empty()) throw std::invalid_argument("combine: no channel uses");
  if (static_cast<int>(uses.size()) != cfg.n_rt)
    throw std::invalid_argument("combine: expected exactly n_rt channel uses");
  const int n = cfg.n_r;
  CombinedObservation obs{std::vector<double>(static_cast<std::size_t>(n), 0.0),
                          std::vector<Complex>(static_cast<std::size_t>(n)), cfg.n_rt};
  for (const auto& cu : uses) {
    if (cu.mode != LinkMode::precoded || cu.h.rows != n)
      throw std::invalid_argument("combine: inconsistent channel use");
    for (int i = 0; i < n; ++i) {
      obs.y[static_cast<std::size_t>(i)] += cu.received[static_cast<std::size_t>(i)];
      obs.gain[static_cast<std::size_t>(i)] += precoded_diag_gain(cu.h, i);
    }
  }
  for (int i = 0; i < n; ++i) {
    obs.y[static_cast<std::size_t>(i)] /= cfg.n_rt;
    obs.gain[static_cast<std::size_t>(i)] /= cfg.n_rt;
  }
  return obs;
}

}  // namespace sumimo
