#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sumimo/matrix.hpp"
#include "sumimo/rng.hpp"

namespace sumimo {

enum class LinkMode { precoded, raw };

struct LinkConfig {
  int n_t = 1;   // transmit antennas
  int n_r = 1;   // receive antennas
  int n_rt = 1;  // re-transmissions combined per symbol vector
  double sigma_h = 0.70710678118654752;  // per-dimension std dev of channel entries
  double sigma_w2 = 0.0;                 // total noise variance per complex sample (both dims)
  LinkMode mode = LinkMode::precoded;

  void validate() const {
    if (n_t < 1 || n_r < 1 || n_rt < 1)
      throw std::invalid_argument("LinkConfig: antenna and re-transmission counts must be >= 1");
    if (!(sigma_h > 0.0)) throw std::invalid_argument("LinkConfig: sigma_h must be positive");
    if (sigma_w2 < 0.0) throw std::invalid_argument("LinkConfig: sigma_w2 must be non-negative");
  }

  int n_tot() const { return n_t + n_r; }

  // Symbols carried per channel use: n_r with precoding, n_t without.
  int stream_length() const { return mode == LinkMode::precoded ? n_r : n_t; }
};

// QPSK points with coordinates +/-1 +/-j (average power 2).
struct SymbolVector {
  std::vector<Complex> symbols;
};

// One vector channel use: the fading realization, the noise actually
// added, and the resulting received vector.
struct ChannelUse {
  LinkMode mode = LinkMode::precoded;
  ComplexMatrix h;  // n_r x n_t
  std::vector<Complex> w;
  std::vector<Complex> received;
};

// Per-symbol decision statistic y_i = F_i s_i + U_i after combining,
// with the combined gain F_i read from the stored realizations.
struct CombinedObservation {
  std::vector<double> gain;
  std::vector<Complex> y;
  int n_rt_used = 0;
};

struct Decomposition {
  Complex desired;
  Complex interference;
  Complex noise;
};

inline ComplexMatrix draw_channel(const LinkConfig& cfg, Rng& rng) {
  ComplexMatrix h(cfg.n_r, cfg.n_t);
  for (auto& e : h.entries) e = rng.complex_gaussian(cfg.sigma_h);
  return h;
}

inline std::vector<Complex> draw_noise(const LinkConfig& cfg, Rng& rng) {
  std::vector<Complex> w(static_cast<std::size_t>(cfg.n_r));
  if (cfg.sigma_w2 > 0.0) {
    const double sigma = std::sqrt(cfg.sigma_w2 / 2.0);
    for (auto& e : w) e = rng.complex_gaussian(sigma);
  }
  return w;
}

// Diagonal gain of the precoded chain: F_{i,i} = sum_j |H_{i,j}|^2.
inline double precoded_diag_gain(const ComplexMatrix& h, int i) {
  double f = 0.0;
  for (int j = 0; j < h.cols; ++j) f += std::norm(h(i, j));
  return f;
}

// Diagonal gain after matched filtering: F_{i,i} = sum_l |H_{l,i}|^2.
inline double raw_diag_gain(const ComplexMatrix& h, int i) {
  double f = 0.0;
  for (int l = 0; l < h.rows; ++l) f += std::norm(h(l, i));
  return f;
}

// Two LLRs per complex symbol (in-phase bit first), Gaussian metric with
// the supplied total variance of U_i. Positive favors bit 0.
inline std::vector<double> llrs_from_combined(const CombinedObservation& obs,
                                              double noise_var_est) {
  if (!(noise_var_est > 0.0))
    throw std::invalid_argument("llrs_from_combined: noise variance must be positive");
  std::vector<double> llrs(2 * obs.y.size());
  for (std::size_t i = 0; i < obs.y.size(); ++i) {
    const double scale = 4.0 * obs.gain[i] / noise_var_est;
    llrs[2 * i] = scale * obs.y[i].real();
    llrs[2 * i + 1] = scale * obs.y[i].imag();
  }
  return llrs;
}

}  // namespace sumimo
