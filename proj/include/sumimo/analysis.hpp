#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sumimo/link.hpp"

namespace sumimo {

// Minimum average SNR per bit for error-free transmission over any channel.
constexpr double kMinSinrPerBit = std::numbers::ln2;

inline double db(double linear) {
  if (std::isinf(linear) && linear > 0.0) return linear;
  if (!(linear > 0.0)) throw std::invalid_argument("db: input must be positive");
  return 10.0 * std::log10(linear);
}

// Zero-noise ceiling of the average SINR per bit with precoding.
// Unbounded for a single receive antenna (no inter-stream interference).
inline double sinr_ub_precoded(int n_t, int n_r, int n_rt) {
  if (n_t < 1 || n_r < 1 || n_rt < 1)
    throw std::invalid_argument("sinr_ub_precoded: counts must be >= 1");
  if (n_r == 1) return std::numeric_limits<double>::infinity();
  return 2.0 * n_rt * (n_t + 1) / (n_r - 1);
}

// Matched-filter twin of the bound; unbounded for a single transmit antenna.
inline double sinr_ub_raw(int n_t, int n_r, int n_rt) {
  if (n_t < 1 || n_r < 1 || n_rt < 1)
    throw std::invalid_argument("sinr_ub_raw: counts must be >= 1");
  if (n_t == 1) return std::numeric_limits<double>::infinity();
  return 2.0 * n_rt * (n_r + 1) / (n_t - 1);
}

// Information bits conveyed per channel transmission.
inline double spectral_efficiency(int n_t, int n_r, int n_rt, LinkMode mode) {
  if (n_t < 1 || n_r < 1 || n_rt < 1)
    throw std::invalid_argument("spectral_efficiency: counts must be >= 1");
  return (mode == LinkMode::precoded ? n_r : n_t) / (2.0 * n_rt);
}

// Performance index: SINR ceiling plus spectral efficiency at a fixed
// antenna budget n_tot = n_t + n_r.
inline double f_index(int n_t, int n_tot, int n_rt, LinkMode mode) {
  if (n_rt < 1) throw std::invalid_argument("f_index: n_rt must be >= 1");
  if (mode == LinkMode::precoded) {
    if (n_t < 1 || n_tot - n_t < 2)
      throw std::domain_error("f_index: precoded domain requires n_t >= 1 and n_tot - n_t >= 2");
    return 2.0 * n_rt * (n_t + 1) / (n_tot - n_t - 1) + (n_tot - n_t) / (2.0 * n_rt);
  }
  if (n_t < 2 || n_tot - n_t < 1)
    throw std::domain_error("f_index: raw domain requires n_t >= 2 and n_tot - n_t >= 1");
  return 2.0 * n_rt * (n_tot - n_t + 1) / (n_t - 1) + n_t / (2.0 * n_rt);
}

// Real-valued location of the interior minimum of f.
inline double f_minimizer(int n_tot, int n_rt, LinkMode mode) {
  if (n_tot < 4) throw std::invalid_argument("f_minimizer: n_tot must be >= 4");
  if (n_rt < 1) throw std::invalid_argument("f_minimizer: n_rt must be >= 1");
  const double root = std::sqrt(static_cast<double>(n_tot));
  return mode == LinkMode::precoded ? n_tot - 2.0 * n_rt * root - 1.0 : 2.0 * n_rt * root + 1.0;
}

// Integer n_t range over which f is defined at a given budget.
inline std::pair<int, int> f_domain(int n_tot, LinkMode mode) {
  return mode == LinkMode::precoded ? std::pair<int, int>{1, n_tot - 2}
                                    : std::pair<int, int>{2, n_tot - 1};
}

struct AnalysisPoint {
  int n_t = 0;
  int n_r = 0;
  int n_rt = 0;
  double sinr_av_b_ub = 0.0;
  double eta = 0.0;
  double f_value = 0.0;
};

inline AnalysisPoint analysis_point(int n_t, int n_r, int n_rt, LinkMode mode) {
  AnalysisPoint p{n_t, n_r, n_rt, 0.0, 0.0, 0.0};
  p.sinr_av_b_ub =
      mode == LinkMode::precoded ? sinr_ub_precoded(n_t, n_r, n_rt) : sinr_ub_raw(n_t, n_r, n_rt);
  p.eta = spectral_efficiency(n_t, n_r, n_rt, mode);
  p.f_value = p.sinr_av_b_ub + p.eta;
  return p;
}

struct PlanResult {
  int n_t_min = 0;
  int n_t_max = 0;
  double minimizer_location = 0.0;
  bool excluded = true;
};

namespace detail {

// Admissibility of one split under the planner constraints: the SINR
// ceiling must exceed ln 2, the spectral efficiency must reach eta_min,
// and the two integers bracketing the f-minimizer are avoided.
inline bool plan_admissible(int n_t, int n_tot, int n_rt, double eta_min, LinkMode mode,
                            long long bracket_lo, long long bracket_hi) {
  const int n_r = n_tot - n_t;
  const double ub =
      mode == LinkMode::precoded ? sinr_ub_precoded(n_t, n_r, n_rt) : sinr_ub_raw(n_t, n_r, n_rt);
  if (!(ub > kMinSinrPerBit)) return false;
  if (spectral_efficiency(n_t, n_r, n_rt, mode) < eta_min) return false;
  return n_t != bracket_lo && n_t != bracket_hi;
}

}  // namespace detail

// Longest contiguous run of admissible transmit-antenna counts. excluded
// is set when the constraints leave no usable split.
inline PlanResult plan_antenna_range(int n_tot, int n_rt, double eta_min, LinkMode mode) {
  if (!(eta_min > 0.0))
    throw std::invalid_argument("plan_antenna_range: eta_min must be positive");
  PlanResult res;
  res.minimizer_location = f_minimizer(n_tot, n_rt, mode);
  const long long bracket_lo = static_cast<long long>(std::floor(res.minimizer_location));
  const long long bracket_hi = static_cast<long long>(std::ceil(res.minimizer_location));
  const auto [lo, hi] = f_domain(n_tot, mode);

  int best_lo = 0, best_len = 0;
  int run_lo = 0, run_len = 0;
  for (int n_t = lo; n_t <= hi; ++n_t) {
    if (detail::plan_admissible(n_t, n_tot, n_rt, eta_min, mode, bracket_lo, bracket_hi)) {
      if (run_len == 0) run_lo = n_t;
      ++run_len;
      if (run_len > best_len) {
        best_len = run_len;
        best_lo = run_lo;
      }
    } else {
      run_len = 0;
    }
  }
  if (best_len > 0) {
    res.excluded = false;
    res.n_t_min = best_lo;
    res.n_t_max = best_lo + best_len - 1;
  }
  return res;
}

// Average SINR per bit at the configured noise level (closed form).
inline double sinr_av_b(const LinkConfig& cfg) {
  cfg.validate();
  const double sh2 = cfg.sigma_h * cfg.sigma_h;
  const double sh4 = sh2 * sh2;
  const double sw2 = cfg.sigma_w2 / 2.0;  // per-dimension noise variance
  double num, den;
  if (cfg.mode == LinkMode::precoded) {
    num = 8.0 * sh4 * cfg.n_t * (cfg.n_t + 1) * 2.0 * cfg.n_rt;
    den = 8.0 * sh4 * cfg.n_t * (cfg.n_r - 1) + 2.0 * sw2;
  } else {
    num = 8.0 * sh4 * cfg.n_r * (cfg.n_r + 1) * 2.0 * cfg.n_rt;
    den = 8.0 * sh4 * cfg.n_r * (cfg.n_t - 1) + 4.0 * sw2 * sh2 * cfg.n_r;
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

// Solves the average-SINR-per-bit expression for the total noise variance
// that hits `target_linear`. Empty when the target is at or above the
// zero-noise ceiling for this split.
inline std::optional<double> noise_for_target_sinr(const LinkConfig& cfg, double target_linear) {
  cfg.validate();
  if (!(target_linear > 0.0))
    throw std::invalid_argument("noise_for_target_sinr: target must be positive");
  const double sh2 = cfg.sigma_h * cfg.sigma_h;
  const double sh4 = sh2 * sh2;
  const double ub = cfg.mode == LinkMode::precoded
                        ? sinr_ub_precoded(cfg.n_t, cfg.n_r, cfg.n_rt)
                        : sinr_ub_raw(cfg.n_t, cfg.n_r, cfg.n_rt);
  if (!(target_linear < ub)) return std::nullopt;
  if (cfg.mode == LinkMode::precoded) {
    const double den_needed = 16.0 * cfg.n_rt * sh4 * cfg.n_t * (cfg.n_t + 1) / target_linear;
    const double interference = 8.0 * sh4 * cfg.n_t * (cfg.n_r - 1);
    return den_needed - interference;  // equals 2 sigma_W^2
  }
  const double den_needed = 16.0 * cfg.n_rt * sh4 * cfg.n_r * (cfg.n_r + 1) / target_linear;
  const double interference = 8.0 * sh4 * cfg.n_r * (cfg.n_t - 1);
  return (den_needed - interference) / (2.0 * sh2 * cfg.n_r);
}

// Total variance of the combined interference-plus-noise term U_i.
inline double combined_noise_variance(const LinkConfig& cfg) {
  cfg.validate();
  const double sh2 = cfg.sigma_h * cfg.sigma_h;
  const double sh4 = sh2 * sh2;
  const double sw2 = cfg.sigma_w2 / 2.0;
  const double sigma_uprime =
      cfg.mode == LinkMode::precoded
          ? 8.0 * sh4 * cfg.n_t * (cfg.n_r - 1) + 2.0 * sw2
          : 8.0 * sh4 * cfg.n_r * (cfg.n_t - 1) + 4.0 * sw2 * sh2 * cfg.n_r;
  return sigma_uprime / cfg.n_rt;
}

}  // namespace sumimo
