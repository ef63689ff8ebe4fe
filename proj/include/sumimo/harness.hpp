#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sumimo/analysis.hpp"
#include "sumimo/link_precoded.hpp"
#include "sumimo/link_raw.hpp"
#include "sumimo/stats.hpp"
#include "sumimo/turbo.hpp"

namespace sumimo {

struct ExperimentConfig {
  LinkConfig link;
  TurboConfig turbo;
  std::vector<double> snr_points_db;  // average SINR per bit targets
  int frames = 2000;
  std::uint64_t master_seed = 1;
  std::string output_path;
  int threads = 0;          // 0 = use hardware concurrency
  bool zero_noise = false;  // bypass the SNR targets and run with sigma_w2 = 0

  void validate() const {
    link.validate();
    if (frames < 1) throw std::invalid_argument("ExperimentConfig: frames must be >= 1");
    if (!zero_noise && snr_points_db.empty())
      throw std::invalid_argument("ExperimentConfig: no SNR points given");
    for (double p : snr_points_db)
      if (!std::isfinite(p))
        throw std::invalid_argument("ExperimentConfig: SNR points must be finite");
  }
};

struct BerRecord {
  double snr_db = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  double ber = 0.0;
  std::uint64_t frame_errors = 0;
  std::uint64_t frames = 0;
  std::string reason;  // non-empty when the point was rejected
};

// Data bits per frame: the smallest integer greater than 1000 that is a
// multiple of the per-use symbol count, and the coded length (twice that).
inline std::pair<int, int> derive_frame_length(const LinkConfig& cfg) {
  cfg.validate();
  const int d = cfg.stream_length();
  const int l_d1 = (1000 / d + 1) * d;
  return {l_d1, 2 * l_d1};
}

// Gray QPSK mapping: first coded bit sets the in-phase sign, second the
// quadrature sign, bit 0 maps to +1.
inline std::vector<Complex> qpsk_map(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: bit count must be even");
  std::vector<Complex> out(bits.size() / 2);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double re = bits[2 * m] ? -1.0 : 1.0;
    const double im = bits[2 * m + 1] ? -1.0 : 1.0;
    out[m] = {re, im};
  }
  return out;
}

namespace detail {

struct FrameResult {
  std::uint64_t bit_errors = 0;
  bool frame_error = false;
};

// One frame end to end: data -> encode -> map -> n_rt transmissions per
// vector use -> combine -> LLRs -> decode -> error counts. The RNG stream
// depends only on (master_seed, frame_index).
inline FrameResult simulate_frame(const LinkConfig& link, const TurboCodec& codec,
                                  std::uint64_t master_seed, std::uint64_t frame_index,
                                  double llr_noise_var) {
  Rng rng = Rng::substream(master_seed, frame_index);
  const std::size_t data_len = codec.frame_len();

  std::vector<std::uint8_t> data(data_len);
  for (auto& b : data) b = rng.bit();
  const CodedFrame frame = codec.encode(data);
  const std::vector<Complex> symbols = qpsk_map(frame.coded_bits);

  const int n = link.stream_length();
  const std::size_t uses = symbols.size() / static_cast<std::size_t>(n);
  SoftFrame soft;
  soft.llrs.resize(2 * symbols.size());

  std::vector<ChannelUse> channel_uses;
  std::vector<MatchedFilterOutput> filtered;
  for (std::size_t u = 0; u < uses; ++u) {
    SymbolVector s{{symbols.begin() + u * n, symbols.begin() + (u + 1) * n}};
    CombinedObservation obs;
    if (link.mode == LinkMode::precoded) {
      channel_uses.clear();
      for (int k = 0; k < link.n_rt; ++k) channel_uses.push_back(transmit_precoded(s, link, rng));
      obs = combine(channel_uses, link);
    } else {
      filtered.clear();
      for (int k = 0; k < link.n_rt; ++k)
        filtered.push_back(matched_filter(transmit_raw(s, link, rng)));
      obs = combine_raw(filtered, link);
    }
    const std::vector<double> seg = llrs_from_combined(obs, llr_noise_var);
    std::copy(seg.begin(), seg.end(), soft.llrs.begin() + 2 * u * n);
  }

  const std::vector<std::uint8_t> decoded = codec.decode(soft);
  FrameResult res;
  for (std::size_t k = 0; k < data_len; ++k)
    if (decoded[k] != data[k]) ++res.bit_errors;
  res.frame_error = res.bit_errors > 0;
  return res;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace detail

// BER sweep over the configured SNR points. Targets at or above the SINR
// ceiling of the split are rejected and recorded with a reason. Results
// depend only on the config and the master seed, not on the thread count.
inline std::vector<BerRecord> run_ber_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto [data_len, coded_len] = derive_frame_length(cfg.link);
  (void)coded_len;
  const TurboCodec codec(cfg.turbo, static_cast<std::size_t>(data_len));

  struct Point {
    double snr_db;
    std::optional<double> sigma_w2;
  };
  std::vector<Point> points;
  if (cfg.zero_noise) {
    points.push_back({std::numeric_limits<double>::infinity(), 0.0});
  } else {
    for (double snr_db : cfg.snr_points_db) {
      const double target = std::pow(10.0, snr_db / 10.0);
      points.push_back({snr_db, noise_for_target_sinr(cfg.link, target)});
    }
  }

  std::vector<BerRecord> records;
  for (const Point& pt : points) {
    BerRecord rec;
    rec.snr_db = pt.snr_db;
    if (!pt.sigma_w2) {
      rec.reason = "target_at_or_above_sinr_upper_bound";
      records.push_back(std::move(rec));
      continue;
    }
    LinkConfig link = cfg.link;
    link.sigma_w2 = *pt.sigma_w2;
    const double llr_var = std::max(combined_noise_variance(link), 1e-30);

    std::atomic<std::uint64_t> next_frame{0};
    std::atomic<std::uint64_t> bit_errors{0};
    std::atomic<std::uint64_t> frame_errors{0};
    const auto worker = [&] {
      for (;;) {
        const std::uint64_t f = next_frame.fetch_add(1);
        if (f >= static_cast<std::uint64_t>(cfg.frames)) break;
        const auto r = detail::simulate_frame(link, codec, cfg.master_seed, f, llr_var);
        bit_errors.fetch_add(r.bit_errors);
        if (r.frame_error) frame_errors.fetch_add(1);
      }
    };
    const int n_threads = detail::resolve_threads(cfg.threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    rec.frames = static_cast<std::uint64_t>(cfg.frames);
    rec.bits = rec.frames * static_cast<std::uint64_t>(data_len);
    rec.bit_errors = bit_errors.load();
    rec.frame_errors = frame_errors.load();
    rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits);
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Moment validation: Monte Carlo estimates of every closed-form moment the
// analysis relies on, with pass/fail at the stated tolerances.

struct MomentRow {
  std::string name;
  double closed_form = 0.0;
  double estimate = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct MomentReport {
  std::vector<MomentRow> rows;
  bool all_pass = true;
};

namespace detail {

inline void push_row(MomentReport& report, std::string name, double closed_form, double estimate,
                     double tolerance) {
  MomentRow row;
  row.name = std::move(name);
  row.closed_form = closed_form;
  row.estimate = estimate;
  row.tolerance = tolerance;
  if (closed_form == 0.0) {
    // Degenerate rows (empty sums) must come out identically zero.
    row.rel_err = 0.0;
    row.pass = estimate == 0.0;
  } else {
    row.rel_err = std::abs(estimate - closed_form) / std::abs(closed_form);
    row.pass = row.rel_err <= tolerance;
  }
  report.all_pass = report.all_pass && row.pass;
  report.rows.push_back(std::move(row));
}

inline SymbolVector random_qpsk(int n, Rng& rng) {
  std::vector<std::uint8_t> bits(2 * static_cast<std::size_t>(n));
  for (auto& b : bits) b = rng.bit();
  return SymbolVector{qpsk_map(bits)};
}

}  // namespace detail

inline MomentReport run_moment_validation(const LinkConfig& cfg, std::uint64_t draws,
                                          std::uint64_t seed = 1) {
  cfg.validate();
  if (draws < 10000)
    throw std::invalid_argument("run_moment_validation: draws must be >= 10^4");
  const bool precoded = cfg.mode == LinkMode::precoded;
  const double sh2 = cfg.sigma_h * cfg.sigma_h;
  const double sh4 = sh2 * sh2;
  const double sw2 = cfg.sigma_w2 / 2.0;
  const int n = cfg.stream_length();

  Rng rng(seed);
  MomentAccumulator p_av, entry_x4, f_diag, f_diag_sq, f_cross_sq, interf_sq, total_sq, noise_sq;
  MomentAccumulator f_comb_sq, u_comb_sq;

  for (std::uint64_t d = 0; d < draws; ++d) {
    const SymbolVector s = detail::random_qpsk(n, rng);
    const ChannelUse cu = precoded ? transmit_precoded(s, cfg, rng) : transmit_raw(s, cfg, rng);
    for (const Complex& e : cu.h.entries) {
      const double re2 = e.real() * e.real();
      const double im2 = e.imag() * e.imag();
      entry_x4.add(re2 * re2);
      entry_x4.add(im2 * im2);
    }
    for (const Complex& sym : s.symbols) p_av.add(std::norm(sym));
    for (int i = 0; i < n; ++i) {
      const Decomposition parts = precoded ? decompose(cu, s, i) : decompose_raw(cu, s, i);
      const double f = precoded ? precoded_diag_gain(cu.h, i) : raw_diag_gain(cu.h, i);
      f_diag.add(f);
      f_diag_sq.add(f * f);
      interf_sq.add(std::norm(parts.interference));
      noise_sq.add(std::norm(parts.noise));
      total_sq.add(std::norm(parts.interference + parts.noise));
    }
    // Cross gains F_{i,j}, i != j, exist only with at least two streams.
    if (n >= 2) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          Complex f{};
          if (precoded) {
            for (int l = 0; l < cfg.n_t; ++l) f += cu.h(i, l) * std::conj(cu.h(j, l));
          } else {
            for (int l = 0; l < cfg.n_r; ++l) f += std::conj(cu.h(l, i)) * cu.h(l, j);
          }
          f_cross_sq.add(std::norm(f));
        }
      }
    }
  }

  // Combining statistics over independent n_rt-fold trials.
  std::vector<ChannelUse> channel_uses;
  std::vector<MatchedFilterOutput> filtered;
  for (std::uint64_t d = 0; d < draws; ++d) {
    const SymbolVector s = detail::random_qpsk(n, rng);
    CombinedObservation obs;
    if (precoded) {
      channel_uses.clear();
      for (int k = 0; k < cfg.n_rt; ++k) channel_uses.push_back(transmit_precoded(s, cfg, rng));
      obs = combine(channel_uses, cfg);
    } else {
      filtered.clear();
      for (int k = 0; k < cfg.n_rt; ++k) filtered.push_back(matched_filter(transmit_raw(s, cfg, rng)));
      obs = combine_raw(filtered, cfg);
    }
    for (int i = 0; i < n; ++i) {
      f_comb_sq.add(obs.gain[i] * obs.gain[i]);
      u_comb_sq.add(std::norm(obs.y[i] - obs.gain[i] * s.symbols[i]));
    }
  }

  const int gain_count = precoded ? cfg.n_t : cfg.n_r;        // antennas summed in F_{i,i}
  const int interferers = precoded ? cfg.n_r - 1 : cfg.n_t - 1;
  const double noise_cf = precoded ? 2.0 * sw2 : 4.0 * sw2 * sh2 * cfg.n_r;
  const double sigma_uprime = 8.0 * sh4 * gain_count * interferers + noise_cf;

  MomentReport report;
  detail::push_row(report, "E[|S|^2] (P_av)", 2.0, p_av.mean(), 0.02);
  detail::push_row(report, "E[X^4] channel entry dim", 3.0 * sh4, entry_x4.mean(), 0.05);
  detail::push_row(report, "E[F_ii]", 2.0 * sh2 * gain_count, f_diag.mean(), 0.02);
  detail::push_row(report, "E[F_ii^2]", 4.0 * sh4 * gain_count * (gain_count + 1),
                   f_diag_sq.mean(), 0.02);
  if (n >= 2)
    detail::push_row(report, "E[|F_ij|^2]", 4.0 * sh4 * gain_count, f_cross_sq.mean(), 0.02);
  detail::push_row(report, "E[|I|^2]", 8.0 * sh4 * gain_count * interferers, interf_sq.mean(),
                   0.02);
  detail::push_row(report, precoded ? "E[|W|^2]" : "E[|V|^2]", noise_cf, noise_sq.mean(), 0.02);
  detail::push_row(report, "E[|I+noise|^2] (sigma_U'^2)", sigma_uprime, total_sq.mean(), 0.02);
  detail::push_row(report, "E[F_comb^2]",
                   4.0 * sh4 * gain_count * (static_cast<double>(gain_count) * cfg.n_rt + 1) /
                       cfg.n_rt,
                   f_comb_sq.mean(), 0.02);
  detail::push_row(report, "E[|U_comb|^2]", sigma_uprime / cfg.n_rt, u_comb_sq.mean(), 0.02);
  return report;
}

// ---------------------------------------------------------------------------
// Planner run: per-split curve plus the selected range.

struct PlanRow {
  AnalysisPoint point;
  bool admissible = false;
};

struct PlanOutput {
  std::vector<PlanRow> rows;
  PlanResult summary;
};

inline PlanOutput run_plan(int n_tot, int n_rt, double eta_min, LinkMode mode) {
  if (n_tot < 4) throw std::invalid_argument("run_plan: n_tot must be >= 4");
  PlanOutput out;
  out.summary = plan_antenna_range(n_tot, n_rt, eta_min, mode);
  const long long bracket_lo = static_cast<long long>(std::floor(out.summary.minimizer_location));
  const long long bracket_hi = static_cast<long long>(std::ceil(out.summary.minimizer_location));
  const auto [lo, hi] = f_domain(n_tot, mode);
  for (int n_t = lo; n_t <= hi; ++n_t) {
    PlanRow row;
    row.point = analysis_point(n_t, n_tot - n_t, n_rt, mode);
    row.point.f_value = f_index(n_t, n_tot, n_rt, mode);
    row.admissible =
        detail::plan_admissible(n_t, n_tot, n_rt, eta_min, mode, bracket_lo, bracket_hi);
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output formatting. Formats are fixed so identical runs produce identical
// bytes.

namespace detail {

inline std::string format_general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

inline void write_ber_csv(std::ostream& os, std::span<const BerRecord> records) {
  os << "snr_db,frames,bits,bit_errors,frame_errors,ber,fer,reason\n";
  for (const BerRecord& r : records) {
    const double fer =
        r.frames > 0 ? static_cast<double>(r.frame_errors) / static_cast<double>(r.frames) : 0.0;
    os << detail::format_general(r.snr_db) << ',' << r.frames << ',' << r.bits << ','
       << r.bit_errors << ',' << r.frame_errors << ',' << detail::format_sci(r.ber) << ','
       << detail::format_sci(fer) << ',' << r.reason << '\n';
  }
}

inline std::string ber_csv_string(std::span<const BerRecord> records) {
  std::ostringstream oss;
  write_ber_csv(oss, records);
  return oss.str();
}

inline void write_plan_csv(std::ostream& os, const PlanOutput& out) {
  os << "n_t,n_r,sinr_ub_db,eta,f_value,admissible\n";
  for (const PlanRow& row : out.rows) {
    os << row.point.n_t << ',' << row.point.n_r << ','
       << detail::format_general(db(row.point.sinr_av_b_ub)) << ','
       << detail::format_general(row.point.eta) << ','
       << detail::format_general(row.point.f_value) << ',' << (row.admissible ? "true" : "false")
       << '\n';
  }
  os << "# summary: n_t_min=" << out.summary.n_t_min << " n_t_max=" << out.summary.n_t_max
     << " minimizer=" << detail::format_general(out.summary.minimizer_location)
     << " excluded=" << (out.summary.excluded ? "true" : "false") << '\n';
}

inline void print_moment_report(std::ostream& os, const MomentReport& report) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%-28s %14s %14s %9s %6s %s\n", "moment", "closed_form",
                "estimate", "rel_err", "tol", "result");
  os << buf;
  for (const MomentRow& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%-28s %14.6g %14.6g %9.4f %6.2f %s\n", row.name.c_str(),
                  row.closed_form, row.estimate, row.rel_err, row.tolerance,
                  row.pass ? "pass" : "FAIL");
    os << buf;
  }
  os << (report.all_pass ? "all rows pass\n" : "FAILURES present\n");
}

}  // namespace sumimo
