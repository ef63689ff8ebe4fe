#include <catch2/catch.hpp>
#include <sstream>

#include "sumimo/harness.hpp"

using namespace sumimo;

namespace {

ExperimentConfig siso_experiment(double snr_db, int frames, int n_rt = 1) {
  ExperimentConfig cfg;
  cfg.link.n_t = 1;
  cfg.link.n_r = 1;
  cfg.link.n_rt = n_rt;
  cfg.link.mode = LinkMode::precoded;
  cfg.snr_points_db = {snr_db};
  cfg.frames = frames;
  cfg.master_seed = 99;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("frame length rule, precoded") {
  LinkConfig cfg;
  cfg.mode = LinkMode::precoded;
  cfg.n_r = 7;
  const auto [l_d1, l_d] = derive_frame_length(cfg);
  CHECK(l_d1 == 1001);
  CHECK(l_d == 2002);
  // Exhaustive oracle: no smaller integer above 1000 is divisible by 7.
  for (int candidate = 1001; candidate < l_d1; ++candidate) CHECK(candidate % 7 != 0);

  cfg.n_r = 1;
  CHECK(derive_frame_length(cfg).first == 1001);
}

TEST_CASE("frame length rule, raw") {
  LinkConfig cfg;
  cfg.mode = LinkMode::raw;
  cfg.n_t = 16;
  const auto [l_d1, l_d] = derive_frame_length(cfg);
  CHECK(l_d1 == 1008);
  CHECK(l_d == 2016);
  for (int candidate = 1001; candidate < l_d1; ++candidate) CHECK(candidate % 16 != 0);
}

TEST_CASE("qpsk mapping corners") {
  const std::vector<std::uint8_t> bits{0, 0, 0, 1, 1, 0, 1, 1};
  const auto symbols = qpsk_map(bits);
  REQUIRE(symbols.size() == 4);
  CHECK(symbols[0] == Complex{1.0, 1.0});
  CHECK(symbols[1] == Complex{1.0, -1.0});
  CHECK(symbols[2] == Complex{-1.0, 1.0});
  CHECK(symbols[3] == Complex{-1.0, -1.0});
  CHECK_THROWS_AS(qpsk_map(std::vector<std::uint8_t>{1}), std::invalid_argument);
}

TEST_CASE("zero-noise interference-free run is error free") {
  ExperimentConfig cfg = siso_experiment(0.0, 10);
  cfg.zero_noise = true;
  cfg.snr_points_db.clear();
  const auto records = run_ber_sweep(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].reason.empty());
  CHECK(records[0].bit_errors == 0);
  CHECK(records[0].frame_errors == 0);
  CHECK(records[0].ber == 0.0);
}

TEST_CASE("bit conservation and record bookkeeping") {
  const ExperimentConfig cfg = siso_experiment(4.0, 3);
  const auto records = run_ber_sweep(cfg);
  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.frames == 3);
  CHECK(r.bits == 3ull * 1001ull);
  CHECK(r.ber == Approx(static_cast<double>(r.bit_errors) / r.bits));
  CHECK(r.frame_errors <= r.frames);
}

TEST_CASE("targets above the SINR ceiling are rejected with a reason") {
  ExperimentConfig cfg;
  cfg.link.n_t = 12;
  cfg.link.n_r = 20;
  cfg.link.n_rt = 1;
  cfg.link.mode = LinkMode::precoded;
  cfg.snr_points_db = {1.0, 3.5};  // ceiling is 1.36 dB
  cfg.frames = 2;
  cfg.threads = 1;
  const auto records = run_ber_sweep(cfg);
  REQUIRE(records.size() == 2);
  CHECK(records[0].reason.empty());
  CHECK(records[0].frames == 2);
  CHECK_FALSE(records[1].reason.empty());
  CHECK(records[1].frames == 0);

  const double ub_db = db(sinr_ub_precoded(12, 20, 1));
  for (const auto& r : records)
    if (r.reason.empty()) CHECK(r.snr_db < ub_db);
}

TEST_CASE("BER at the highest swept SNR does not exceed the lowest") {
  ExperimentConfig cfg = siso_experiment(0.0, 40);
  cfg.snr_points_db = {0.0, 8.0};
  const auto records = run_ber_sweep(cfg);
  REQUIRE(records.size() == 2);
  CHECK(records[1].ber <= records[0].ber);
}

TEST_CASE("identical seeds give byte-identical CSV across worker counts") {
  ExperimentConfig one = siso_experiment(3.5, 30, 2);
  one.threads = 1;
  ExperimentConfig two = one;
  two.threads = 2;
  const auto csv_one = ber_csv_string(run_ber_sweep(one));
  const auto csv_two = ber_csv_string(run_ber_sweep(two));
  REQUIRE(csv_one == csv_two);
  CHECK(csv_one.find("snr_db,frames,bits,bit_errors,frame_errors,ber,fer,reason") == 0);
}

TEST_CASE("MIMO chains waterfall at operating points inside the SINR ceiling") {
  // Both 32-antenna splits decode cleanly at 6 dB (ceilings 12.39 dB).
  ExperimentConfig cfg;
  cfg.link.n_t = 25;
  cfg.link.n_r = 7;
  cfg.link.n_rt = 2;
  cfg.link.mode = LinkMode::precoded;
  cfg.snr_points_db = {6.0};
  cfg.frames = 100;
  cfg.master_seed = 12;
  const auto precoded = run_ber_sweep(cfg);
  REQUIRE(precoded.at(0).reason.empty());
  CHECK(precoded.at(0).ber < 1e-3);

  cfg.link.n_t = 7;
  cfg.link.n_r = 25;
  cfg.link.mode = LinkMode::raw;
  const auto raw = run_ber_sweep(cfg);
  REQUIRE(raw.at(0).reason.empty());
  CHECK(raw.at(0).ber < 1e-3);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg = siso_experiment(1.0, 0);
  CHECK_THROWS_AS(run_ber_sweep(cfg), std::invalid_argument);
  cfg.frames = 1;
  cfg.snr_points_db.clear();
  CHECK_THROWS_AS(run_ber_sweep(cfg), std::invalid_argument);
  cfg.snr_points_db = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(run_ber_sweep(cfg), std::invalid_argument);
}

TEST_CASE("moment validation passes for both modes and flags degenerate rows") {
  LinkConfig cfg;
  cfg.n_t = 4;
  cfg.n_r = 4;
  cfg.n_rt = 2;
  cfg.sigma_w2 = 2.0;
  for (const LinkMode mode : {LinkMode::precoded, LinkMode::raw}) {
    cfg.mode = mode;
    const MomentReport report = run_moment_validation(cfg, 100'000, 31337);
    CHECK(report.all_pass);
  }

  // Degenerate interference-free case: closed form and estimate both zero.
  LinkConfig single;
  single.n_t = 4;
  single.n_r = 1;
  single.mode = LinkMode::precoded;
  single.sigma_w2 = 2.0;
  const MomentReport report = run_moment_validation(single, 10'000, 5);
  bool found = false;
  for (const auto& row : report.rows) {
    if (row.name == "E[|I|^2]") {
      found = true;
      CHECK(row.closed_form == 0.0);
      CHECK(row.estimate == 0.0);
      CHECK(row.pass);
    }
  }
  CHECK(found);
  CHECK_THROWS_AS(run_moment_validation(single, 100, 5), std::invalid_argument);
}

TEST_CASE("plan run emits per-split rows plus a summary") {
  const PlanOutput out = run_plan(32, 2, 10.0, LinkMode::precoded);
  CHECK(out.summary.excluded);
  REQUIRE(out.rows.size() == 30);  // n_t in [1, 30]
  std::ostringstream oss;
  write_plan_csv(oss, out);
  const std::string csv = oss.str();
  CHECK(csv.find("n_t,n_r,sinr_ub_db,eta,f_value,admissible") == 0);
  CHECK(csv.find("# summary:") != std::string::npos);
  CHECK(csv.find("excluded=true") != std::string::npos);

  const PlanOutput good = run_plan(1024, 1, 10.0, LinkMode::precoded);
  CHECK_FALSE(good.summary.excluded);
  const int minimum_near = 959;
  double best = std::numeric_limits<double>::infinity();
  int best_nt = 0;
  for (const auto& row : good.rows) {
    if (row.point.f_value < best) {
      best = row.point.f_value;
      best_nt = row.point.n_t;
    }
  }
  CHECK(best_nt == minimum_near);

  CHECK_THROWS_AS(run_plan(2, 1, 1.0, LinkMode::precoded), std::invalid_argument);
}

TEST_CASE("ber csv formats scientific notation with three significant digits") {
  BerRecord r;
  r.snr_db = 3.5;
  r.frames = 10;
  r.bits = 10010;
  r.bit_errors = 123;
  r.frame_errors = 7;
  r.ber = static_cast<double>(r.bit_errors) / r.bits;
  const std::string csv = ber_csv_string(std::vector<BerRecord>{r});
  CHECK(csv.find("1.229e-02") != std::string::npos);
  CHECK(csv.find("7.000e-01") != std::string::npos);
}
