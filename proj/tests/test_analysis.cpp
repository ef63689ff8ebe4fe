#include <catch2/catch.hpp>
#include <cmath>
#include <limits>

#include "sumimo/analysis.hpp"

using namespace sumimo;

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

// Independent search oracle: walk the integer domain and return the
// argmin of the performance index.
int grid_argmin(int n_tot, int n_rt, LinkMode mode) {
  const auto [lo, hi] = f_domain(n_tot, mode);
  int best = lo;
  double best_f = f_index(lo, n_tot, n_rt, mode);
  for (int n_t = lo + 1; n_t <= hi; ++n_t) {
    const double f = f_index(n_t, n_tot, n_rt, mode);
    if (f < best_f) {
      best_f = f;
      best = n_t;
    }
  }
  return best;
}

double clamp_to_domain(double x, int n_tot, LinkMode mode) {
  const auto [lo, hi] = f_domain(n_tot, mode);
  return std::min(std::max(x, static_cast<double>(lo)), static_cast<double>(hi));
}

}  // namespace

TEST_CASE("decibel conversion") {
  CHECK(db(1.0) == 0.0);
  CHECK(round2(db(2.0 * 2 * 26 / 6.0)) == Approx(12.39));
  CHECK(round2(db(2.0 * 1 * 513 / 511.0)) == Approx(3.03));
  CHECK(std::isinf(db(std::numeric_limits<double>::infinity())));
  CHECK_THROWS_AS(db(0.0), std::invalid_argument);
  CHECK_THROWS_AS(db(-3.0), std::invalid_argument);
}

TEST_CASE("reported operating points, precoded") {
  CHECK(sinr_ub_precoded(25, 7, 2) == Approx(104.0 / 6.0));
  CHECK(round2(db(sinr_ub_precoded(25, 7, 2))) == Approx(12.39));
  CHECK(round2(db(sinr_ub_precoded(12, 20, 1))) == Approx(1.36));
  // 2*401/623 = 1.2873 -> 1.0969 dB; two-decimal displays round to 1.10.
  CHECK(db(sinr_ub_precoded(400, 624, 1)) == Approx(1.09687).margin(5e-4));
  CHECK(std::isinf(sinr_ub_precoded(1023, 1, 2)));
}

TEST_CASE("reported operating points, raw") {
  CHECK(round2(db(sinr_ub_raw(7, 25, 2))) == Approx(12.39));
  CHECK(round2(db(sinr_ub_raw(512, 512, 1))) == Approx(3.03));
  CHECK(round2(db(sinr_ub_raw(16, 16, 1))) == Approx(3.55));
  CHECK(std::isinf(sinr_ub_raw(1, 1023, 2)));
}

TEST_CASE("spectral efficiency") {
  CHECK(spectral_efficiency(25, 7, 2, LinkMode::precoded) == 1.75);
  CHECK(spectral_efficiency(400, 624, 1, LinkMode::precoded) == 312.0);
  CHECK(spectral_efficiency(16, 16, 1, LinkMode::raw) == 8.0);
  CHECK(spectral_efficiency(1, 1023, 2, LinkMode::raw) == 0.25);
}

TEST_CASE("performance index value and decomposition") {
  // Independent evaluation: 2*1*(16+1)/(32-16-1) + (32-16)/2 = 34/15 + 8.
  CHECK(f_index(16, 32, 1, LinkMode::precoded) == Approx(34.0 / 15.0 + 8.0));
  CHECK(f_index(16, 32, 1, LinkMode::precoded) == Approx(10.2667).margin(5e-5));

  for (const LinkMode mode : {LinkMode::precoded, LinkMode::raw}) {
    const auto [lo, hi] = f_domain(40, mode);
    for (int n_t = lo; n_t <= hi; ++n_t) {
      const int n_r = 40 - n_t;
      const double composed =
          (mode == LinkMode::precoded ? sinr_ub_precoded(n_t, n_r, 2) : sinr_ub_raw(n_t, n_r, 2)) +
          spectral_efficiency(n_t, n_r, 2, mode);
      REQUIRE(f_index(n_t, 40, 2, mode) == composed);
    }
  }
}

TEST_CASE("performance index domain errors") {
  CHECK_THROWS_AS(f_index(31, 32, 1, LinkMode::precoded), std::domain_error);
  CHECK_THROWS_AS(f_index(1, 32, 1, LinkMode::raw), std::domain_error);
}

TEST_CASE("minimizer closed forms") {
  CHECK(f_minimizer(1024, 1, LinkMode::precoded) == Approx(959.0));
  CHECK(f_minimizer(1024, 1, LinkMode::raw) == Approx(65.0));
  CHECK(f_minimizer(32, 2, LinkMode::precoded) == Approx(32.0 - 4.0 * std::sqrt(32.0) - 1.0));
  CHECK_THROWS_AS(f_minimizer(2, 1, LinkMode::precoded), std::invalid_argument);
}

TEST_CASE("grid search confirms the minimizer locations") {
  CHECK(grid_argmin(1024, 1, LinkMode::precoded) == 959);
  CHECK(grid_argmin(1024, 1, LinkMode::raw) == 65);

  const int m32raw = grid_argmin(32, 1, LinkMode::raw);  // minimum near 2*sqrt(32)+1 = 12.31
  CHECK((m32raw == 12 || m32raw == 13));

  const int m32pre2 = grid_argmin(32, 2, LinkMode::precoded);  // near 8.37
  CHECK((m32pre2 == 8 || m32pre2 == 9));

  for (const int n_tot : {16, 32, 64, 1024}) {
    for (const int n_rt : {1, 2, 4}) {
      for (const LinkMode mode : {LinkMode::precoded, LinkMode::raw}) {
        const int found = grid_argmin(n_tot, n_rt, mode);
        const double predicted =
            clamp_to_domain(f_minimizer(n_tot, n_rt, mode), n_tot, mode);
        INFO("n_tot=" << n_tot << " n_rt=" << n_rt
                      << " mode=" << (mode == LinkMode::precoded ? "precoded" : "raw"));
        CHECK(std::abs(found - predicted) <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("monotonicity of the two constituents at fixed n_tot") {
  const int n_tot = 64;
  for (int n_t = 1; n_t < n_tot - 2; ++n_t) {
    CHECK(sinr_ub_precoded(n_t + 1, n_tot - n_t - 1, 1) > sinr_ub_precoded(n_t, n_tot - n_t, 1));
    CHECK(spectral_efficiency(n_t + 1, n_tot - n_t - 1, 1, LinkMode::precoded) <
          spectral_efficiency(n_t, n_tot - n_t, 1, LinkMode::precoded));
  }
}

TEST_CASE("planner returns a verified range for a large budget") {
  const PlanResult res = plan_antenna_range(1024, 1, 10.0, LinkMode::precoded);
  REQUIRE_FALSE(res.excluded);
  REQUIRE(res.n_t_min <= res.n_t_max);
  const long long b_lo = static_cast<long long>(std::floor(res.minimizer_location));
  const long long b_hi = static_cast<long long>(std::ceil(res.minimizer_location));
  for (int n_t = res.n_t_min; n_t <= res.n_t_max; ++n_t) {
    const int n_r = 1024 - n_t;
    REQUIRE(sinr_ub_precoded(n_t, n_r, 1) > kMinSinrPerBit);
    REQUIRE(spectral_efficiency(n_t, n_r, 1, LinkMode::precoded) >= 10.0);
    REQUIRE(n_t != b_lo);
    REQUIRE(n_t != b_hi);
  }
}

TEST_CASE("planner excludes infeasible constraint sets") {
  // More spectral efficiency than any split can offer.
  const PlanResult res = plan_antenna_range(16, 1, 100.0, LinkMode::precoded);
  CHECK(res.excluded);
  // At n_tot = 32 with two re-transmissions the ceiling on eta is 31/4,
  // so an eta floor of 10 cannot be met by any split.
  const PlanResult res32 = plan_antenna_range(32, 2, 10.0, LinkMode::precoded);
  CHECK(res32.excluded);
}

TEST_CASE("planner never admits splits below the ln 2 threshold") {
  // n_t = 1, n_r = 9 gives a ceiling of 4/8 = 0.5 < ln 2.
  REQUIRE(sinr_ub_precoded(1, 9, 1) == Approx(0.5));
  const PlanResult res = plan_antenna_range(10, 1, 0.001, LinkMode::precoded);
  REQUIRE_FALSE(res.excluded);
  CHECK(res.n_t_min > 1);
}

TEST_CASE("planner rejects non-positive eta_min") {
  CHECK_THROWS_AS(plan_antenna_range(32, 1, 0.0, LinkMode::precoded), std::invalid_argument);
}

TEST_CASE("noise solver inverts the SINR expression in both modes") {
  for (const LinkMode mode : {LinkMode::precoded, LinkMode::raw}) {
    LinkConfig cfg;
    cfg.n_t = 6;
    cfg.n_r = 10;
    cfg.n_rt = 2;
    cfg.mode = mode;
    const double ub = mode == LinkMode::precoded ? sinr_ub_precoded(6, 10, 2) : sinr_ub_raw(6, 10, 2);
    const double target = 0.4 * ub;
    const auto sigma_w2 = noise_for_target_sinr(cfg, target);
    REQUIRE(sigma_w2.has_value());
    REQUIRE(*sigma_w2 > 0.0);
    cfg.sigma_w2 = *sigma_w2;
    CHECK(sinr_av_b(cfg) == Approx(target).epsilon(1e-12));
    CHECK_FALSE(noise_for_target_sinr(cfg, ub).has_value());
    CHECK_FALSE(noise_for_target_sinr(cfg, 2.0 * ub).has_value());
  }
}

TEST_CASE("analysis point carries the sum invariant") {
  const AnalysisPoint p = analysis_point(12, 20, 1, LinkMode::precoded);
  CHECK(p.f_value == p.sinr_av_b_ub + p.eta);
  CHECK(p.eta == 10.0);
}
