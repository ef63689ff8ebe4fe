// Command-line driver for the link simulator: BER sweeps, moment
// validation, antenna-split planning and single-point analysis.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sumimo/sumimo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitInfeasible = 2;

struct BerArgs {
  std::string mode = "precoded";
  int n_tot = 0;
  int n_t = 0;
  int n_r = 0;
  int n_rt = 1;
  std::vector<double> snr_db;
  int frames = 2000;
  std::uint64_t seed = 1;
  std::string out;
  double sigma_h = 0.70710678118654752;
  int threads = 0;
  int iterations = 8;
  bool zero_noise = false;
  bool full_scale = false;
};

sumimo::LinkMode parse_mode(const std::string& mode) {
  if (mode == "precoded") return sumimo::LinkMode::precoded;
  if (mode == "raw") return sumimo::LinkMode::raw;
  throw CLI::ValidationError("--mode must be 'precoded' or 'raw'");
}

// Antenna counts may be given as --nt/--nr, as --ntot plus --nt, or as
// --ntot 2 alone (the single-antenna link).
std::pair<int, int> resolve_antennas(const BerArgs& a) {
  if (a.n_t > 0 && a.n_r > 0) {
    if (a.n_tot > 0 && a.n_tot != a.n_t + a.n_r)
      throw std::invalid_argument("--ntot disagrees with --nt + --nr");
    return {a.n_t, a.n_r};
  }
  if (a.n_tot > 0 && a.n_t > 0) {
    if (a.n_tot - a.n_t < 1) throw std::invalid_argument("--ntot must exceed --nt");
    return {a.n_t, a.n_tot - a.n_t};
  }
  if (a.n_tot == 2) return {1, 1};
  throw std::invalid_argument("give --nt and --nr, or --ntot with --nt");
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output file: " + path);
  return file;
}

int run_ber(const BerArgs& args, bool frames_given) {
  sumimo::ExperimentConfig cfg;
  cfg.link.mode = parse_mode(args.mode);
  std::tie(cfg.link.n_t, cfg.link.n_r) = resolve_antennas(args);
  cfg.link.n_rt = args.n_rt;
  cfg.link.sigma_h = args.sigma_h;
  cfg.turbo.iterations = args.iterations;
  cfg.snr_points_db = args.snr_db;
  cfg.frames = (args.full_scale && !frames_given) ? 10000 : args.frames;
  cfg.master_seed = args.seed;
  cfg.threads = args.threads;
  cfg.zero_noise = args.zero_noise;
  cfg.output_path = args.out;

  const auto records = sumimo::run_ber_sweep(cfg);
  std::ofstream file;
  sumimo::write_ber_csv(open_output(args.out, file), records);

  bool any_measured = false;
  for (const auto& r : records) any_measured = any_measured || r.reason.empty();
  if (!any_measured) {
    std::cerr << "error: every SNR point is at or above the SINR upper bound\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turbo-coded single-user massive MIMO link simulator"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file with the same option names per subcommand section; "
                 "command-line flags override file values");

  BerArgs ber;
  auto* ber_cmd = app.add_subcommand("ber", "Monte Carlo BER sweep, CSV output");
  ber_cmd->fallthrough();
  ber_cmd->add_option("--mode", ber.mode, "precoded or raw")->required();
  ber_cmd->add_option("--ntot", ber.n_tot, "total antenna count");
  ber_cmd->add_option("--nt", ber.n_t, "transmit antennas");
  ber_cmd->add_option("--nr", ber.n_r, "receive antennas");
  ber_cmd->add_option("--nrt", ber.n_rt, "re-transmissions per symbol vector");
  ber_cmd->add_option("--snr-db", ber.snr_db, "average SINR per bit targets in dB")
      ->delimiter(',');
  ber_cmd->add_option("--frames", ber.frames, "frames per SNR point (default 2000)");
  ber_cmd->add_option("--seed", ber.seed, "master seed");
  ber_cmd->add_option("--out", ber.out, "output CSV path (default stdout)");
  ber_cmd->add_option("--sigma-h", ber.sigma_h, "per-dimension channel std dev");
  ber_cmd->add_option("--threads", ber.threads, "worker threads (0 = all cores)");
  ber_cmd->add_option("--iterations", ber.iterations, "turbo decoder iterations");
  ber_cmd->add_flag("--zero-noise", ber.zero_noise,
                    "run a single point with sigma_w2 = 0 instead of the SNR targets");
  ber_cmd->add_flag("--full-scale", ber.full_scale,
                    "use 10^4 frames unless --frames is given explicitly");

  struct {
    std::string mode = "precoded";
    int n_t = 1, n_r = 1, n_rt = 1;
    std::uint64_t draws = 100000;
    double sigma_h = 0.70710678118654752;
    double sigma_w2 = 0.0;
    std::uint64_t seed = 1;
  } moments;
  auto* mom_cmd = app.add_subcommand("moments", "Monte Carlo validation of closed-form moments");
  mom_cmd->fallthrough();
  mom_cmd->add_option("--mode", moments.mode, "precoded or raw")->required();
  mom_cmd->add_option("--nt", moments.n_t, "transmit antennas")->required();
  mom_cmd->add_option("--nr", moments.n_r, "receive antennas")->required();
  mom_cmd->add_option("--nrt", moments.n_rt, "re-transmissions");
  mom_cmd->add_option("--draws", moments.draws, "Monte Carlo draws (>= 10^4)");
  mom_cmd->add_option("--sigma-h", moments.sigma_h, "per-dimension channel std dev");
  mom_cmd->add_option("--sigma-w2", moments.sigma_w2, "total noise variance per complex sample");
  mom_cmd->add_option("--seed", moments.seed, "seed");

  struct {
    std::string mode = "precoded";
    int n_tot = 0, n_rt = 1;
    double eta_min = 0.0;
    std::string out;
  } plan;
  auto* plan_cmd = app.add_subcommand("plan", "antenna-split range planning, CSV output");
  plan_cmd->fallthrough();
  plan_cmd->add_option("--mode", plan.mode, "precoded or raw")->required();
  plan_cmd->add_option("--ntot", plan.n_tot, "total antenna count")->required();
  plan_cmd->add_option("--nrt", plan.n_rt, "re-transmissions");
  plan_cmd->add_option("--eta-min", plan.eta_min, "minimum spectral efficiency")->required();
  plan_cmd->add_option("--out", plan.out, "output CSV path (default stdout)");

  struct {
    std::string mode = "precoded";
    int n_t = 1, n_r = 1, n_rt = 1;
  } analyze;
  auto* an_cmd = app.add_subcommand("analyze", "closed forms for a single antenna split");
  an_cmd->fallthrough();
  an_cmd->add_option("--mode", analyze.mode, "precoded or raw")->required();
  an_cmd->add_option("--nt", analyze.n_t, "transmit antennas")->required();
  an_cmd->add_option("--nr", analyze.n_r, "receive antennas")->required();
  an_cmd->add_option("--nrt", analyze.n_rt, "re-transmissions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    if (ber_cmd->parsed()) {
      return run_ber(ber, ber_cmd->count("--frames") > 0);
    }
    if (mom_cmd->parsed()) {
      sumimo::LinkConfig link;
      link.mode = parse_mode(moments.mode);
      link.n_t = moments.n_t;
      link.n_r = moments.n_r;
      link.n_rt = moments.n_rt;
      link.sigma_h = moments.sigma_h;
      link.sigma_w2 = moments.sigma_w2;
      const auto report = sumimo::run_moment_validation(link, moments.draws, moments.seed);
      sumimo::print_moment_report(std::cout, report);
      return kExitOk;
    }
    if (plan_cmd->parsed()) {
      const auto out = sumimo::run_plan(plan.n_tot, plan.n_rt, plan.eta_min,
                                        parse_mode(plan.mode));
      std::ofstream file;
      sumimo::write_plan_csv(open_output(plan.out, file), out);
      return kExitOk;
    }
    if (an_cmd->parsed()) {
      const auto mode = parse_mode(analyze.mode);
      const auto p = sumimo::analysis_point(analyze.n_t, analyze.n_r, analyze.n_rt, mode);
      std::cout << "mode=" << analyze.mode << " n_t=" << p.n_t << " n_r=" << p.n_r
                << " n_rt=" << p.n_rt << '\n';
      std::cout << "sinr_ub_linear=" << p.sinr_av_b_ub << '\n';
      std::cout << "sinr_ub_db=" << sumimo::db(p.sinr_av_b_ub) << '\n';
      std::cout << "eta=" << p.eta << '\n';
      std::cout << "f_value=" << p.f_value << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return kExitInvalidConfig;
}
