// obsim — command-line driver for the 1-bit oversampled MIMO uplink
// simulator.
//
//   obsim mse-sweep  [options]   estimation MSE curves + Bayesian bound
//   obsim crb-sweep  [options]   Bayesian bound only
//   obsim ser-sweep  [options]   uncoded SER curves (estimated/perfect CSI)
//   obsim selftest               quick internal consistency run
//
// Options are read from --config (flat JSON) first; explicit flags override
// individual fields. Results go to --out as CSV (default) or JSON.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "onebit/config.hpp"
#include "onebit/io.hpp"
#include "onebit/montecarlo.hpp"

namespace {

struct SweepCli {
  std::string config_path;
  std::string out_path = "-";
  std::string format = "csv";
  std::uint64_t seed = 0;
  int trials = 0, draws = 0, workers = 0;
  double rho = 0.0;
  std::vector<double> snr;
  std::vector<int> m, tau;
  CLI::Option* o_config = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_trials = nullptr;
  CLI::Option* o_draws = nullptr;
  CLI::Option* o_workers = nullptr;
  CLI::Option* o_rho = nullptr;
  CLI::Option* o_snr = nullptr;
  CLI::Option* o_m = nullptr;
  CLI::Option* o_tau = nullptr;
};

void attach_sweep_options(CLI::App* sub, SweepCli& v) {
  v.o_config =
      sub->add_option("--config", v.config_path, "flat JSON config file")
          ->check(CLI::ExistingFile);
  sub->add_option("--out", v.out_path, "output file, '-' for stdout");
  sub->add_option("--format", v.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  v.o_seed = sub->add_option("--seed", v.seed, "base RNG seed");
  v.o_trials =
      sub->add_option("--trials", v.trials, "Monte Carlo trials / blocks");
  v.o_draws =
      sub->add_option("--draws", v.draws, "channel draws for the bound");
  v.o_workers = sub->add_option("--workers", v.workers, "worker threads");
  v.o_rho = sub->add_option("--rho", v.rho, "receive correlation");
  v.o_snr = sub->add_option("--snr", v.snr, "SNR grid in dB, comma separated")
                ->delimiter(',');
  v.o_m = sub->add_option("--m", v.m, "oversampling factors, comma separated")
              ->delimiter(',');
  v.o_tau =
      sub->add_option("--tau", v.tau,
                      "pilot length; a comma list makes MSE sweeps scan tau")
          ->delimiter(',');
}

onebit::SimConfig make_config(const SweepCli& v) {
  onebit::SimConfig c;
  if (v.o_config->count() > 0) {
    std::ifstream in(v.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    c = onebit::SimConfig::from_json_text(ss.str());
  }
  if (v.o_seed->count() > 0) c.seed = v.seed;
  if (v.o_trials->count() > 0) c.trials = v.trials;
  if (v.o_draws->count() > 0) c.bound_draws = v.draws;
  if (v.o_workers->count() > 0) c.workers = v.workers;
  if (v.o_rho->count() > 0) c.rho = v.rho;
  if (v.o_snr->count() > 0) c.snr_db = v.snr;
  if (v.o_m->count() > 0) c.m_factors = v.m;
  if (v.o_tau->count() > 0) {
    if (v.tau.size() == 1) {
      c.tau = v.tau.front();
      c.tau_grid.clear();
    } else {
      c.tau_grid = v.tau;
    }
  }
  c.validate();
  return c;
}

void emit(const std::vector<onebit::CurveRecord>& rows,
          const std::string& out_path, const std::string& format) {
  std::ofstream file;
  if (out_path != "-") {
    file.open(out_path);
    if (!file) throw onebit::invalid_input("cannot open output file: " +
                                           out_path);
  }
  std::ostream& os = out_path == "-" ? std::cout : file;
  if (format == "json")
    onebit::write_json(os, rows);
  else
    onebit::write_csv(os, rows);
}

int run_selftest() {
  using namespace onebit;
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << '\n';
    if (!ok) ++failures;
  };

  {
    const auto m =
        PilotFrameModel::build(4, 4, 40, 1, 0.8, 0.0, make_pilots(4, 40));
    const MatC gram = m.pilots.adjoint() * m.pilots;
    const double err =
        (gram - 40.0 * MatC::Identity(4, 4)).cwiseAbs().maxCoeff();
    report("pilot book is orthogonal", err < 1e-9);
  }
  {
    PointSpec s;
    s.n_r = 8;
    s.snr_db = 0.0;
    const MsePoint p = run_mse_point(s, 400, 7, 1);
    report("1-bit filter MSE matches its closed form (10%)",
           std::abs(p.lra_mse - p.lra_predicted) < 0.1 * p.lra_predicted);
    report("unquantized filter MSE matches its closed form (10%)",
           std::abs(p.unq_mse - p.unq_predicted) < 0.1 * p.unq_predicted);
  }
  {
    const ChannelPrior prior(4, 4, 0.0);
    const MatR zero = MatR::Zero(32, 32);
    const double prior_only = crb_from_bim(zero, bim_prior(prior));
    report("prior-only bound equals the prior variance / 2",
           std::abs(prior_only - 0.5) < 1e-12);
    PointSpec s;
    s.n_r = 8;
    s.snr_db = 0.0;
    const CrbPoint c = run_crb_point(s, 20, 7, 1);
    report("Bayesian bound sits below the prior-only level",
           c.crb > 0.0 && c.crb < 0.5);
  }
  {
    const auto data = DataPhaseModel::build(4, 8, 1, 50, 3, 0.8);
    const ChannelPrior prior(4, 8, 0.0);
    RngStream ch(5, 0, purpose::kChannel), xs(5, 0, purpose::kDataSymbols);
    const MatC H = prior.sample(ch);
    std::vector<unsigned> truth;
    const MatC X = data.draw_symbols(xs, &truth);
    const WindowDetector det(data, H, 1e-9, false);
    const auto dec = det.detect(data.transmit_frame(X, H));
    report("noiseless detection is error free",
           symbol_error_rate(dec, truth) == 0.0);
  }

  std::cout << (failures == 0 ? "selftest: PASS" : "selftest: FAIL") << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit oversampled MIMO uplink channel estimation simulator"};
  app.require_subcommand(1);

  SweepCli mse, crb, ser;
  CLI::App* sub_mse = app.add_subcommand(
      "mse-sweep", "estimation MSE of the 1-bit and unquantized filters "
                   "plus the Bayesian bound");
  attach_sweep_options(sub_mse, mse);
  CLI::App* sub_crb =
      app.add_subcommand("crb-sweep", "Bayesian estimation bound only");
  attach_sweep_options(sub_crb, crb);
  CLI::App* sub_ser = app.add_subcommand(
      "ser-sweep", "uncoded SER with estimated and perfect channel state");
  attach_sweep_options(sub_ser, ser);
  CLI::App* sub_self =
      app.add_subcommand("selftest", "quick internal consistency checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_self->parsed()) return run_selftest();
    if (sub_mse->parsed()) {
      const auto cfg = make_config(mse);
      emit(onebit::run_mse_sweep(cfg), mse.out_path, mse.format);
    } else if (sub_crb->parsed()) {
      const auto cfg = make_config(crb);
      emit(onebit::run_crb_sweep(cfg), crb.out_path, crb.format);
    } else if (sub_ser->parsed()) {
      const auto cfg = make_config(ser);
      emit(onebit::run_ser_sweep(cfg), ser.out_path, ser.format);
    }
  } catch (const onebit::invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
