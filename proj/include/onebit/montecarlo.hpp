#pragma once

// Monte Carlo harness behind the CLI sweeps and the acceptance battery.
//
// Reproducibility contract: every trial (or block, or bound draw) owns a
// counter-based random stream keyed by (seed, index, purpose), results land
// in per-index slots, and reductions run in index order on the calling
// thread. Outputs are therefore bit-identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "onebit/bounds.hpp"
#include "onebit/channel.hpp"
#include "onebit/config.hpp"
#include "onebit/detection.hpp"
#include "onebit/estimation.hpp"
#include "onebit/io.hpp"
#include "onebit/philox.hpp"
#include "onebit/quantize.hpp"
#include "onebit/system.hpp"

namespace onebit {

namespace detail {

/// Run f(0) .. f(n-1), distributing indices over `workers` threads. Each
/// index must write only to its own slot; the first exception wins and is
/// rethrown after the pool drains.
template <class F>
void parallel_index_loop(int n, int workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto run = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(workers, n);
  pool.reserve(k);
  for (int w = 0; w < k; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

inline constexpr double kZ95 = 1.959963984540054;

/// 95% normal-theory confidence half width for a sample mean.
inline double normal_ci_half(double sd, int n) {
  return n > 0 ? kZ95 * sd / std::sqrt(static_cast<double>(n)) : 0.0;
}

/// 95% Wilson score half width for a binomial proportion (robust near 0).
inline double wilson_ci_half(std::int64_t errors, std::int64_t total) {
  if (total <= 0) return 0.0;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double z2 = kZ95 * kZ95;
  return kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) /
         (1.0 + z2 / n);
}

/// One grid point of any sweep.
struct PointSpec {
  int n_t = 4, n_r = 16, tau = 40, M = 1;
  double rho = 0.0, beta = 0.8, snr_db = 0.0;

  double sigma2() const { return noise_variance(n_t, snr_db); }
};

struct MsePoint {
  double lra_mse = 0.0, lra_ci = 0.0;
  double unq_mse = 0.0, unq_ci = 0.0;
  double lra_predicted = 0.0;  ///< closed-form model MSE of the 1-bit filter
  double unq_predicted = 0.0;  ///< closed-form model MSE of the LMMSE filter
  int trials = 0;
};

/// Empirical estimation MSE of the 1-bit and unquantized filters, with the
/// two filters applied to shared channel/noise draws.
inline MsePoint run_mse_point(const PointSpec& s, int trials,
                              std::uint64_t seed, int workers) {
  require(trials >= 1, "run_mse_point: trials must be >= 1");
  const auto model = PilotFrameModel::build(s.n_t, s.n_r, s.tau, s.M, s.beta,
                                            s.rho, make_pilots(s.n_t, s.tau));
  const ChannelPrior prior(s.n_t, s.n_r, s.rho);
  const double sigma2 = s.sigma2();
  const LinearEstimator lra = lra_lmmse_estimator(model, sigma2);
  const LinearEstimator unq = unquantized_estimator(model, sigma2);
  const double dim = static_cast<double>(model.dim());

  std::vector<double> se_lra(trials), se_unq(trials);
  detail::parallel_index_loop(trials, workers, [&](int t) {
    RngStream ch(seed, static_cast<std::uint64_t>(t), purpose::kChannel);
    RngStream pn(seed, static_cast<std::uint64_t>(t), purpose::kPilotNoise);
    const MatC H = prior.sample(ch);
    const Eigen::Map<const VecC> h(H.data(), H.size());
    const MatC frame =
        model.noiseless_frame(H) + model.synth_noise(sigma2, pn);
    se_lra[t] = (lra.estimate_frame(quantize(frame)) - h).squaredNorm() / dim;
    se_unq[t] = (unq.estimate_frame(frame) - h).squaredNorm() / dim;
  });

  MsePoint out;
  out.trials = trials;
  out.lra_mse = detail::mean_of(se_lra);
  out.lra_ci = normal_ci_half(detail::sd_of(se_lra, out.lra_mse), trials);
  out.unq_mse = detail::mean_of(se_unq);
  out.unq_ci = normal_ci_half(detail::sd_of(se_unq, out.unq_mse), trials);
  out.lra_predicted = lra.mse;
  out.unq_predicted = unq.mse;
  return out;
}

struct CrbPoint {
  double crb = 0.0, ci = 0.0;
  int draws = 0;
};

/// Bayesian bound on the per-coefficient estimation MSE, averaged over
/// `draws` channel draws. M = 1 uses the exact symbol-spaced information;
/// M > 1 the moment-matching lower bound. The draw population is split into
/// up to ten equal-offset batches whose spread yields the error bar; the
/// reported value recombines the batches exactly.
inline CrbPoint run_crb_point(const PointSpec& s, int draws,
                              std::uint64_t seed, int workers) {
  require(draws >= 1, "run_crb_point: draws must be >= 1");
  const auto model = PilotFrameModel::build(s.n_t, s.n_r, s.tau, s.M, s.beta,
                                            s.rho, make_pilots(s.n_t, s.tau));
  const ChannelPrior prior(s.n_t, s.n_r, s.rho);
  const double sigma2 = s.sigma2();
  const MatR J_prior = bim_prior(prior);

  const int nb = std::min(10, draws);
  const int base = draws / nb, rem = draws % nb;
  std::vector<int> size(nb), offset(nb);
  for (int b = 0; b < nb; ++b) {
    size[b] = base + (b < rem ? 1 : 0);
    offset[b] = b * base + std::min(b, rem);
  }

  std::vector<MatR> J(nb);
  detail::parallel_index_loop(nb, workers, [&](int b) {
    const Bim bim =
        s.M == 1
            ? bim_data_m1(model.Phi, sigma2, prior, size[b], seed, offset[b])
            : bim_data_lower_oversampled(model.Phi, sigma2 * model.GGt,
                                         s.n_r, prior, size[b], seed,
                                         offset[b]);
    J[b] = bim.J;
  });

  MatR J_full = MatR::Zero(J[0].rows(), J[0].cols());
  std::vector<double> crb_b(nb);
  for (int b = 0; b < nb; ++b) {
    J_full += (static_cast<double>(size[b]) / draws) * J[b];
    crb_b[b] = crb_from_bim(J[b], J_prior);
  }

  CrbPoint out;
  out.draws = draws;
  out.crb = crb_from_bim(J_full, J_prior);
  if (nb >= 2) {
    const double m = detail::mean_of(crb_b);
    out.ci = normal_ci_half(detail::sd_of(crb_b, m), nb);
  }
  return out;
}

struct SerPoint {
  double est_ser = 0.0, est_ci = 0.0;
  double perf_ser = 0.0, perf_ci = 0.0;
  std::int64_t symbols = 0;
};

/// Uncoded symbol error rate of the sliding-window detector under estimated
/// and perfect channel knowledge, on shared per-block draws.
inline SerPoint run_ser_point(const PointSpec& s, int block_len, int window,
                              int blocks, std::uint64_t seed, int workers) {
  require(blocks >= 1, "run_ser_point: blocks must be >= 1");
  const auto data =
      DataPhaseModel::build(s.n_t, s.n_r, s.M, block_len, window, s.beta);
  const auto pilot = PilotFrameModel::build(s.n_t, s.n_r, s.tau, s.M, s.beta,
                                            s.rho, make_pilots(s.n_t, s.tau));
  const ChannelPrior prior(s.n_t, s.n_r, s.rho);
  const double sigma2 = s.sigma2();
  const LinearEstimator lra = lra_lmmse_estimator(pilot, sigma2);

  const std::int64_t per_block =
      static_cast<std::int64_t>(block_len) * s.n_t;
  std::vector<std::int64_t> err_est(blocks), err_perf(blocks);
  detail::parallel_index_loop(blocks, workers, [&](int b) {
    const auto ub = static_cast<std::uint64_t>(b);
    RngStream ch(seed, ub, purpose::kChannel);
    RngStream xs(seed, ub, purpose::kDataSymbols);
    RngStream dn(seed, ub, purpose::kDataNoise);
    RngStream pn(seed, ub, purpose::kPilotNoise);

    const MatC H = prior.sample(ch);
    std::vector<unsigned> truth;
    const MatC X = data.draw_symbols(xs, &truth);
    const MatC yq =
        quantize(MatC(data.transmit_frame(X, H) + data.synth_noise(sigma2, dn)));

    const MatC pilot_frame =
        pilot.noiseless_frame(H) + pilot.synth_noise(sigma2, pn);
    const VecC h_hat = lra.estimate_frame(quantize(pilot_frame));
    const Eigen::Map<const MatC> H_hat(h_hat.data(), s.n_r, s.n_t);

    auto count = [&](const MatC& Hd) {
      const std::vector<unsigned> dec =
          WindowDetector(data, Hd, sigma2).detect(yq);
      std::int64_t e = 0;
      for (std::size_t i = 0; i < truth.size(); ++i)
        if (dec[i] != truth[i]) ++e;
      return e;
    };
    err_est[b] = count(H_hat);
    err_perf[b] = count(H);
  });

  std::int64_t tot_est = 0, tot_perf = 0;
  for (int b = 0; b < blocks; ++b) {
    tot_est += err_est[b];
    tot_perf += err_perf[b];
  }
  SerPoint out;
  out.symbols = per_block * blocks;
  out.est_ser = static_cast<double>(tot_est) / static_cast<double>(out.symbols);
  out.perf_ser =
      static_cast<double>(tot_perf) / static_cast<double>(out.symbols);
  out.est_ci = wilson_ci_half(tot_est, out.symbols);
  out.perf_ci = wilson_ci_half(tot_perf, out.symbols);
  return out;
}

namespace detail {

struct GridPoint {
  std::string sweep_name;
  double sweep_value;
  PointSpec spec;
};

/// Cartesian sweep grid: over SNR by default, over tau when tau_grid is set
/// (the single configured SNR then applies everywhere).
inline std::vector<GridPoint> sweep_grid(const SimConfig& c) {
  std::vector<GridPoint> g;
  for (int m : c.m_factors) {
    PointSpec s;
    s.n_t = c.n_t;
    s.n_r = c.n_r;
    s.tau = c.tau;
    s.M = m;
    s.rho = c.rho;
    s.beta = c.roll_off;
    if (!c.tau_grid.empty()) {
      s.snr_db = c.snr_db.front();
      for (int tau : c.tau_grid) {
        s.tau = tau;
        g.push_back({"tau", static_cast<double>(tau), s});
      }
    } else {
      for (double snr : c.snr_db) {
        s.snr_db = snr;
        g.push_back({"snr_db", snr, s});
      }
    }
  }
  return g;
}

inline CurveRecord base_record(const GridPoint& p, const SimConfig& c) {
  CurveRecord r;
  r.sweep_name = p.sweep_name;
  r.sweep_value = p.sweep_value;
  r.M = p.spec.M;
  r.rho = c.rho;
  r.seed = c.seed;
  return r;
}

}  // namespace detail

/// Estimation-error sweep: per grid point, empirical MSE of the 1-bit and
/// unquantized filters plus the Bayesian bound.
inline std::vector<CurveRecord> run_mse_sweep(const SimConfig& c) {
  c.validate();
  std::vector<CurveRecord> rows;
  for (const auto& p : detail::sweep_grid(c)) {
    const MsePoint mse = run_mse_point(p.spec, c.trials, c.seed, c.workers);
    const CrbPoint crb =
        run_crb_point(p.spec, c.bound_draws, c.seed, c.workers);
    CurveRecord r = detail::base_record(p, c);
    r.metric_name = "mse";
    r.trials = mse.trials;
    r.estimator_or_bound = "lra_lmmse";
    r.value = mse.lra_mse;
    r.ci_half_width = mse.lra_ci;
    rows.push_back(r);
    r.estimator_or_bound = "unquantized_lmmse";
    r.value = mse.unq_mse;
    r.ci_half_width = mse.unq_ci;
    rows.push_back(r);
    r.metric_name = "crb";
    r.estimator_or_bound = "bayesian_crb";
    r.value = crb.crb;
    r.ci_half_width = crb.ci;
    r.trials = crb.draws;
    rows.push_back(r);
  }
  return rows;
}

/// Bayesian-bound sweep only.
inline std::vector<CurveRecord> run_crb_sweep(const SimConfig& c) {
  c.validate();
  std::vector<CurveRecord> rows;
  for (const auto& p : detail::sweep_grid(c)) {
    const CrbPoint crb =
        run_crb_point(p.spec, c.bound_draws, c.seed, c.workers);
    CurveRecord r = detail::base_record(p, c);
    r.metric_name = "crb";
    r.estimator_or_bound = "bayesian_crb";
    r.value = crb.crb;
    r.ci_half_width = crb.ci;
    r.trials = crb.draws;
    rows.push_back(r);
  }
  return rows;
}

/// Symbol-error-rate sweep under estimated and perfect channel knowledge.
inline std::vector<CurveRecord> run_ser_sweep(const SimConfig& c) {
  c.validate();
  std::vector<CurveRecord> rows;
  for (const auto& p : detail::sweep_grid(c)) {
    const SerPoint ser = run_ser_point(p.spec, c.data_block_len, c.window,
                                       c.trials, c.seed, c.workers);
    CurveRecord r = detail::base_record(p, c);
    r.metric_name = "ser";
    r.trials = static_cast<int>(ser.symbols);
    r.estimator_or_bound = "estimated_csi";
    r.value = ser.est_ser;
    r.ci_half_width = ser.est_ci;
    rows.push_back(r);
    r.estimator_or_bound = "perfect_csi";
    r.value = ser.perf_ser;
    r.ci_half_width = ser.perf_ci;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace onebit
