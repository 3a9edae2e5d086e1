#pragma once

// Linear MMSE channel estimation from pilot observations.
//
// Two estimators share the same interface:
//  * lra_lmmse_estimator — the quantization-aware estimator. The 1-bit output
//    is linearized with the Bussgang decomposition (effective observation
//    operator A_p Phi) and the exact quantized-output covariance from the
//    arcsine law; the LMMSE filter is W = C_h (A_p Phi)^H C_yQ^{-1}.
//  * unquantized_estimator — the classical LMMSE filter for the same frame
//    before quantization, W = C_h Phi^H C_y^{-1}.
//
// Both carry their exact (closed-form) per-coefficient MSE, which for a
// linear filter in a Gaussian model is tr(C_h) - Re tr(B^H C^{-1} B) with
// B the cross-covariance; this lets Monte Carlo runs be cross-checked
// against the analytic value.

#include "onebit/quantize.hpp"
#include "onebit/system.hpp"

namespace onebit {

/// Linear estimator h_hat = W y with the solve cached as A = C^{-1} B,
/// W = A^H, plus its closed-form per-coefficient MSE.
struct LinearEstimator {
  MatC A;             ///< pre-adjoint filter: h_hat = A^H y
  double mse = 0.0;   ///< exact per-coefficient MSE under the model

  VecC estimate(const VecC& y) const { return A.adjoint() * y; }

  /// Estimate from a K x N_r receive frame (antenna-major stacking).
  VecC estimate_frame(const MatC& frame) const {
    return estimate(stack_frame(frame));
  }
};

/// Quantization-aware LMMSE estimator for 1-bit observations.
inline LinearEstimator lra_lmmse_estimator(const PilotFrameModel& m,
                                           double sigma2) {
  require(sigma2 > 0.0, "lra_lmmse_estimator: sigma2 must be positive");
  const MatC Cy = m.covariance(sigma2);
  const VecR a = bussgang_gains(Cy);
  const MatC CyQ = arcsin_covariance(Cy);
  const MatC B = a.cast<cxd>().asDiagonal() * (m.Phi * m.Ch);
  LinearEstimator est;
  est.A = solve_hpd(CyQ, B, "lra_lmmse_estimator");
  const double total = m.Ch.trace().real() - (B.adjoint() * est.A).trace().real();
  est.mse = total / static_cast<double>(m.dim());
  return est;
}

/// Classical LMMSE estimator for the unquantized frame. sigma2 = 0 is
/// allowed for identifiability checks; the solve then relies on the ridge
/// escalation policy.
inline LinearEstimator unquantized_estimator(const PilotFrameModel& m,
                                             double sigma2) {
  require(sigma2 >= 0.0, "unquantized_estimator: sigma2 must be >= 0");
  const MatC Cy = m.covariance(sigma2);
  const MatC B = m.Phi * m.Ch;
  LinearEstimator est;
  est.A = solve_hpd(Cy, B, "unquantized_estimator");
  const double total = m.Ch.trace().real() - (B.adjoint() * est.A).trace().real();
  est.mse = total / static_cast<double>(m.dim());
  return est;
}

/// Analytic per-coefficient MSE of the unquantized estimator in the
/// white-noise, orthogonal-pilot regime: 1 / (1 + tau / sigma2).
inline double unquantized_white_mse(int tau, double sigma2) {
  return 1.0 / (1.0 + static_cast<double>(tau) / sigma2);
}

/// Noise variance for a per-user transmit SNR in dB with N_t unit-power
/// users: sigma_n^2 = N_t * 10^(-snr/10).
inline double noise_variance(int n_t, double snr_db) {
  return static_cast<double>(n_t) * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace onebit
