#pragma once

// Pulse shaping and receive-filter geometry.
//
// The transmit/receive pulse is a root-raised-cosine (RRC) with roll-off
// `beta`, truncated to N symbol periods on each side of the peak and sampled
// at M samples per symbol (2MN+1 taps, normalized to unit energy). Two Gram
// matrices describe the effective symbol coupling after the receive filter:
//
//  * build_z_matrix — the Gram of the truncated, sampled pulse (the filter
//    self-convolution at the sample grid, scaled to unit peak). This is what
//    the sampled hardware chain actually realizes and is used for the pilot
//    (estimation) phase.
//  * nyquist_z_matrix — samples of the ideal continuous raised cosine at the
//    same grid. The ideal pulse satisfies the Nyquist criterion, so at M = 1
//    this matrix is the identity to machine precision; it is used for the
//    data (detection) phase signatures.

#include <cmath>

#include "onebit/common.hpp"

namespace onebit {

/// Root-raised-cosine impulse response at symbol-normalized time t (T = 1),
/// unit-energy-per-symbol-rate convention *before* tap normalization.
inline double rrc_pulse(double t, double beta) {
  require(beta > 0.0 && beta <= 1.0, "rrc_pulse: beta must be in (0, 1]");
  const double at = std::abs(t);
  if (at < 1e-12) return 1.0 - beta + 4.0 * beta / kPi;
  if (std::abs(4.0 * beta * at - 1.0) < 1e-9) {
    const double a = kPi / (4.0 * beta);
    return (beta / std::numbers::sqrt2) *
           ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
  }
  const double num = std::sin(kPi * t * (1.0 - beta)) +
                     4.0 * beta * t * std::cos(kPi * t * (1.0 + beta));
  const double den = kPi * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
  return num / den;
}

/// RRC filter taps: length 2MN+1, sampled at T/M spacing, unit energy.
inline VecR rrc_taps(int M, int N, double beta) {
  require(M >= 1, "rrc_taps: M must be >= 1");
  require(N >= 1, "rrc_taps: N must be >= 1");
  const int L = M * N;
  VecR taps(2 * L + 1);
  for (int k = 0; k <= 2 * L; ++k)
    taps[k] = rrc_pulse(static_cast<double>(k - L) / M, beta);
  taps /= taps.norm();
  return taps;
}

/// Receive filter matrix: maps a length-3MN input sample stream to the MN
/// in-window filtered samples. Row r holds the taps aligned so that the
/// center tap multiplies input sample r + MN; with unit-energy taps,
/// diag(G Gᵀ) = 1 identically.
inline MatR build_g_matrix(const VecR& taps, int M, int N) {
  const int L = M * N;
  require(taps.size() == 2 * L + 1,
          "build_g_matrix: taps length must equal 2*M*N + 1");
  MatR G = MatR::Zero(L, 3 * L);
  for (int r = 0; r < L; ++r)
    for (int k = 0; k <= 2 * L; ++k) G(r, r + k) = taps[k];
  return G;
}

/// Symbol-coupling Gram matrix of the truncated sampled pulse: the taps'
/// self-convolution evaluated on the T/M grid, scaled to unit peak.
inline MatR build_z_matrix(const VecR& taps, int M, int N) {
  const int L = M * N;
  require(taps.size() == 2 * L + 1,
          "build_z_matrix: taps length must equal 2*M*N + 1");
  // Full autocorrelation; lag 0 sits at index 2L.
  VecR acf = VecR::Zero(4 * L + 1);
  for (int lag = -2 * L; lag <= 2 * L; ++lag) {
    double s = 0.0;
    const int lo = std::max(0, -lag), hi = std::min(2 * L, 2 * L - lag);
    for (int k = lo; k <= hi; ++k) s += taps[k] * taps[k + lag];
    acf[2 * L + lag] = s;
  }
  acf /= acf[2 * L];
  MatR Z(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) Z(i, j) = acf[2 * L + (j - i)];
  return Z;
}

/// Ideal raised-cosine pulse value at symbol-normalized time t.
inline double raised_cosine(double t, double beta) {
  require(beta > 0.0 && beta <= 1.0, "raised_cosine: beta must be in (0, 1]");
  if (t == 0.0) return 1.0;
  const double at = std::abs(t);
  if (std::abs(2.0 * beta * at - 1.0) < 1e-9) {
    const double x = 1.0 / (2.0 * beta);
    return (kPi / 4.0) * std::sin(kPi * x) / (kPi * x);
  }
  const double s = std::sin(kPi * t) / (kPi * t);
  const double d = 1.0 - (2.0 * beta * t) * (2.0 * beta * t);
  return s * std::cos(kPi * beta * t) / d;
}

/// Symbol-coupling matrix of the ideal (untruncated) raised cosine sampled
/// at T/M: Z[i][j] = rc((i-j)/M). Nyquist property: identity at M = 1.
inline MatR nyquist_z_matrix(int M, int N, double beta) {
  require(M >= 1 && N >= 1, "nyquist_z_matrix: M, N must be >= 1");
  const int L = M * N;
  MatR Z(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      Z(i, j) = raised_cosine(static_cast<double>(i - j) / M, beta);
  return Z;
}

/// Zero-stuffing upsampler: symbol k occupies sample k*M + M - 1, all other
/// samples are zero. UᵀU = I; M = 1 gives the identity.
inline MatR build_upsampler(int M, int N) {
  require(M >= 1 && N >= 1, "build_upsampler: M, N must be >= 1");
  MatR U = MatR::Zero(M * N, N);
  for (int k = 0; k < N; ++k) U(k * M + M - 1, k) = 1.0;
  return U;
}

}  // namespace onebit
