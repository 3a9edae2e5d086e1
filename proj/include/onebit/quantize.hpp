#pragma once

// 1-bit quantization and its second-order statistics.
//
// The ADC keeps only the signs of the real and imaginary parts, mapping each
// sample to one of four points {±1 ± j}/sqrt(2). For zero-mean proper
// Gaussian inputs, the quantizer output is statistically equivalent to the
// linear Bussgang decomposition y_Q = A y + d with A diagonal, and the output
// covariance follows the arcsine law.

#include <cmath>

#include "onebit/common.hpp"

namespace onebit {

/// Elementwise 1-bit quantizer: (sgn Re + j sgn Im)/sqrt(2), sgn(0) = +1.
inline cxd quantize_sample(cxd v) {
  const double re = v.real() >= 0.0 ? kInvSqrt2 : -kInvSqrt2;
  const double im = v.imag() >= 0.0 ? kInvSqrt2 : -kInvSqrt2;
  return {re, im};
}

template <typename Derived>
MatC quantize(const Eigen::MatrixBase<Derived>& y) {
  MatC out(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c)
    for (Eigen::Index r = 0; r < y.rows(); ++r)
      out(r, c) = quantize_sample(y(r, c));
  return out;
}

/// Diagonal Bussgang gains for input covariance Cy:
/// a_k = sqrt(2/pi) / sqrt(Cy[k][k]).
inline VecR bussgang_gains(const MatC& Cy) {
  require(Cy.rows() == Cy.cols(), "bussgang_gains: covariance must be square");
  VecR a(Cy.rows());
  for (Eigen::Index k = 0; k < Cy.rows(); ++k) {
    const double d = Cy(k, k).real();
    require(d > 0.0, "bussgang_gains: covariance diagonal must be positive");
    a[k] = std::sqrt(2.0 / kPi) / std::sqrt(d);
  }
  return a;
}

/// Arcsine-law covariance of the 1-bit output for Gaussian input covariance
/// Cy: with K = diag(Cy)^(-1/2),
///   C_yQ = (2/pi) [ asin(K Re(Cy) K) + j asin(K Im(Cy) K) ].
/// Normalized correlations are clamped when within 1e-9 of ±1; larger
/// excursions indicate an invalid covariance and raise an error.
inline MatC arcsin_covariance(const MatC& Cy) {
  require(Cy.rows() == Cy.cols(), "arcsin_covariance: matrix must be square");
  const Eigen::Index n = Cy.rows();
  VecR inv_sd(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = Cy(k, k).real();
    require(d > 0.0, "arcsin_covariance: diagonal must be positive");
    inv_sd[k] = 1.0 / std::sqrt(d);
  }
  const auto clamp_unit = [](double v) {
    if (v > 1.0) {
      require(v <= 1.0 + 1e-9,
              "arcsin_covariance: normalized correlation exceeds 1 beyond "
              "tolerance");
      return 1.0;
    }
    if (v < -1.0) {
      require(v >= -1.0 - 1e-9,
              "arcsin_covariance: normalized correlation is below -1 beyond "
              "tolerance");
      return -1.0;
    }
    return v;
  };
  MatC out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = inv_sd[i] * inv_sd[j];
      const double re = clamp_unit(Cy(i, j).real() * s);
      const double im = clamp_unit(Cy(i, j).imag() * s);
      out(i, j) = (2.0 / kPi) * cxd{std::asin(re), std::asin(im)};
    }
  return out;
}

}  // namespace onebit
