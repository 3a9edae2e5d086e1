#pragma once

// Spatially correlated Rayleigh channel prior.
//
// The uplink has N_t single-antenna users and an N_r-antenna receiver. The
// stacked channel vector h (length N_t * N_r) uses user-major indexing:
// coefficient q = t * N_r + r couples user t to receive antenna r, i.e.
// h = vec(H) for the N_r x N_t matrix H in column-major order. Users fade
// independently; receive antennas share an exponential-in-squared-distance
// correlation, so C_h = I_{N_t} (x) R_r.

#include "onebit/common.hpp"
#include "onebit/philox.hpp"

namespace onebit {

/// Receive-side correlation R[i][j] = rho^((i-j)^2), 0 <= rho < 1.
inline MatR receive_correlation(int n_r, double rho) {
  require(n_r >= 1, "receive_correlation: n_r must be >= 1");
  require(rho >= 0.0 && rho < 1.0, "receive_correlation: rho must be in [0, 1)");
  MatR R(n_r, n_r);
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < n_r; ++j)
      R(i, j) = std::pow(rho, static_cast<double>((i - j) * (i - j)));
  return R;
}

/// Channel prior: correlation structure plus a matched sampler.
class ChannelPrior {
 public:
  ChannelPrior(int n_t, int n_r, double rho)
      : n_t_(n_t), n_r_(n_r), rho_(rho), R_(receive_correlation(n_r, rho)) {
    require(n_t >= 1, "ChannelPrior: n_t must be >= 1");
    Eigen::SelfAdjointEigenSolver<MatR> es(R_);
    require(es.eigenvalues().minCoeff() > -1e-10,
            "ChannelPrior: receive correlation is not positive semidefinite");
    const VecR lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    sqrt_R_ = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  }

  int n_t() const { return n_t_; }
  int n_r() const { return n_r_; }
  double rho() const { return rho_; }
  const MatR& receive_corr() const { return R_; }

  /// Covariance of the stacked channel vector: I_{N_t} (x) R_r.
  MatC stacked_covariance() const {
    return kron(MatC::Identity(n_t_, n_t_), R_.cast<cxd>());
  }

  /// Draw H (N_r x N_t): columns are per-user antenna responses, each
  /// CN(0, R_r). vec(H) has covariance I (x) R_r.
  MatC sample(RngStream& rng) const {
    MatC Hw(n_r_, n_t_);
    rng.fill_cnormal(Hw);
    return sqrt_R_.cast<cxd>() * Hw;
  }

 private:
  int n_t_, n_r_;
  double rho_;
  MatR R_, sqrt_R_;
};

}  // namespace onebit
