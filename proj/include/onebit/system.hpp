#pragma once

// Pilot-phase system model.
//
// tau pilot symbols per user are upsampled by M, shaped by the pulse, and
// observed through N_r antennas. Received samples use antenna-major indexing:
// sample i of antenna r sits at row r*K + i, with K = M*tau samples per
// antenna. The effective per-user signatures are the columns of
// Psi = Z U X (K x N_t), and the stacked linear model is y = Phi h + n with
// Phi[r*K + i, t*N_r + r] = Psi[i, t].

#include <utility>

#include "onebit/channel.hpp"
#include "onebit/common.hpp"
#include "onebit/philox.hpp"
#include "onebit/signal.hpp"

namespace onebit {

/// Default stream constant for the built-in pilot book.
inline constexpr std::uint64_t kDefaultPilotSeed = 2;

/// Orthogonal unit-modulus pilot matrix (tau x N_t): a stack of tau/p
/// independently scrambled p x p Hadamard tiles, p the smallest power of two
/// >= N_t, with random QPSK row/column phases and a column permutation per
/// tile. Columns satisfy pilots^H pilots = tau * I exactly; entries are
/// unit-modulus QPSK-alphabet values. Requires tau to be a multiple of p.
inline MatC make_pilots(int n_t, int tau, std::uint64_t seed = kDefaultPilotSeed) {
  require(n_t >= 1, "make_pilots: n_t must be >= 1");
  int p = 1;
  while (p < n_t) p *= 2;
  require(tau >= p && tau % p == 0,
          "make_pilots: tau must be a positive multiple of the tile size "
          "(smallest power of two >= n_t)");

  // p x p real Hadamard via Sylvester doubling.
  MatR H = MatR::Ones(1, 1);
  while (H.rows() < p) {
    const int m = static_cast<int>(H.rows());
    MatR H2(2 * m, 2 * m);
    H2.topLeftCorner(m, m) = H;
    H2.topRightCorner(m, m) = H;
    H2.bottomLeftCorner(m, m) = H;
    H2.bottomRightCorner(m, m) = -H;
    H = std::move(H2);
  }

  const cxd qpsk[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  MatC pilots(tau, n_t);
  for (int tile = 0; tile < tau / p; ++tile) {
    RngStream rng(seed, static_cast<std::uint64_t>(tile), purpose::kPilotBook);
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    for (int i = p - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.next_u32() % (i + 1)]);
    std::vector<cxd> rowph(p), colph(p);
    for (int i = 0; i < p; ++i) rowph[i] = qpsk[rng.next_u32() & 3u];
    for (int i = 0; i < p; ++i) colph[i] = qpsk[rng.next_u32() & 3u];
    for (int i = 0; i < p; ++i)
      for (int c = 0; c < n_t; ++c)
        pilots(tile * p + i, c) = rowph[i] * H(i, perm[c]) * colph[c];
  }
  return pilots;
}

/// Pilot-phase model matrices for one (M, tau) configuration.
struct PilotFrameModel {
  int n_t = 0, n_r = 0, tau = 0, M = 1;
  double beta = 0.8;
  VecR taps;   ///< RRC taps, 2*M*tau + 1
  MatR G;      ///< receive filter map, K x 3K
  MatR GGt;    ///< noise coloring G G^T, K x K
  MatR Z;      ///< sampled-pulse coupling, K x K
  MatR U;      ///< upsampler, K x tau
  MatC pilots; ///< tau x N_t
  MatC Psi;    ///< per-user signatures Z U X, K x N_t
  MatC Phi;    ///< stacked model, K*N_r x N_t*N_r
  MatC Ch;     ///< channel covariance I (x) R_r
  MatR Rr;     ///< receive correlation

  int samples_per_antenna() const { return M * tau; }
  int dim() const { return n_t * n_r; }

  static PilotFrameModel build(int n_t, int n_r, int tau, int M, double beta,
                               double rho, const MatC& pilot_book) {
    require(tau >= n_t, "PilotFrameModel: tau must be >= n_t");
    require(pilot_book.rows() == tau && pilot_book.cols() == n_t,
            "PilotFrameModel: pilot book must be tau x n_t");
    PilotFrameModel m;
    m.n_t = n_t;
    m.n_r = n_r;
    m.tau = tau;
    m.M = M;
    m.beta = beta;
    m.taps = rrc_taps(M, tau, beta);
    m.G = build_g_matrix(m.taps, M, tau);
    m.GGt = m.G * m.G.transpose();
    m.Z = build_z_matrix(m.taps, M, tau);
    m.U = build_upsampler(M, tau);
    m.pilots = pilot_book;
    m.Psi = m.Z.cast<cxd>() * (m.U.cast<cxd>() * m.pilots);
    m.Phi = assemble_phi(m.Psi, n_r);
    m.Rr = receive_correlation(n_r, rho);
    m.Ch = kron(MatC::Identity(n_t, n_t), m.Rr.cast<cxd>());
    return m;
  }

  /// Stacked observation operator from per-user signatures: column t*N_r + r
  /// is the signature of user t placed in antenna r's sample block.
  static MatC assemble_phi(const MatC& Psi, int n_r) {
    const int K = static_cast<int>(Psi.rows());
    const int n_t = static_cast<int>(Psi.cols());
    MatC Phi = MatC::Zero(static_cast<Eigen::Index>(K) * n_r,
                          static_cast<Eigen::Index>(n_t) * n_r);
    for (int t = 0; t < n_t; ++t)
      for (int r = 0; r < n_r; ++r)
        Phi.block(static_cast<Eigen::Index>(r) * K, t * n_r + r, K, 1) =
            Psi.col(t);
    return Phi;
  }

  /// Unquantized receive covariance at noise variance sigma2:
  /// Phi C_h Phi^H + sigma2 * I (x) G G^T, exploiting the Kronecker blocks.
  MatC covariance(double sigma2) const {
    const MatC S = Psi * Psi.adjoint();
    MatC Cy = kron(Rr.cast<cxd>(), S);
    const MatC Cn = GGt.cast<cxd>() * sigma2;
    const int K = samples_per_antenna();
    for (int r = 0; r < n_r; ++r) Cy.block(r * K, r * K, K, K) += Cn;
    return Cy;
  }

  /// Noiseless receive frame (K x N_r) for channel H (N_r x N_t):
  /// column r is Psi * H.row(r)^T.
  MatC noiseless_frame(const MatC& H) const { return Psi * H.transpose(); }

  /// Filtered pilot-phase noise frame (K x N_r): per antenna, a length-3K
  /// i.i.d. CN(0, sigma2) stream passed through the receive filter.
  MatC synth_noise(double sigma2, RngStream& rng) const {
    const int K = samples_per_antenna();
    MatC W(3 * K, n_r);
    rng.fill_cnormal(W);
    return std::sqrt(sigma2) * (G.cast<cxd>() * W);
  }
};

/// [Re; Im] stacking of a complex vector.
inline VecR real_stack(const VecC& x) {
  VecR out(2 * x.size());
  out.head(x.size()) = x.real();
  out.tail(x.size()) = x.imag();
  return out;
}

inline VecC real_unstack(const VecR& s) {
  require(s.size() % 2 == 0, "real_unstack: length must be even");
  const Eigen::Index n = s.size() / 2;
  VecC out(n);
  out.real() = s.head(n);
  out.imag() = s.tail(n);
  return out;
}

/// Antenna-major stacked vector of a K x N_r frame (antenna r occupies rows
/// r*K .. r*K + K - 1).
inline VecC stack_frame(const MatC& frame) {
  VecC v(frame.size());
  for (Eigen::Index r = 0; r < frame.cols(); ++r)
    v.segment(r * frame.rows(), frame.rows()) = frame.col(r);
  return v;
}

}  // namespace onebit
