#pragma once

// Data-phase symbol detection from 1-bit observations.
//
// A block of N QPSK symbols per user is pulse-shaped and received through
// the same 1-bit front end as the pilots. Detection runs a sliding window of
// `window` symbols (default 3): for each target position the in-window
// samples of all antennas are combined by a quantization-aware LMMSE filter
// (Bussgang linearization + arcsine-law covariance), then hard-sliced.
//
// The window covariance uses the ideal pulse signatures (Nyquist at symbol
// rate): C_w = (H H^H) (x) S_rows + sigma2 * I (x) (G G^T)_rows, where
// S = (Z U)(Z U)^H accumulates the whole block's signatures, so interference
// from symbols outside the window enters the covariance automatically. Edge
// windows shrink one-sidedly and carry their own filters; all interior
// positions share one filter computed at a mid-block template, which is
// exact at M = 1 and accurate to the pulse's far tail otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "onebit/common.hpp"
#include "onebit/philox.hpp"
#include "onebit/quantize.hpp"
#include "onebit/signal.hpp"

namespace onebit {

/// Gray-mapped QPSK: bit1 selects the real sign, bit0 the imaginary sign;
/// 00 -> (+1+j)/sqrt(2).
inline cxd qpsk_symbol(unsigned bits) {
  const double re = (bits & 2u) ? -kInvSqrt2 : kInvSqrt2;
  const double im = (bits & 1u) ? -kInvSqrt2 : kInvSqrt2;
  return {re, im};
}

inline unsigned qpsk_decide(cxd v) {
  return ((v.real() < 0.0) ? 2u : 0u) | ((v.imag() < 0.0) ? 1u : 0u);
}

/// Fraction of mismatched symbol decisions.
inline double symbol_error_rate(const std::vector<unsigned>& decided,
                                const std::vector<unsigned>& truth) {
  require(decided.size() == truth.size() && !decided.empty(),
          "symbol_error_rate: decision/truth lengths must match and be "
          "nonempty");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < decided.size(); ++i)
    if (decided[i] != truth[i]) ++bad;
  return static_cast<double>(bad) / static_cast<double>(decided.size());
}

/// Data-phase geometry shared by all blocks of one configuration.
struct DataPhaseModel {
  int n_t = 0, n_r = 0, M = 1, N = 0, window = 3;
  double beta = 0.8;
  MatR G;    ///< receive filter map for the data block, MN x 3MN
  MatR GGt;  ///< noise coloring, MN x MN
  MatR ZU;   ///< ideal-pulse symbol signatures, MN x N
  MatR S;    ///< signature Gram ZU ZU^T, MN x MN

  int samples() const { return M * N; }

  static DataPhaseModel build(int n_t, int n_r, int M, int N, int window,
                              double beta) {
    require(window >= 1 && window % 2 == 1,
            "DataPhaseModel: window must be odd and positive");
    require(N >= window, "DataPhaseModel: block length must be >= window");
    DataPhaseModel m;
    m.n_t = n_t;
    m.n_r = n_r;
    m.M = M;
    m.N = N;
    m.window = window;
    m.beta = beta;
    const VecR taps = rrc_taps(M, N, beta);
    m.G = build_g_matrix(taps, M, N);
    m.GGt = m.G * m.G.transpose();
    const int L = M * N;
    m.ZU.resize(L, N);
    for (int i = 0; i < L; ++i)
      for (int k = 0; k < N; ++k)
        m.ZU(i, k) =
            raised_cosine(static_cast<double>(i - (k * M + M - 1)) / M, beta);
    m.S = m.ZU * m.ZU.transpose();
    return m;
  }

  /// Noiseless receive frame (MN x N_r) for symbols X (N x n_t) and channel
  /// H (N_r x n_t).
  MatC transmit_frame(const MatC& X, const MatC& H) const {
    return (ZU.cast<cxd>() * X) * H.transpose();
  }

  /// Filtered data-phase noise frame (MN x N_r).
  MatC synth_noise(double sigma2, RngStream& rng) const {
    MatC W(3 * samples(), n_r);
    rng.fill_cnormal(W);
    return std::sqrt(sigma2) * (G.cast<cxd>() * W);
  }

  /// Draw a uniform QPSK symbol block (N x n_t) and its bit labels.
  MatC draw_symbols(RngStream& rng, std::vector<unsigned>* bits) const {
    MatC X(N, n_t);
    if (bits) bits->resize(static_cast<std::size_t>(N) * n_t);
    for (int t = 0; t < n_t; ++t)
      for (int n = 0; n < N; ++n) {
        const unsigned b = rng.next_u32() & 3u;
        X(n, t) = qpsk_symbol(b);
        if (bits) (*bits)[static_cast<std::size_t>(t) * N + n] = b;
      }
    return X;
  }
};

/// Sliding-window LMMSE detector bound to one channel realization (true or
/// estimated) and one noise level.
class WindowDetector {
 public:
  /// quantized = false builds the classical LMMSE filter on the unquantized
  /// samples (used for noiseless sanity checks).
  WindowDetector(const DataPhaseModel& m, const MatC& Hd, double sigma2,
                 bool quantized = true)
      : m_(&m) {
    require(Hd.rows() == m.n_r && Hd.cols() == m.n_t,
            "WindowDetector: channel matrix must be n_r x n_t");
    const int N = m.N, w = m.window, L = m.samples();
    const MatC HH = Hd * Hd.adjoint();
    class_of_.resize(N);
    row0_of_.resize(N);
    // Edge positions own a class each; interior positions share a template.
    std::vector<int> edge_positions;
    for (int n = 0; n < N; ++n)
      if (n < w - 1 || n >= N - w + 1) edge_positions.push_back(n);
    const int interior_class = static_cast<int>(edge_positions.size());
    const int n0 = N / 2;

    auto rows_of = [&](int n) {
      const int half = (w - 1) / 2;
      const int lo = std::max((n - half) * m.M, 0);
      const int hi = std::min((n + half + 1) * m.M, L);
      return std::pair<int, int>{lo, hi - lo};
    };

    auto build_filter = [&](int n) {
      const auto [row0, k] = rows_of(n);
      const Eigen::Index nr = m.n_r;
      MatC C(k * nr, k * nr);
      const MatR Ssub = m.S.block(row0, row0, k, k);
      const MatR Gsub = m.GGt.block(row0, row0, k, k);
      for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index q = 0; q < nr; ++q) {
          C.block(r * k, q * k, k, k) = HH(r, q) * Ssub.cast<cxd>();
          if (r == q)
            C.block(r * k, q * k, k, k) += sigma2 * Gsub.cast<cxd>();
        }
      // Target signatures within the window.
      VecR sig(k);
      for (int i = 0; i < k; ++i) sig[i] = m.ZU(row0 + i, n);
      MatC Hw(k * nr, m.n_t);
      for (Eigen::Index r = 0; r < nr; ++r)
        for (int t = 0; t < m.n_t; ++t)
          Hw.block(r * k, t, k, 1) = Hd(r, t) * sig.cast<cxd>();
      Class cls;
      cls.rows = k;
      if (quantized) {
        const VecR a = bussgang_gains(C);
        const MatC CyQ = arcsin_covariance(C);
        cls.W = solve_hpd(CyQ, a.cast<cxd>().asDiagonal() * Hw,
                          "WindowDetector");
      } else {
        cls.W = solve_hpd(C, Hw, "WindowDetector");
      }
      return cls;
    };

    for (std::size_t e = 0; e < edge_positions.size(); ++e) {
      const int n = edge_positions[e];
      classes_.push_back(build_filter(n));
      class_of_[n] = static_cast<int>(e);
    }
    classes_.push_back(build_filter(n0));
    for (int n = 0; n < N; ++n) {
      row0_of_[n] = rows_of(n).first;
      if (n >= w - 1 && n < N - w + 1) class_of_[n] = interior_class;
    }
  }

  /// Soft symbol estimates (N x n_t) from a received frame (MN x N_r).
  MatC soft_estimates(const MatC& frame) const {
    const auto& m = *m_;
    MatC out(m.N, m.n_t);
    VecC yw;
    for (int n = 0; n < m.N; ++n) {
      const auto& cls = classes_[class_of_[n]];
      const int k = cls.rows, row0 = row0_of_[n];
      yw.resize(static_cast<Eigen::Index>(k) * m.n_r);
      for (int r = 0; r < m.n_r; ++r)
        yw.segment(static_cast<Eigen::Index>(r) * k, k) =
            frame.col(r).segment(row0, k);
      out.row(n) = (cls.W.adjoint() * yw).transpose();
    }
    return out;
  }

  /// Hard decisions, user-major (user t occupies entries t*N .. t*N + N - 1).
  std::vector<unsigned> detect(const MatC& frame) const {
    const MatC soft = soft_estimates(frame);
    std::vector<unsigned> bits(static_cast<std::size_t>(m_->N) * m_->n_t);
    for (int t = 0; t < m_->n_t; ++t)
      for (int n = 0; n < m_->N; ++n)
        bits[static_cast<std::size_t>(t) * m_->N + n] = qpsk_decide(soft(n, t));
    return bits;
  }

 private:
  struct Class {
    int rows = 0;
    MatC W;
  };
  const DataPhaseModel* m_;
  std::vector<Class> classes_;
  std::vector<int> class_of_, row0_of_;
};

}  // namespace onebit
