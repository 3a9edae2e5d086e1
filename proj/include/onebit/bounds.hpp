#pragma once

// Bayesian Cramér–Rao machinery for 1-bit observations.
//
// The bound is computed over the real-stacked parameter h' = [Re h; Im h]
// (dimension 2D). Total information J = J_P + J_D:
//  * bim_prior        — prior term 2 * C_{h'}^{-1};
//  * bim_data_m1      — exact data term for independent (symbol-spaced,
//                       white-noise) samples via the probit likelihood;
//  * bim_data_lower_oversampled — moment-matching lower bound on the data
//                       term for correlated (oversampled / colored-noise)
//                       samples: first/second output moments per antenna
//                       block with a Gaussian surrogate.
// crb_from_bim folds the real-stacked information into the equivalent
// complex-parameter matrix and returns the average per-coefficient bound.
//
// Numerical backbone: erfc-based Gaussian tails with an asymptotic
// log-domain branch, and a bivariate normal CDF evaluated by Gauss–Legendre
// panels on the arcsine-substituted correlation integral (graded panels near
// |r| ~ 1), giving absolute error well below 1e-8.

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "onebit/channel.hpp"
#include "onebit/common.hpp"
#include "onebit/philox.hpp"
#include "onebit/system.hpp"

namespace onebit {

/// Upper Gaussian tail Q(x) = P(N(0,1) > x).
inline double gaussian_tail(double x) {
  return 0.5 * std::erfc(x * kInvSqrt2);
}

/// log Q(x), stable for arbitrarily large |x|.
inline double log_gaussian_tail(double x) {
  if (x <= 33.0) return std::log(gaussian_tail(x));
  // Asymptotic series Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)
  const double x2 = x * x;
  const double series =
      1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
      105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * kPi) + std::log(series);
}

/// Probit Fisher weight w(s) = phi(s)^2 / (Q(s) Q(-s)) * (2 pi scaling folded
/// in): exp(-s^2) / (2 pi Q(s) Q(-s)). Evaluated in the log domain so that
/// saturated samples underflow gracefully to zero weight.
inline double probit_weight(double s) {
  const double lw = -s * s - std::log(2.0 * kPi) - log_gaussian_tail(s) -
                    log_gaussian_tail(-s);
  return std::exp(lw);
}

namespace detail {

/// Gauss–Legendre nodes/weights on [-1, 1], cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w)))
      .first->second;
}

/// Quadrature rule for the correlation integral of the bivariate normal CDF
/// after the substitution t = sin(theta):
///   Phi2(h,k,r) = Phi(h)Phi(k)
///               + (1/2pi) * Int_0^asin(r) exp(-(h^2 - 2hk sin th + k^2)
///                                             / (2 cos^2 th)) dth.
/// Stored per node: A = 1/(2 cos^2 th), B = sin th / cos^2 th, and the
/// panel-scaled weight, so one evaluation costs one exp per node.
struct ThetaRule {
  std::vector<double> A, B, w;

  double integral(double h, double k) const {
    const double q = h * h + k * k;
    const double hk = h * k;
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
      s += w[i] * std::exp(-q * A[i] + hk * B[i]);
    return s;
  }
};

inline ThetaRule make_theta_rule(double r) {
  ThetaRule rule;
  if (r == 0.0) return rule;
  const double span = std::asin(r);
  std::vector<double> edges{0.0};
  const double ar = std::abs(r);
  if (ar <= 0.4) {
    edges.push_back(span);
  } else if (ar <= 0.8) {
    edges.push_back(span * 0.5);
    edges.push_back(span);
  } else if (ar <= 0.925) {
    for (int j = 1; j <= 4; ++j) edges.push_back(span * j / 4.0);
  } else {
    // Graded mesh toward the endpoint, where a boundary layer of width
    // ~sqrt(1 - r^2) forms.
    edges.push_back(span * 0.5);
    double frac = 0.5;
    for (int j = 0; j < 16; ++j) {
      frac *= 0.5;
      edges.push_back(span * (1.0 - frac));
    }
    edges.push_back(span);
  }
  const auto& [gx, gw] = gauss_legendre(16);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double th = c + half * gx[i];
      const double ct2 = std::cos(th) * std::cos(th);
      rule.A.push_back(0.5 / ct2);
      rule.B.push_back(std::sin(th) / ct2);
      rule.w.push_back(half * gw[i]);
    }
  }
  return rule;
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// Standard bivariate normal CDF P(Z1 <= h, Z2 <= k) with correlation r.
inline double bvn_cdf(double h, double k, double r) {
  const ThetaRule rule = make_theta_rule(r);
  return std_normal_cdf(h) * std_normal_cdf(k) +
         rule.integral(h, k) / (2.0 * kPi);
}

}  // namespace detail

/// P(z1 > 0, z2 > 0) for (z1, z2) jointly Gaussian with means (mu1, mu2),
/// variances (v1, v2) and covariance cov. Absolute accuracy <= 1e-8.
inline double orthant_prob(double mu1, double mu2, double v1, double v2,
                           double cov) {
  require(v1 > 0.0 && v2 > 0.0, "orthant_prob: variances must be positive");
  double r = cov / std::sqrt(v1 * v2);
  if (r > 1.0) {
    require(r <= 1.0 + 1e-9, "orthant_prob: correlation above 1");
    r = 1.0;
  }
  if (r < -1.0) {
    require(r >= -1.0 - 1e-9, "orthant_prob: correlation below -1");
    r = -1.0;
  }
  // P(z1 > 0, z2 > 0) = P(g1 <= mu1/s1, g2 <= mu2/s2) for standard (g1, g2).
  return detail::bvn_cdf(mu1 / std::sqrt(v1), mu2 / std::sqrt(v2), r);
}

/// Data-independent (prior) information over the real-stacked parameter.
inline MatR bim_prior(const ChannelPrior& prior) {
  const MatC Ch = prior.stacked_covariance();
  const Eigen::Index D = Ch.rows();
  MatR Cs(2 * D, 2 * D);
  Cs.topLeftCorner(D, D) = 0.5 * Ch.real();
  Cs.topRightCorner(D, D) = -0.5 * Ch.imag();
  Cs.bottomLeftCorner(D, D) = 0.5 * Ch.imag();
  Cs.bottomRightCorner(D, D) = 0.5 * Ch.real();
  return 2.0 * solve_spd(Cs, MatR::Identity(2 * D, 2 * D), "bim_prior");
}

/// Real-stacked observation operator [[Re Phi, -Im Phi], [Im Phi, Re Phi]].
inline MatR real_stack_operator(const MatC& Phi) {
  const Eigen::Index R = Phi.rows(), C = Phi.cols();
  MatR B(2 * R, 2 * C);
  B.topLeftCorner(R, C) = Phi.real();
  B.topRightCorner(R, C) = -Phi.imag();
  B.bottomLeftCorner(R, C) = Phi.imag();
  B.bottomRightCorner(R, C) = Phi.real();
  return B;
}

/// Data information matrix with Monte Carlo provenance.
struct Bim {
  MatR J;                   ///< 2D x 2D, averaged over channel draws
  double trace_se = 0.0;    ///< MC standard error of trace(J)
  int draws = 0;
};

namespace detail {

inline VecR draw_real_stacked_channel(const ChannelPrior& prior,
                                      std::uint64_t seed, std::uint64_t index) {
  RngStream rng(seed, index, purpose::kBoundDraw);
  const MatC H = prior.sample(rng);
  VecC h(H.size());
  for (Eigen::Index t = 0; t < H.cols(); ++t)
    for (Eigen::Index r = 0; r < H.rows(); ++r)
      h[t * H.rows() + r] = H(r, t);
  return real_stack(h);
}

inline void finalize_bim(Bim& out, const std::vector<double>& traces) {
  const int n = static_cast<int>(traces.size());
  out.draws = n;
  out.J /= static_cast<double>(n);
  if (n > 1) {
    double mean = 0.0;
    for (double t : traces) mean += t;
    mean /= n;
    double var = 0.0;
    for (double t : traces) var += (t - mean) * (t - mean);
    var /= (n - 1.0);
    out.trace_se = std::sqrt(var / n);
  }
}

}  // namespace detail

/// Exact averaged data information for the symbol-spaced configuration
/// (independent samples, white noise of per-sample variance sigma2): each
/// real observation dimension contributes its probit Fisher weight.
/// Draws are indexed [draw_offset, draw_offset + draws) within the seed's
/// draw stream, so disjoint ranges partition the same Monte Carlo population.
inline Bim bim_data_m1(const MatC& Phi, double sigma2,
                       const ChannelPrior& prior, int draws,
                       std::uint64_t seed, int draw_offset = 0) {
  require(draws >= 1, "bim_data_m1: draws must be >= 1");
  require(sigma2 > 0.0, "bim_data_m1: sigma2 must be positive");
  const MatR B = real_stack_operator(Phi);
  const Eigen::Index rows = B.rows(), P = B.cols();
  Bim out;
  out.J = MatR::Zero(P, P);
  std::vector<double> traces;
  traces.reserve(draws);
  const double sq2_sigma = std::numbers::sqrt2 / std::sqrt(sigma2);
  const double gain = 2.0 / sigma2;
  const VecR row_sq = B.rowwise().squaredNorm();
  MatR scaled(rows, P);
  for (int d = 0; d < draws; ++d) {
    const VecR ht = detail::draw_real_stacked_channel(
        prior, seed, static_cast<std::uint64_t>(draw_offset + d));
    const VecR a = B * ht;
    VecR w(rows);
    double tr = 0.0;
    for (Eigen::Index k = 0; k < rows; ++k) {
      w[k] = gain * probit_weight(sq2_sigma * a[k]);
      tr += w[k] * row_sq[k];
    }
    scaled = w.asDiagonal() * B;
    out.J.noalias() += B.transpose() * scaled;
    traces.push_back(tr);
  }
  detail::finalize_bim(out, traces);
  return out;
}

/// First and second moments of the 1-bit output of one real Gaussian block:
/// z = a + g with g ~ N(0, C/2) (C is the complex-sample covariance), output
/// q_k = sgn(z_k)/sqrt(2).
struct QuantizedMoments {
  VecR mu;
  MatR Cq;
};

namespace detail {

struct MomentWorkspace {
  VecR sd;                       ///< sqrt(C_kk / 2)
  std::vector<ThetaRule> rules;  ///< upper-triangle pair rules, row-major
  Eigen::Index n = 0;

  static MomentWorkspace build(const MatR& C) {
    MomentWorkspace ws;
    ws.n = C.rows();
    ws.sd.resize(ws.n);
    for (Eigen::Index k = 0; k < ws.n; ++k) {
      require(C(k, k) > 0.0,
              "quantized_moments: covariance diagonal must be positive");
      ws.sd[k] = std::sqrt(0.5 * C(k, k));
    }
    ws.rules.reserve(ws.n * (ws.n - 1) / 2);
    for (Eigen::Index k = 0; k < ws.n; ++k)
      for (Eigen::Index m = k + 1; m < ws.n; ++m) {
        double r = 0.5 * C(k, m) / (ws.sd[k] * ws.sd[m]);
        if (r > 1.0) {
          require(r <= 1.0 + 1e-9, "quantized_moments: correlation above 1");
          r = 1.0;
        }
        if (r < -1.0) {
          require(r >= -1.0 - 1e-9, "quantized_moments: correlation below -1");
          r = -1.0;
        }
        ws.rules.push_back(make_theta_rule(r));
      }
    return ws;
  }
};

inline QuantizedMoments quantized_moments_ws(const VecR& a,
                                             const MomentWorkspace& ws) {
  const Eigen::Index n = ws.n;
  QuantizedMoments qm;
  qm.mu.resize(n);
  qm.Cq.resize(n, n);
  VecR t(n), lq_pos(n), lq_neg(n), phh(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    t[k] = a[k] / ws.sd[k];
    lq_pos[k] = log_gaussian_tail(t[k]);
    lq_neg[k] = log_gaussian_tail(-t[k]);
    // mu = (1 - 2 Q(t)) / sqrt(2); diagonal via the stable product form
    // 1/2 - mu^2 = 2 Q(t) Q(-t).
    qm.mu[k] = (1.0 - 2.0 * std::exp(lq_pos[k])) * kInvSqrt2;
    qm.Cq(k, k) = 2.0 * std::exp(lq_pos[k] + lq_neg[k]);
    phh[k] = std_normal_cdf(t[k]);
  }
  std::size_t idx = 0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index m = k + 1; m < n; ++m, ++idx) {
      const auto& rule = ws.rules[idx];
      // P(++) + P(--) with the shared correlation rule; the base CDF terms
      // combine to Phi(h)Phi(k) + Phi(-h)Phi(-k).
      const double h = t[k], g = t[m];
      const double base = phh[k] * phh[m] + (1.0 - phh[k]) * (1.0 - phh[m]);
      const double corr = rule.integral(h, g) / kPi;  // both quadrants
      const double s = base + corr;
      const double ezz = s - 0.5;  // (2s - 1)/2
      qm.Cq(k, m) = qm.Cq(m, k) = ezz - qm.mu[k] * qm.mu[m];
    }
  return qm;
}

}  // namespace detail

/// Public single-block moment computation; builds its own quadrature rules.
inline QuantizedMoments quantized_moments(const VecR& a, const MatR& C) {
  require(a.size() == C.rows() && C.rows() == C.cols(),
          "quantized_moments: dimension mismatch");
  return detail::quantized_moments_ws(a, detail::MomentWorkspace::build(C));
}

/// Jacobian scale of the quantized mean: d mu_k / d a_k
///   = exp(-a_k^2 / C_kk) * sqrt(2 / (pi C_kk)).
inline VecR quantized_mean_jacobian_scale(const VecR& a, const MatR& C) {
  VecR g(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double v = 0.5 * C(k, k);
    g[k] = std::exp(-a[k] * a[k] / (2.0 * v)) / std::sqrt(kPi * v);
  }
  return g;
}

/// Moment-matching lower bound on the averaged data information for
/// oversampled / colored-noise configurations. Per channel draw, per real
/// part, per antenna: mean/covariance of the 1-bit block from the Gaussian
/// conditional law, Jacobian rows diag(g) B_block, and the Gaussian-surrogate
/// information Jac^T Cq^{-1} Jac. Saturated dimensions (Cq diagonal <= 1e-9)
/// are dropped; a failed solve escalates once with the standard ridge.
inline Bim bim_data_lower_oversampled(const MatC& Phi, const MatR& Cn,
                                      int n_r, const ChannelPrior& prior,
                                      int draws, std::uint64_t seed,
                                      int draw_offset = 0) {
  require(draws >= 1, "bim_data_lower_oversampled: draws must be >= 1");
  const Eigen::Index K = Cn.rows();
  require(Phi.rows() == K * n_r,
          "bim_data_lower_oversampled: Phi rows must equal K * n_r");
  const MatR B = real_stack_operator(Phi);
  const Eigen::Index P = B.cols();
  const Eigen::Index half = Phi.rows();
  const auto ws = detail::MomentWorkspace::build(Cn);

  Bim out;
  out.J = MatR::Zero(P, P);
  std::vector<double> traces;
  traces.reserve(draws);
  for (int d = 0; d < draws; ++d) {
    const VecR ht = detail::draw_real_stacked_channel(
        prior, seed, static_cast<std::uint64_t>(draw_offset + d));
    const VecR mean_all = B * ht;
    MatR Jd = MatR::Zero(P, P);
    for (int part = 0; part < 2; ++part)
      for (int r = 0; r < n_r; ++r) {
        const Eigen::Index row0 = part * half + static_cast<Eigen::Index>(r) * K;
        const VecR a = mean_all.segment(row0, K);
        const auto qm = detail::quantized_moments_ws(a, ws);
        const VecR g = quantized_mean_jacobian_scale(a, Cn);
        std::vector<Eigen::Index> keep;
        keep.reserve(K);
        for (Eigen::Index k = 0; k < K; ++k)
          if (qm.Cq(k, k) > 1e-9) keep.push_back(k);
        if (keep.empty()) continue;
        const Eigen::Index nk = static_cast<Eigen::Index>(keep.size());
        MatR Ck(nk, nk);
        MatR Jac(nk, P);
        for (Eigen::Index i = 0; i < nk; ++i) {
          for (Eigen::Index j = 0; j < nk; ++j)
            Ck(i, j) = qm.Cq(keep[i], keep[j]);
          Jac.row(i) = g[keep[i]] * B.row(row0 + keep[i]);
        }
        const MatR S = solve_spd(Ck, Jac, "bim_data_lower_oversampled");
        Jd.noalias() += Jac.transpose() * S;
      }
    out.J += Jd;
    traces.push_back(Jd.trace());
  }
  detail::finalize_bim(out, traces);
  return out;
}

/// Fold the real-stacked information matrix into the complex-parameter form
/// and return the average per-coefficient bound mean(Re diag(J_c^{-1})).
inline MatC complex_information(const MatR& J) {
  require(J.rows() == J.cols() && J.rows() % 2 == 0,
          "complex_information: matrix must be square with even dimension");
  const Eigen::Index D = J.rows() / 2;
  const MatR re = 0.25 * (J.topLeftCorner(D, D) + J.bottomRightCorner(D, D));
  const MatR im = 0.25 * (J.topRightCorner(D, D) - J.bottomLeftCorner(D, D));
  MatC Jc(D, D);
  Jc.real() = re;
  Jc.imag() = im;
  return Jc;
}

inline double crb_from_bim(const MatR& J_data, const MatR& J_prior) {
  const MatC Jc = complex_information(J_data + J_prior);
  const MatC inv = solve_hpd(Jc, MatC::Identity(Jc.rows(), Jc.cols()),
                             "crb_from_bim");
  return inv.diagonal().real().mean();
}

}  // namespace onebit
