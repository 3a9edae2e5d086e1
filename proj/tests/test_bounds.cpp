#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "onebit/bounds.hpp"
#include "onebit/estimation.hpp"

using namespace onebit;
using Catch::Approx;

TEST_CASE("Gaussian tail values", "[bounds][property]") {
  const double cases[][2] = {
      {0.0, 0.5},
      {0.5, 0.308537538725986896},
      {1.0, 0.158655253931457051},
      {2.0, 0.0227501319481792072},
      {4.0, 0.0000316712418331199213},
      {8.0, 6.22096057427178412e-16},
      {-1.5, 0.933192798731141934},
      {-6.0, 0.999999999013412355},
  };
  for (const auto& c : cases)
    CHECK(gaussian_tail(c[0]) == Approx(c[1]).epsilon(1e-13));
}

TEST_CASE("log Gaussian tail across the asymptotic branch",
          "[bounds][property]") {
  const double cases[][2] = {
      {10.0, -53.2312851505124706},
      {20.0, -203.917155371097264},
      {30.0, -454.321243956343197},
      {38.0, -726.55721601882013},
      {45.0, -1017.22609424195237},
  };
  for (const auto& c : cases)
    CHECK(log_gaussian_tail(c[0]) == Approx(c[1]).epsilon(1e-11));
  // Both sides of the internal branch point stay on the reference curve.
  CHECK(log_gaussian_tail(33.0) == Approx(-548.916362269738114).epsilon(1e-12));
  CHECK(log_gaussian_tail(33.5) == Approx(-565.556373062758004).epsilon(1e-12));
  // Small-argument side agrees with the direct value.
  CHECK(log_gaussian_tail(1.0) ==
        Approx(std::log(0.158655253931457051)).epsilon(1e-13));
}

TEST_CASE("probit Fisher weight", "[bounds][property]") {
  const double cases[][2] = {
      {0.0, 0.636619772367581343},
      {0.7, 0.531588618322564709},
      {2.5, 0.0497870801352980849},
      {6.0, 3.74182188748039198e-8},
      {12.0, 2.59330679965634725e-31},
  };
  for (const auto& c : cases) {
    CHECK(probit_weight(c[0]) == Approx(c[1]).epsilon(1e-10));
    CHECK(probit_weight(-c[0]) == Approx(c[1]).epsilon(1e-10));  // even
  }
  CHECK(probit_weight(40.0) == 0.0);  // graceful underflow, no NaN
}

TEST_CASE("orthant probabilities match high-precision references",
          "[bounds][property]") {
  // (mu1, mu2, v1, v2, cov) -> P(z1 > 0, z2 > 0)
  const double cases[][6] = {
      {0.0, 0.0, 1.0, 1.0, 0.0, 0.25},
      {0.0, 0.0, 1.0, 1.0, 0.5, 0.3333333333333333},
      {0.0, 0.0, 1.0, 1.0, -0.93, 0.05990329170900741},
      {0.7, -0.3, 1.0, 1.0, 0.4, 0.3356492736463001},
      {1.3, 2.1, 0.5, 2.0, -0.6, 0.898231414453245},
      {-2.0, 1.0, 1.0, 1.0, 0.95, 0.02275013194817921},
      {0.2, 0.2, 0.05, 0.05, 0.049, 0.793109315806515},
      {3.0, -3.0, 1.0, 1.0, 0.999, 0.001349898031630095},
      {-0.5, -0.5, 1.0, 1.0, -0.999, 0.0},
      {5.0, 5.0, 1.0, 1.0, 0.3, 0.9999994267418082},
      {0.0, 1.0, 1.0, 1.0, 0.925, 0.4997861071878077},
      {0.001, -0.001, 1.0, 1.0, 0.6, 0.3524160640398662},
  };
  for (const auto& c : cases)
    CHECK(orthant_prob(c[0], c[1], c[2], c[3], c[4]) ==
          Approx(c[5]).margin(1e-9));
}

TEST_CASE("zero-mean orthant matches the arcsine closed form",
          "[bounds][property]") {
  for (double rho : {-0.9999, -0.999, -0.925, -0.5, 0.0, 0.3, 0.8, 0.925,
                     0.99, 0.9999, 1.0, -1.0}) {
    const double closed = 0.25 + std::asin(rho) / (2.0 * kPi);
    CHECK(orthant_prob(0.0, 0.0, 1.0, 1.0, rho) ==
          Approx(closed).margin(1e-9));
  }
}

TEST_CASE("nonzero-mean orthant matches Monte Carlo", "[bounds][property]") {
  const double mu1 = 0.7, mu2 = -0.3, v1 = 1.0, v2 = 1.0, cov = 0.4;
  const double p = orthant_prob(mu1, mu2, v1, v2, cov);
  const int n = 2000000;
  // Sample z = mu + L w with L the Cholesky factor of the covariance.
  long long hits = 0;
  const double l11 = std::sqrt(v1), l21 = cov / l11,
               l22 = std::sqrt(v2 - l21 * l21);
  RngStream rng2(78, 0, purpose::kOracle);
  for (int i = 0; i < n; ++i) {
    const double w1 = rng2.normal(), w2 = rng2.normal();
    const double z1 = mu1 + l11 * w1;
    const double z2 = mu2 + l21 * w1 + l22 * w2;
    if (z1 > 0.0 && z2 > 0.0) ++hits;
  }
  const double phat = static_cast<double>(hits) / n;
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(phat - p) < 4.0 * se);
}

TEST_CASE("orthant input validation", "[bounds]") {
  CHECK_THROWS_AS(orthant_prob(0, 0, -1.0, 1.0, 0.0), invalid_input);
  CHECK_THROWS_AS(orthant_prob(0, 0, 1.0, 1.0, 1.5), invalid_input);
  CHECK(orthant_prob(0, 0, 1.0, 1.0, 1.0 + 5e-10) ==
        Approx(0.5).margin(1e-9));
}

TEST_CASE("quantized moments: frozen reference block", "[bounds][property]") {
  VecR a(4);
  a << 0.3, -1.1, 0.0, 2.4;
  MatR C(4, 4);
  C << 0.8, -0.712459257658362, -0.52308863387093, -0.622986119195716,
      -0.712459257658362, 0.8, 0.624833762813997, 0.715729026604005,
      -0.52308863387093, 0.624833762813997, 0.8, 0.52204220101098,
      -0.622986119195716, 0.715729026604005, 0.52204220101098, 0.8;
  const auto qm = quantized_moments(a, C);
  VecR mu_want(4);
  mu_want << 0.257912746495445, -0.649130869215515, 0.0, 0.707002269170635;
  for (int k = 0; k < 4; ++k)
    CHECK(qm.mu[k] == Approx(mu_want[k]).margin(1e-10));

  MatR cq_want(4, 4);
  cq_want << 4.334810151951765e-01, -5.573739432825661e-02,
      -1.979780441139191e-01, -4.694617286024605e-05, -5.573739432825661e-02,
      7.862911463151012e-02, 4.050649671513740e-02, 6.059179434469986e-06,
      -1.979780441139191e-01, 4.050649671513740e-02, 5.000000000000000e-01,
      7.385551910321642e-05, -4.694617286024605e-05, 6.059179434469986e-06,
      7.385551910321642e-05, 1.477913875729264e-04;
  CHECK((qm.Cq - cq_want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("quantized moments: zero mean reduces to the arcsine law",
          "[bounds][property]") {
  RngStream rng(5, 1, purpose::kOracle);
  MatR Bm(3, 5);
  rng.fill_normal(Bm);
  const MatR C = Bm * Bm.transpose();
  const auto qm = quantized_moments(VecR::Zero(3), C);
  CHECK(qm.mu.cwiseAbs().maxCoeff() < 1e-12);
  // Real-part output covariance of the complex quantizer is half the real
  // part of the arcsine-law covariance for a proper input with covariance C.
  const MatC law = arcsin_covariance(C.cast<cxd>());
  CHECK((qm.Cq - 0.5 * law.real()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("quantized moments: saturation limits", "[bounds][property]") {
  VecR a(2);
  a << 50.0, -50.0;
  MatR C = MatR::Identity(2, 2) * 0.3;
  C(0, 1) = C(1, 0) = 0.1;
  const auto qm = quantized_moments(a, C);
  CHECK(qm.mu[0] == Approx(kInvSqrt2).margin(1e-12));
  CHECK(qm.mu[1] == Approx(-kInvSqrt2).margin(1e-12));
  CHECK(qm.Cq.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quantized mean Jacobian matches finite differences",
          "[bounds][property]") {
  const int K = 3, P = 4;
  RngStream rng(6, 2, purpose::kOracle);
  MatR Bm(K, P);
  rng.fill_normal(Bm);
  MatR Mix(K, K + 1);
  rng.fill_normal(Mix);
  const MatR C = Mix * Mix.transpose() * 0.4;
  VecR ht(P);
  for (int j = 0; j < P; ++j) ht[j] = 0.3 * rng.normal();

  const VecR a0 = Bm * ht;
  const MatR J = quantized_mean_jacobian_scale(a0, C).asDiagonal() * Bm;
  const double delta = 1e-5;
  for (int j = 0; j < P; ++j) {
    VecR hp = ht, hm = ht;
    hp[j] += delta;
    hm[j] -= delta;
    const VecR mp = quantized_moments(Bm * hp, C).mu;
    const VecR mm = quantized_moments(Bm * hm, C).mu;
    const VecR fd = (mp - mm) / (2.0 * delta);
    for (int k = 0; k < K; ++k)
      CHECK(J(k, j) == Approx(fd[k]).epsilon(1e-5).margin(1e-9));
  }

  SECTION("at zero mean the scale is sqrt(2/(pi C_kk))") {
    const VecR g0 = quantized_mean_jacobian_scale(VecR::Zero(K), C);
    for (int k = 0; k < K; ++k)
      CHECK(g0[k] == Approx(std::sqrt(2.0 / (kPi * C(k, k)))).epsilon(1e-13));
  }
}

TEST_CASE("probit information equals the curvature of the expected "
          "log-likelihood",
          "[bounds][property]") {
  // Scalar 1-bit measurement y = sgn(b*theta + n), n ~ N(0, v): the Fisher
  // information from the probit weight formula must match a finite-difference
  // second derivative of E_q[ ln P_q(theta) ] at the true parameter.
  const double b = 1.3, v = 0.41, th0 = 0.37;
  const double s = b * th0 / std::sqrt(v);
  const double J_formula = probit_weight(s) * b * b / v;

  const auto logp = [&](double th, int q) {
    const double t = b * th / std::sqrt(v);
    return q > 0 ? std::log(detail::std_normal_cdf(t))
                 : std::log(detail::std_normal_cdf(-t));
  };
  const double pp = detail::std_normal_cdf(s), pm = 1.0 - pp;
  const auto f = [&](double th) {
    return pp * logp(th, +1) + pm * logp(th, -1);
  };
  const double h = 1e-4;
  const double fim_fd = -(f(th0 + h) - 2.0 * f(th0) + f(th0 - h)) / (h * h);
  CHECK(J_formula == Approx(fim_fd).epsilon(1e-5));
}

TEST_CASE("prior information matrix", "[bounds][property]") {
  SECTION("uncorrelated prior gives 4I and a 0.5 prior-only bound") {
    ChannelPrior prior(2, 3, 0.0);
    const MatR J = bim_prior(prior);
    CHECK((J - 4.0 * MatR::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(crb_from_bim(MatR::Zero(12, 12), J) == Approx(0.5).epsilon(1e-12));
  }
  SECTION("correlated prior satisfies J * C_stack = 2I") {
    ChannelPrior prior(2, 4, 0.75);
    const MatC Ch = prior.stacked_covariance();
    const Eigen::Index D = Ch.rows();
    MatR Cs(2 * D, 2 * D);
    Cs.topLeftCorner(D, D) = 0.5 * Ch.real();
    Cs.topRightCorner(D, D) = -0.5 * Ch.imag();
    Cs.bottomLeftCorner(D, D) = 0.5 * Ch.imag();
    Cs.bottomRightCorner(D, D) = 0.5 * Ch.real();
    const MatR J = bim_prior(prior);
    CHECK((J * Cs - 2.0 * MatR::Identity(2 * D, 2 * D)).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("complex information folding on a hand-computed case",
          "[bounds][property]") {
  MatR J = MatR::Zero(4, 4);
  J.topLeftCorner(2, 2) = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  J.bottomRightCorner(2, 2) = Eigen::Vector2d(6.0, 4.0).asDiagonal();
  const MatC Jc = complex_information(J);
  CHECK(Jc(0, 0) == cxd{2.0, 0.0});
  CHECK(Jc(1, 1) == cxd{2.0, 0.0});
  CHECK(crb_from_bim(J, MatR::Zero(4, 4)) == Approx(0.5).epsilon(1e-12));
}

namespace {

PilotFrameModel white_model(int n_t, int n_r, int tau, int M) {
  return PilotFrameModel::build(n_t, n_r, tau, M, 0.8, 0.0,
                                make_pilots(n_t, tau));
}

}  // namespace

TEST_CASE("moment-route information never exceeds the exact probit route "
          "on independent samples",
          "[bounds][property]") {
  // White-noise symbol-spaced configuration: the Gaussian-surrogate data
  // term is a lower bound of the exact one in the PSD order.
  const int n_t = 2, n_r = 2, tau = 4, M = 1, K = tau;
  const auto m = white_model(n_t, n_r, tau, M);
  ChannelPrior prior(n_t, n_r, 0.0);
  const double sigma2 = noise_variance(n_t, 0.0);
  const int draws = 8;
  const auto exact = bim_data_m1(m.Phi, sigma2, prior, draws, 99);
  const auto lower = bim_data_lower_oversampled(
      m.Phi, sigma2 * MatR::Identity(K, K), n_r, prior, draws, 99);
  const MatR diff = exact.J - lower.J;
  Eigen::SelfAdjointEigenSolver<MatR> es(0.5 * (diff + diff.transpose()));
  CHECK(es.eigenvalues().minCoeff() > -1e-8 * exact.J.norm());
}

TEST_CASE("data information grows with pilot length", "[bounds][property]") {
  const int n_t = 2, n_r = 2, M = 2;
  ChannelPrior prior(n_t, n_r, 0.0);
  const double sigma2 = noise_variance(n_t, 0.0);
  double last = -1.0;
  for (int tau : {8, 16, 40}) {
    const auto m = white_model(n_t, n_r, tau, M);
    const auto bim = bim_data_lower_oversampled(
        m.Phi, sigma2 * m.GGt, n_r, prior, 3, 7);
    const double tr = bim.J.trace();
    CHECK(tr > last);
    last = tr;
  }
}

TEST_CASE("noise-dominated regime is prior-dominated", "[bounds][property]") {
  const int n_t = 2, n_r = 2, tau = 4;
  const auto m = white_model(n_t, n_r, tau, 1);
  ChannelPrior prior(n_t, n_r, 0.0);
  const double sigma2 = noise_variance(n_t, -40.0);
  const auto bim = bim_data_m1(m.Phi, sigma2, prior, 4, 3);
  const MatR Jp = bim_prior(prior);
  CHECK(bim.J.norm() < 1e-3 * Jp.norm());
}

TEST_CASE("draw ranges partition deterministically", "[bounds][property]") {
  const int n_t = 2, n_r = 2, tau = 4;
  const auto m = white_model(n_t, n_r, tau, 1);
  ChannelPrior prior(n_t, n_r, 0.0);
  const double sigma2 = noise_variance(n_t, 5.0);
  const auto whole = bim_data_m1(m.Phi, sigma2, prior, 6, 55, 0);
  const auto first = bim_data_m1(m.Phi, sigma2, prior, 3, 55, 0);
  const auto second = bim_data_m1(m.Phi, sigma2, prior, 3, 55, 3);
  const MatR recombined = 0.5 * (first.J + second.J);
  CHECK((recombined - whole.J).cwiseAbs().maxCoeff() < 1e-12 * whole.J.norm());
}
