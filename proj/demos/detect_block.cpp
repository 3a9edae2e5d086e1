// One QPSK data block through the full 1-bit receive chain.
//
// Runs the two-phase link once: a pilot frame gives the LRA-LMMSE channel
// estimate, then a block of QPSK symbols is transmitted, filtered,
// quantized to one bit per real dimension, and detected with sliding-
// window LMMSE filters built from that estimate. A second detector built
// from the true channel shows how much of the symbol error rate is due to
// estimation error rather than quantization and noise.

#include <cstdio>
#include <vector>

#include <Eigen/Dense>

#include "onebit/channel.hpp"
#include "onebit/detection.hpp"
#include "onebit/estimation.hpp"
#include "onebit/philox.hpp"
#include "onebit/quantize.hpp"
#include "onebit/system.hpp"

int main() {
  using namespace onebit;

  const int n_t = 4;
  const int n_r = 16;
  const int tau = 40;
  const int M = 2;
  const int block_len = 50;  // QPSK symbols per user
  const int window = 3;      // detection window, in symbols
  const double beta = 0.8;
  const double rho = 0.0;
  const double snr_db = 10.0;
  const std::uint64_t seed = 7;

  const PilotFrameModel pilot = PilotFrameModel::build(
      n_t, n_r, tau, M, beta, rho, make_pilots(n_t, tau));
  const DataPhaseModel data =
      DataPhaseModel::build(n_t, n_r, M, block_len, window, beta);
  const ChannelPrior prior(n_t, n_r, rho);
  const double sigma2 = noise_variance(n_t, snr_db);

  RngStream ch(seed, 0, purpose::kChannel);
  RngStream xs(seed, 0, purpose::kDataSymbols);
  RngStream dn(seed, 0, purpose::kDataNoise);
  RngStream pn(seed, 0, purpose::kPilotNoise);

  // Channel, pilot-based estimate, and the transmitted block.
  const MatC H = prior.sample(ch);
  const MatC pilot_frame =
      pilot.noiseless_frame(H) + pilot.synth_noise(sigma2, pn);
  const VecC h_hat =
      lra_lmmse_estimator(pilot, sigma2).estimate_frame(quantize(pilot_frame));
  const MatC H_hat = Eigen::Map<const MatC>(h_hat.data(), n_r, n_t);

  std::vector<unsigned> truth;
  const MatC X = data.draw_symbols(xs, &truth);
  const MatC rx =
      quantize(MatC(data.transmit_frame(X, H) + data.synth_noise(sigma2, dn)));

  const WindowDetector det_est(data, H_hat, sigma2);
  const WindowDetector det_true(data, H, sigma2);
  const double ser_est = symbol_error_rate(det_est.detect(rx), truth);
  const double ser_true = symbol_error_rate(det_true.detect(rx), truth);

  const int symbols = n_t * block_len;
  std::printf("QPSK block: %d users x %d symbols, M = %d, %.0f dB SNR\n",
              n_t, block_len, M, snr_db);
  std::printf("%-28s %8.4f  (%d of %d symbols wrong)\n",
              "SER, estimated channel", ser_est,
              static_cast<int>(ser_est * symbols + 0.5), symbols);
  std::printf("%-28s %8.4f  (%d of %d symbols wrong)\n",
              "SER, true channel", ser_true,
              static_cast<int>(ser_true * symbols + 0.5), symbols);
  std::printf("\n(one block only; the ser-sweep subcommand of the obsim tool "
              "averages\nthousands of blocks per point)\n");
  return 0;
}
