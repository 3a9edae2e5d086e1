#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "onebit/config.hpp"
#include "onebit/io.hpp"

using namespace onebit;
using Catch::Approx;

namespace {

std::vector<CurveRecord> sample_rows() {
  CurveRecord a;
  a.sweep_name = "snr_db";
  a.sweep_value = -5.0;
  a.M = 2;
  a.rho = 0.75;
  a.metric_name = "mse";
  a.estimator_or_bound = "lra_lmmse";
  a.value = 0.1 + 0.2;  // 0.30000000000000004, exercises exact round trip
  a.ci_half_width = 3.0857251779237499e-5;
  a.trials = 2000;
  a.seed = 1;
  CurveRecord b;
  b.sweep_name = "tau";
  b.sweep_value = 68.0;
  b.M = 3;
  b.rho = 0.0;
  b.metric_name = "ser";
  b.estimator_or_bound = "perfect_csi";
  b.value = 9.3800000000000011e-3;
  b.ci_half_width = 0.0;
  b.trials = 600000;
  b.seed = std::numeric_limits<std::uint64_t>::max();
  CurveRecord c;
  c.sweep_name = "snr_db";
  c.sweep_value = 20.0;
  c.M = 1;
  c.rho = 0.0;
  c.metric_name = "crb";
  c.estimator_or_bound = "bayesian_crb";
  c.value = 4.9406564584124654e-324;  // denormal extreme
  c.ci_half_width = std::acos(-1.0);
  c.trials = 200;
  c.seed = 0;
  return {a, b, c};
}

}  // namespace

TEST_CASE("CSV header is the documented contract", "[io]") {
  std::ostringstream os;
  write_csv(os, {});
  CHECK(os.str() ==
        "sweep_name,sweep_value,M,rho,metric_name,estimator_or_bound,value,"
        "ci_half_width,trials,seed\n");
  std::istringstream is(os.str());
  CHECK(read_csv(is).empty());
}

TEST_CASE("CSV rows round-trip bit exactly", "[io][property]") {
  const auto rows = sample_rows();
  std::ostringstream os;
  write_csv(os, rows);
  std::istringstream is(os.str());
  const auto back = read_csv(is);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);
}

TEST_CASE("JSON rows round-trip bit exactly", "[io][property]") {
  const auto rows = sample_rows();
  std::ostringstream os;
  write_json(os, rows);
  std::istringstream is(os.str());
  const auto back = read_json(is);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);
}

TEST_CASE("g17 formatting is lossless on doubles", "[io]") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308,
                   0.30000000000000004, 105.625}) {
    CHECK(std::stod(format_g17(x)) == x);
    CHECK(std::stod(format_g17(-x)) == -x);
  }
}

TEST_CASE("CSV reader rejects malformed input", "[io]") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), invalid_input);
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_csv(bad_header), invalid_input);
  std::istringstream short_row(std::string(kCurveCsvHeader) +
                               "\nsnr_db,0,1,0,mse\n");
  CHECK_THROWS_AS(read_csv(short_row), invalid_input);
  std::istringstream bad_json("{\"not\": \"an array\"}");
  CHECK_THROWS_AS(read_json(bad_json), invalid_input);
}

TEST_CASE("config defaults and validation", "[io]") {
  const SimConfig def = SimConfig::from_json_text("{}");
  CHECK(def.n_t == 4);
  CHECK(def.n_r == 16);
  CHECK(def.tau == 40);
  CHECK(def.roll_off == 0.8);
  CHECK(def.rho == 0.0);
  CHECK(def.window == 3);
  CHECK(def.data_block_len == 50);
  CHECK(def.m_factors == std::vector<int>{1, 2, 3});
  CHECK(def.snr_db == std::vector<double>{0, 5, 10, 15, 20});
  CHECK(def.tau_grid.empty());
  CHECK(def.trials == 2000);
  CHECK(def.bound_draws == 200);
  CHECK(def.seed == 1);
  CHECK(def.workers == 1);

  const SimConfig c = SimConfig::from_json_text(
      R"({"n_t": 2, "n_r": 8, "tau": 16, "rho": 0.5, "snr_db": [0.0],
          "m_factors": [2], "tau_grid": [4, 16], "trials": 100,
          "bound_draws": 10, "seed": 7, "workers": 3})");
  CHECK(c.n_t == 2);
  CHECK(c.tau_grid == std::vector<int>{4, 16});
  CHECK(c.seed == 7);

  // Round trip through the emitter.
  const SimConfig c2 = SimConfig::from_json_text(c.to_json_text());
  CHECK(c2.n_r == c.n_r);
  CHECK(c2.tau_grid == c.tau_grid);
  CHECK(c2.rho == c.rho);
}

TEST_CASE("config rejects unknown keys and bad values", "[io]") {
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"n_T": 4})"), invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"snr": [0]})"), invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text("not json"), invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"([1, 2])"), invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"n_t": "four"})"),
                  invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"rho": 1.0})"), invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"window": 2})"),
                  invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"tau": 2})"), invalid_input);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"m_factors": []})"),
                  invalid_input);
  // A tau sweep with more than one SNR point is ambiguous.
  CHECK_THROWS_AS(SimConfig::from_json_text(
                      R"({"tau_grid": [8, 16], "snr_db": [0, 10]})"),
                  invalid_input);
}
