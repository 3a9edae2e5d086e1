#pragma once

// Simulation configuration: a flat JSON document with strict key checking.
//
// Unknown keys are a hard error (they are almost always typos of a real
// knob), every field has the default used throughout the library docs, and
// validation happens in one place so the CLI and tests share it.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "onebit/common.hpp"

namespace onebit {

struct SimConfig {
  int n_t = 4;
  int n_r = 16;
  int tau = 40;             ///< pilot symbols per user frame
  double roll_off = 0.8;    ///< RRC roll-off
  double rho = 0.0;         ///< receive correlation parameter
  int data_block_len = 50;  ///< payload symbols per block (SER sweeps)
  int window = 3;           ///< detection window, in symbols
  std::vector<int> m_factors{1, 2, 3};
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<int> tau_grid;  ///< nonempty switches MSE sweeps to a tau sweep
  int trials = 2000;          ///< Monte Carlo trials (blocks, for SER)
  int bound_draws = 200;      ///< channel draws for the Bayesian bound
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const {
    require(n_t >= 1, "config: n_t must be >= 1");
    require(n_r >= 1, "config: n_r must be >= 1");
    require(tau >= n_t, "config: tau must be >= n_t");
    require(roll_off > 0.0 && roll_off <= 1.0,
            "config: roll_off must lie in (0, 1]");
    require(rho >= 0.0 && rho < 1.0, "config: rho must lie in [0, 1)");
    require(window >= 1 && window % 2 == 1, "config: window must be odd");
    require(data_block_len >= window,
            "config: data_block_len must be >= window");
    require(!m_factors.empty(), "config: m_factors must be nonempty");
    for (int m : m_factors) require(m >= 1, "config: m_factors must be >= 1");
    require(!snr_db.empty(), "config: snr_db must be nonempty");
    for (int t : tau_grid) require(t >= n_t, "config: tau_grid must be >= n_t");
    require(tau_grid.size() <= 1 || snr_db.size() == 1,
            "config: a tau sweep requires a single SNR point");
    require(trials >= 1, "config: trials must be >= 1");
    require(bound_draws >= 1, "config: bound_draws must be >= 1");
    require(workers >= 1, "config: workers must be >= 1");
  }

  static SimConfig from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw invalid_input(std::string("config: JSON parse failed: ") +
                          e.what());
    }
    require(j.is_object(), "config: document must be a JSON object");
    static const std::set<std::string> known{
        "n_t",      "n_r",       "tau",     "roll_off",       "rho",
        "window",   "m_factors", "snr_db",  "data_block_len", "tau_grid",
        "trials",   "bound_draws", "seed",  "workers"};
    for (const auto& item : j.items())
      require(known.count(item.key()) != 0,
              "config: unknown key '" + item.key() + "'");

    SimConfig c;
    try {
      if (j.contains("n_t")) c.n_t = j["n_t"].get<int>();
      if (j.contains("n_r")) c.n_r = j["n_r"].get<int>();
      if (j.contains("tau")) c.tau = j["tau"].get<int>();
      if (j.contains("roll_off")) c.roll_off = j["roll_off"].get<double>();
      if (j.contains("rho")) c.rho = j["rho"].get<double>();
      if (j.contains("window")) c.window = j["window"].get<int>();
      if (j.contains("data_block_len"))
        c.data_block_len = j["data_block_len"].get<int>();
      if (j.contains("m_factors"))
        c.m_factors = j["m_factors"].get<std::vector<int>>();
      if (j.contains("snr_db"))
        c.snr_db = j["snr_db"].get<std::vector<double>>();
      if (j.contains("tau_grid"))
        c.tau_grid = j["tau_grid"].get<std::vector<int>>();
      if (j.contains("trials")) c.trials = j["trials"].get<int>();
      if (j.contains("bound_draws"))
        c.bound_draws = j["bound_draws"].get<int>();
      if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("workers")) c.workers = j["workers"].get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw invalid_input(std::string("config: bad field type: ") + e.what());
    }
    c.validate();
    return c;
  }

  std::string to_json_text() const {
    nlohmann::json j{{"n_t", n_t},
                     {"n_r", n_r},
                     {"tau", tau},
                     {"roll_off", roll_off},
                     {"rho", rho},
                     {"window", window},
                     {"data_block_len", data_block_len},
                     {"m_factors", m_factors},
                     {"snr_db", snr_db},
                     {"tau_grid", tau_grid},
                     {"trials", trials},
                     {"bound_draws", bound_draws},
                     {"seed", seed},
                     {"workers", workers}};
    return j.dump(2);
  }
};

}  // namespace onebit
