#pragma once

// Result records and their serialized forms.
//
// Every sweep produces a flat list of CurveRecord rows; one row is one
// (grid point, metric, estimator-or-bound) triple. CSV is the primary
// format (fixed header, %.17g doubles so values round-trip exactly); JSON
// is an array of objects with the same field names.

#include <charconv>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "onebit/common.hpp"

namespace onebit {

struct CurveRecord {
  std::string sweep_name;          ///< "snr_db" or "tau"
  double sweep_value = 0.0;
  int M = 1;                       ///< oversampling factor
  double rho = 0.0;
  std::string metric_name;         ///< "mse", "ser", or "crb"
  std::string estimator_or_bound;  ///< e.g. "lra_lmmse", "bayesian_crb"
  double value = 0.0;
  double ci_half_width = 0.0;      ///< 95% confidence half width
  int trials = 0;                  ///< trials / symbols / draws behind value
  std::uint64_t seed = 0;

  friend bool operator==(const CurveRecord&, const CurveRecord&) = default;
};

inline constexpr const char* kCurveCsvHeader =
    "sweep_name,sweep_value,M,rho,metric_name,estimator_or_bound,value,"
    "ci_half_width,trials,seed";

/// Shortest exact decimal formatting used in CSV: %.17g round-trips every
/// finite double.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

/// from_chars-based field parser: locale independent, exact round trip,
/// and (unlike stod) accepts subnormal magnitudes without complaint.
template <class T>
T parse_field(const std::string& s) {
  T v{};
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  require(res.ec == std::errc() && res.ptr == end,
          "read_csv: bad numeric field '" + s + "'");
  return v;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<CurveRecord>& rows) {
  os << kCurveCsvHeader << '\n';
  for (const auto& r : rows) {
    require(r.sweep_name.find_first_of(",\n") == std::string::npos &&
                r.metric_name.find_first_of(",\n") == std::string::npos &&
                r.estimator_or_bound.find_first_of(",\n") == std::string::npos,
            "write_csv: names must not contain commas or newlines");
    os << r.sweep_name << ',' << format_g17(r.sweep_value) << ',' << r.M << ','
       << format_g17(r.rho) << ',' << r.metric_name << ','
       << r.estimator_or_bound << ',' << format_g17(r.value) << ','
       << format_g17(r.ci_half_width) << ',' << r.trials << ',' << r.seed
       << '\n';
  }
}

inline std::vector<CurveRecord> read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)),
          "read_csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kCurveCsvHeader, "read_csv: unexpected header '" + line +
                                       "'");
  std::vector<CurveRecord> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const std::size_t c = line.find(',', pos);
      f.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    require(f.size() == 10, "read_csv: expected 10 fields per row");
    CurveRecord r;
    r.sweep_name = f[0];
    r.sweep_value = detail::parse_field<double>(f[1]);
    r.M = detail::parse_field<int>(f[2]);
    r.rho = detail::parse_field<double>(f[3]);
    r.metric_name = f[4];
    r.estimator_or_bound = f[5];
    r.value = detail::parse_field<double>(f[6]);
    r.ci_half_width = detail::parse_field<double>(f[7]);
    r.trials = detail::parse_field<int>(f[8]);
    r.seed = detail::parse_field<std::uint64_t>(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void write_json(std::ostream& os,
                       const std::vector<CurveRecord>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"sweep_name", r.sweep_name},
                   {"sweep_value", r.sweep_value},
                   {"M", r.M},
                   {"rho", r.rho},
                   {"metric_name", r.metric_name},
                   {"estimator_or_bound", r.estimator_or_bound},
                   {"value", r.value},
                   {"ci_half_width", r.ci_half_width},
                   {"trials", r.trials},
                   {"seed", r.seed}});
  os << arr.dump(2) << '\n';
}

inline std::vector<CurveRecord> read_json(std::istream& is) {
  nlohmann::json arr;
  try {
    is >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("read_json: parse failed: ") + e.what());
  }
  require(arr.is_array(), "read_json: expected a JSON array");
  std::vector<CurveRecord> rows;
  for (const auto& j : arr) {
    CurveRecord r;
    try {
      r.sweep_name = j.at("sweep_name").get<std::string>();
      r.sweep_value = j.at("sweep_value").get<double>();
      r.M = j.at("M").get<int>();
      r.rho = j.at("rho").get<double>();
      r.metric_name = j.at("metric_name").get<std::string>();
      r.estimator_or_bound = j.at("estimator_or_bound").get<std::string>();
      r.value = j.at("value").get<double>();
      r.ci_half_width = j.at("ci_half_width").get<double>();
      r.trials = j.at("trials").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw invalid_input(std::string("read_json: bad record: ") + e.what());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace onebit
