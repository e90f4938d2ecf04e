#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "esdv/ingest.hpp"

namespace esdv::test {

inline std::string data_path(const std::string &name) {
  return std::string(ESDV_DATA_DIR) + "/" + name;
}

inline std::string fixture_path(const std::string &name) {
  return std::string(ESDV_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool rel_close(double a, double b, double rel) {
  if (a == b)
    return true;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

inline ingest::ValuationModel beijing_model() {
  return ingest::parse_model_manifest(read_file(data_path("beijing2018.json")));
}

/// CSV parameters plus the transfer-derived ones.
inline ingest::ParameterSet beijing_params(const ingest::ValuationModel &m) {
  return ingest::with_transfers(m, ingest::parse_params_csv(read_file(
                                       data_path("beijing2018_params.csv"))));
}

} // namespace esdv::test
