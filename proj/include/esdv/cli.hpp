#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "esdv/report.hpp"

namespace esdv::cli {

/// Process exit codes, stable for CI use.
enum ExitCode : int {
  exit_ok = 0,
  exit_findings = 1,   // validation violations or binding errors
  exit_input = 2,      // I/O or parse failure
  exit_evaluation = 3, // a kernel rejected a parameter value
  exit_sensitivity = 4,
};

struct ValueOptions {
  std::string manifest;
  std::string params;
  std::string out; // empty: write to the output stream
  std::string format = "table";
};

struct SensitivityOptions : ValueOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::string dist = "uniform";
  double delta = 1e-3;
  unsigned threads = 1;
};

int cmd_validate(const std::string &manifest, const std::string &params,
                 std::ostream &out, std::ostream &err);
int cmd_value(const ValueOptions &opts, std::ostream &out, std::ostream &err);
int cmd_sensitivity(const SensitivityOptions &opts, std::ostream &out,
                    std::ostream &err);

/// Parses argv and dispatches to the subcommands.
int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err);

} // namespace esdv::cli
