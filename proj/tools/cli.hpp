#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zrlj/traffic.hpp"

namespace zrlj::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDomainError = 3,
  kConvergenceError = 4,
  kStatisticalFailure = 5,
};

struct RunConfig {
  std::string command;
  ModelParams params;
  std::string g_spec = "identity";
  std::string normalization = "normalized";
  std::vector<std::int64_t> Ns;
  std::uint64_t seed = 1;
  std::string out = "out";
  double tol = 1e-14;
  int grid_points = 257;

  // thermo
  double phi_max = -1.0;
  int points = 101;

  // profile
  bool figure3 = false;

  // simulate
  double t_sample = 1000.0;
  double t_burn = -1.0;
  std::int64_t min_events = 1000000;
  int batches = 40;
  double corrupt_birth = 1.0;

  // ldp
  int fenchel_pairs = 20;
};

/// Parses argv, runs the command and returns the process exit status. Errors
/// go to stderr as one JSON object; the run summary goes to stdout and to
/// <out>/summary.json.
int run(int argc, const char* const* argv);

}  // namespace zrlj::cli
