#pragma once

#include "ndf/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ndf {

/// Exit codes shared with the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSolverFailure = 2,
  kExitExpectationMismatch = 3,
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::string message;
};

RunOutcome run_audit(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     std::ostream& log);
RunOutcome run_flow(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                    std::ostream& log);
RunOutcome run_slopes(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log);

}  // namespace ndf
