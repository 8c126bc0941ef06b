#pragma once

#include <string>
#include <vector>

#include "cli/run_config.hpp"
#include "tpa/report.hpp"

namespace tpa::cli {

struct Outcome {
  std::vector<std::string> files;  // written paths, in write order
  std::string summary;             // one or more lines for stdout
};

// Header lines shared by every output file. The timestamp line is the only
// entry that changes between identical runs.
Metadata run_metadata(const RunConfig& cfg);

Outcome cmd_curve(const RunConfig& cfg);
Outcome cmd_optimize(const RunConfig& cfg);
Outcome cmd_sweep(const RunConfig& cfg);
Outcome cmd_reference(const RunConfig& cfg);
Outcome cmd_coherent(const RunConfig& cfg);

// Dispatches on cfg.command.
Outcome run(const RunConfig& cfg);

}  // namespace tpa::cli
