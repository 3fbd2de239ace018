#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rca/report.hpp"
#include "rca/scenario.hpp"

namespace rca {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  std::optional<double> tol;          // overrides the command-level gap gates
  std::optional<long long> budget;    // brute-route evaluation budget
};

const std::vector<std::string>& commandNames();

// Dispatch one CLI command against a loaded scenario. Independent checks fan
// out across workers (capped by RCA_WORKERS); the merged report is sorted by
// record id and its body depends only on (scenario, options), never on
// scheduling.
Report runCommand(const std::string& command, const Scenario& sc, const RunOptions& opt);

}  // namespace rca
