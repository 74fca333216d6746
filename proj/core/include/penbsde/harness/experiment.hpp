#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "penbsde/harness/config.hpp"
#include "penbsde/harness/report.hpp"

namespace penbsde::harness {

std::vector<std::string> listFamilies();

/// Suites of a family in run order; empty for an unknown family.
std::vector<std::string> familySuites(const std::string& family);

/// Runs the selected suites on `jobs` worker threads. Each suite draws from its
/// own substream of the seed (indexed by the suite's position in the family),
/// and results are assembled in suite order, so the report does not depend on
/// `jobs` or on which suites are selected. A suite that throws yields one
/// failing check named "<suite>/error".
RunReport runExperiment(const ExperimentConfig& config, std::size_t jobs = 1);

}  // namespace penbsde::harness
