#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "driftplan/experiment.hpp"

namespace driftplan {

/// Resolved config as canonical key=value pairs (the run-log header block).
std::vector<std::pair<std::string, std::string>> serialize_config(const ExperimentConfig& cfg);

/// Apply one key=value assignment. Throws ConfigInvalid for unknown keys or
/// unparsable values.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text file mirroring the ExperimentConfig field names.
/// `#` starts a comment; blank lines are ignored. Unset keys keep defaults.
ExperimentConfig parse_config_file(const std::filesystem::path& path);

}  // namespace driftplan
