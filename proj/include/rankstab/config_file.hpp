#pragma once

#include <map>
#include <string>

#include "rankstab/experiment.hpp"

namespace rankstab {

/// Parsed key/value config: `[section]` headers, `key = value` lines, `#`
/// comments. Raises ConfigInvalid on malformed lines.
using IniSections = std::map<std::string, std::map<std::string, std::string>>;
IniSections parse_ini(const std::string& text);

struct RunConfig {
  ExperimentConfig experiment;
  std::string output_dir;  // [output] dir; empty means unset
};

/// Loads and validates a run config (or a previously written manifest, which
/// uses the same format). Unknown keys raise ConfigInvalid except inside
/// [provenance], which is informational.
RunConfig load_run_config(const std::string& path);

/// Fully resolved config in loadable form plus provenance. `output_root` is
/// written back as [output] dir so a rerun lands next to the original.
std::string manifest_text(const ExperimentConfig& config, const std::string& output_root);

/// "a,b,c" list or "start:stop:step" range.
std::vector<double> parse_proportions(const std::string& text);

}  // namespace rankstab
