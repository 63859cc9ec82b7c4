#pragma once
#include <filesystem>
#include <stdexcept>
#include <string>

#include "mste/sim.hpp"

namespace mste {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A complete, validated run description: the scenario plus output options.
struct RunConfig {
    Scenario scenario;
    std::string output_dir = "out";
    int verbosity = 1;
    bool emit_grid = false;  // also serialize per-event belief snapshots
};

/// Parse and validate a JSON config document. Minimal configs need only
/// domain, sources, and seed; defaults fill everything else. Unknown keys
/// are rejected; violations raise ConfigError naming field and constraint.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Effective configuration (defaults applied) as a JSON document. Parsing the
/// result yields an equal RunConfig.
std::string serialize_config(const RunConfig& config);

}  // namespace mste
