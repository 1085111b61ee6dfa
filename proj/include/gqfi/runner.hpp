#pragma once

#include <string>
#include <vector>

#include "gqfi/config.hpp"

namespace gqfi {

inline constexpr const char* kArtifactVersion = "gqfi 0.1.0";

/// Executes one run config; writes `<out_dir>/<prefix>_<mode>.csv`
/// (deterministic bytes for identical configs). Returns the paths written.
std::vector<std::string> run(const RunConfig& config);

struct FigurePreset {
    std::string name;      // e.g. fig2b
    std::string synopsis;  // one line
    std::string config;    // config text, parseable by parse_config_text
};

// One preset per figure panel (grouped where panels share a run).
std::vector<FigurePreset> figure_recipes();

// Resolves a preset by name; ConfigError if unknown.
FigurePreset find_preset(const std::string& name);

}  // namespace gqfi
