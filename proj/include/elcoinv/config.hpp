#pragma once

#include "elcoinv/inversion.hpp"
#include "elcoinv/synth.hpp"

#include <filesystem>
#include <string>

namespace elcoinv {

/// Everything one run needs: what to synthesize and how to invert it. This is
/// the unit a config file encodes and the CLI executes.
struct RunConfig {
    ExperimentSpec spec;
    InversionSettings inversion;

    void validate() const;
};

/// Built-in preset wrapped as a run config; the inversion block keeps its
/// documented defaults with the preset's initial guesses copied in.
RunConfig config_for_example(const std::string& name);

/// Parses the sectioned `key = value` text format (schema in the README).
/// Unknown sections or keys are configuration errors; omitted keys keep the
/// defaults of `RunConfig{}`. `#` starts a comment anywhere on a line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

/// Applies one `section.key=value` override to an existing config.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Canonical complete text form: `parse_config(render_config(c))` reproduces
/// `c` exactly (doubles are printed with round-trip precision).
std::string render_config(const RunConfig& cfg);

/// Geometry kind names used by the `[geometry] kind` key.
std::string kind_name(AnalyticCurve::Kind kind);
AnalyticCurve::Kind kind_from_name(const std::string& name);

} // namespace elcoinv
