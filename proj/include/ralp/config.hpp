#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ralp/harness.hpp"

namespace ralp {

// Raised for malformed or inconsistent configuration input; the CLI maps
// it to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses the flat INI-style experiment format:
//
//     [channel]
//     p1_db = 12        # keys ending in _db are converted to linear scale
//     k1 = 2
//
//     [sweep]
//     variable = k2
//     values = 0, 2, 4
//
// Sections group related keys ([pool], [channel], [detector], [sweep],
// [run]); '#' and ';' start comments.  Unknown keys are errors.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

// A preset is a list of labelled experiments (error-propagation presets
// expand into one arm per injection mode).
struct PresetRun {
    std::string label;
    ExperimentConfig config;
};

// Named study presets (fig4 ... fig10); throws ConfigError on an unknown
// name.  preset_names() lists the valid arguments.
std::vector<PresetRun> figure_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ralp
