#pragma once

#include <iosfwd>
#include <string>

#include "resdens/montecarlo.hpp"

namespace resdens {

/// Reads an ExperimentConfig from either a JSON object or flat
/// `key = value` lines ('#' starts a comment). Lists are comma separated in
/// the flat form and arrays in JSON; numbers may be fractions such as 1/3.
/// Unknown keys and malformed values throw ConfigError. The result is
/// validated.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config(const std::string& path);

}  // namespace resdens
