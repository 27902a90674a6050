#pragma once

#include <filesystem>
#include <string>

#include "wavefield/training.hpp"

// Flat "key = value" restore configuration. '#' starts a comment; blank lines
// are ignored; unknown keys, repeated keys and malformed values are errors.
namespace wf::app {

training::TrainConfig parse_config(const std::string& text);
training::TrainConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, in a stable order; parse_config reads it back.
std::string format_config(const training::TrainConfig& config);

}  // namespace wf::app
