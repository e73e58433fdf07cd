#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "drifting/targets.hpp"
#include "drifting/training.hpp"

namespace drifting {

// Invalid configuration. line is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, std::string key, const std::string& what);
    const std::string& source() const { return source_; }
    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    std::string source_;
    std::size_t line_;
    std::string key_;
};

struct ConfigEntry {
    std::string value;
    std::string source;
    std::size_t line = 0;
};

// Flat "dotted.key = value" document; '#' starts a comment.
using ConfigDoc = std::map<std::string, ConfigEntry>;

ConfigDoc parse_config_text(const std::string& text, const std::string& source);
ConfigDoc load_config_file(const std::string& path);
// "key=value", applied after the file.
void apply_override(ConfigDoc& doc, const std::string& assignment);

struct ExperimentConfig {
    TrainConfig train;
    TargetSpec target;
    std::string out_dir = "out";
};

// Rejects unknown keys, checks required keys and validates everything
// before any compute. Throws ConfigError.
ExperimentConfig resolve_config(const ConfigDoc& doc);

// Every key with its effective value; parses back to the same config.
std::string resolved_config_text(const ExperimentConfig& config);

std::vector<std::string> known_config_keys();

}  // namespace drifting
