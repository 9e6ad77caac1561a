#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjnet/experiments.hpp"

namespace hjnet {

/// Everything a CLI run needs. `kind` is optional because the subcommand already
/// names the run; when present it must agree with the subcommand.
struct RunConfig {
  std::optional<ExperimentKind> kind;
  ExperimentSpec spec;
  std::optional<std::string> output;

  bool operator==(const RunConfig&) const = default;
};

/// Every problem found while reading a config, one "key.path: message" per entry.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates a JSON config. With `strict` unknown keys are errors;
/// otherwise they are collected into `warnings` (when given) and ignored.
RunConfig parse_config(const std::string& text, bool strict = true,
                       std::vector<std::string>* warnings = nullptr);

/// Canonical JSON; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

/// The ExperimentSpec part of serialize(), used for metadata sidecars.
std::string spec_json(const ExperimentSpec& spec);

}  // namespace hjnet
