#pragma once

// Scenario files: one `key = value` per line, `#` starts a comment, keys are
// dotted (`attack.members`). Unset keys keep the paper_scenario() defaults.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bhsim/scenario.hpp"

namespace bhsim {

enum class ConfigErrorKind { missing_file, syntax, unknown_key, bad_value, invalid };

std::string_view config_error_kind_name(ConfigErrorKind kind);

class ConfigError : public std::runtime_error {
 public:
  /// `line` is 1-based; 0 when the error is not tied to a line.
  ConfigError(ConfigErrorKind kind, std::size_t line, const std::string& message);

  ConfigErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ConfigErrorKind kind_;
  std::size_t line_;
};

/// Parses scenario text on top of paper_scenario() and validates the result.
ScenarioConfig parse_scenario_text(std::string_view text);
ScenarioConfig parse_scenario(const std::filesystem::path& path);

}  // namespace bhsim
