#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "costreg/harness/train_config.hpp"

namespace costreg::cli {

struct ParsedConfig {
  harness::TrainConfig config;
  std::set<std::string> keys;  // keys assigned explicitly, by the file or by overrides
};

/// Parses flat `key=value` text. Blank lines and `#` comments are ignored; whitespace
/// around keys and values is trimmed. Errors name the offending line.
ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ParsedConfig read_config_file(const std::filesystem::path& path);

/// Applies `key=value` overrides on top of a parsed config.
void apply_overrides(ParsedConfig& parsed, const std::vector<std::string>& overrides);

}  // namespace costreg::cli
