#include "costreg/cli/config_file.hpp"

#include <fstream>
#include <sstream>

#include "costreg/errors.hpp"

namespace costreg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void assign(ParsedConfig& parsed, const std::string& assignment, const std::string& where) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigurationError(where + ": expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  try {
    harness::apply_setting(parsed.config, key, value);
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
  parsed.keys.insert(key);
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
  ParsedConfig parsed;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    assign(parsed, line, origin + ":" + std::to_string(number) + " '" + line + "'");
  }
  return parsed;
}

ParsedConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

void apply_overrides(ParsedConfig& parsed, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) assign(parsed, o, "--set '" + o + "'");
}

}  // namespace costreg::cli
