#pragma once

// Project configuration: a flat `key = value` text file with `#` comments.
// List values are comma separated. Relative paths are resolved against the
// directory containing the configuration file.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "infraloom/error.hpp"

namespace infraloom {

struct ProjectConfig {
  std::string app_name;
  std::vector<std::string> source_dirs{"src"};
  std::string static_dir = "static";
  std::string bucket;
  std::string region = "us-east-1";
  std::string provider = "aws";
  bool warming_enabled = true;
  int warming_period_minutes = 5;
  std::string out_dir = "deploy";

  // Warm-pool model parameters used by `simulate` and `estimate`.
  int max_instances = 1000;
  double service_time_ms = 200;
  double cold_start_ms = 400;
  double expiry_minutes = 15;
  int warm_pool_target = 1;
  double memory_gb = 3;

  // Directory the relative paths above are resolved against.
  std::filesystem::path root = ".";

  std::filesystem::path resolve(const std::string& p) const { return root / p; }
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message)
      : Error("ConfigError", file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                                 ": ConfigError: " + message) {}
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    std::string item = trim(s.substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = comma + 1;
  }
  return out;
}

// Reads `key = value` lines. Duplicate keys are an error.
inline std::map<std::string, std::pair<std::string, int>> read_key_values(std::istream& in,
                                                                         const std::string& name) {
  std::map<std::string, std::pair<std::string, int>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(name, lineno, "expected 'key = value'");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(name, lineno, "empty key");
    if (!out.emplace(key, std::make_pair(value, lineno)).second) {
      throw ConfigError(name, lineno, "duplicate key '" + key + "'");
    }
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& name, const std::string& key, int line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(name, line, "'" + key + "' must be a number, got '" + text + "'");
  }
  return value;
}

inline bool parse_bool(const std::string& text, const std::string& name, const std::string& key,
                       int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(name, line, "'" + key + "' must be true or false, got '" + text + "'");
}

}  // namespace detail

inline ProjectConfig parse_config(std::istream& in, const std::string& name,
                                  std::filesystem::path root = ".") {
  using namespace detail;
  ProjectConfig cfg;
  cfg.root = std::move(root);
  bool bucket_set = false;
  for (const auto& [key, entry] : read_key_values(in, name)) {
    const auto& [value, line] = entry;
    if (key == "app_name") {
      cfg.app_name = value;
    } else if (key == "source_dirs") {
      cfg.source_dirs = split_list(value);
    } else if (key == "static_dir") {
      cfg.static_dir = value;
    } else if (key == "bucket") {
      cfg.bucket = value;
      bucket_set = true;
    } else if (key == "region") {
      cfg.region = value;
    } else if (key == "provider") {
      cfg.provider = value;
    } else if (key == "warming_enabled") {
      cfg.warming_enabled = parse_bool(value, name, key, line);
    } else if (key == "warming_period_minutes") {
      cfg.warming_period_minutes = parse_number<int>(value, name, key, line);
      if (cfg.warming_period_minutes < 1) throw ConfigError(name, line, "'" + key + "' must be >= 1");
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "max_instances") {
      cfg.max_instances = parse_number<int>(value, name, key, line);
      if (cfg.max_instances < 1) throw ConfigError(name, line, "'" + key + "' must be >= 1");
    } else if (key == "service_time_ms") {
      cfg.service_time_ms = parse_number<double>(value, name, key, line);
      if (cfg.service_time_ms <= 0) throw ConfigError(name, line, "'" + key + "' must be > 0");
    } else if (key == "cold_start_ms") {
      cfg.cold_start_ms = parse_number<double>(value, name, key, line);
      if (cfg.cold_start_ms < 0) throw ConfigError(name, line, "'" + key + "' must be >= 0");
    } else if (key == "expiry_minutes") {
      cfg.expiry_minutes = parse_number<double>(value, name, key, line);
      if (cfg.expiry_minutes <= 0) throw ConfigError(name, line, "'" + key + "' must be > 0");
    } else if (key == "warm_pool_target") {
      cfg.warm_pool_target = parse_number<int>(value, name, key, line);
      if (cfg.warm_pool_target < 0) throw ConfigError(name, line, "'" + key + "' must be >= 0");
    } else if (key == "memory_gb") {
      cfg.memory_gb = parse_number<double>(value, name, key, line);
      if (cfg.memory_gb < 0) throw ConfigError(name, line, "'" + key + "' must be >= 0");
    } else {
      throw ConfigError(name, line, "unknown key '" + key + "'");
    }
  }

  static const std::regex kAppName("[a-z][a-z0-9-]{0,62}");
  if (cfg.app_name.empty()) throw ConfigError(name, 0, "missing required key 'app_name'");
  if (!std::regex_match(cfg.app_name, kAppName)) {
    throw ConfigError(name, 0, "app_name '" + cfg.app_name + "' must match [a-z][a-z0-9-]{0,62}");
  }
  if (cfg.source_dirs.empty()) throw ConfigError(name, 0, "source_dirs is empty");
  if (!bucket_set) cfg.bucket = cfg.app_name + "-assets";
  return cfg;
}

inline ProjectConfig parse_config(std::string_view text, const std::string& name = "<config>") {
  std::istringstream in{std::string(text)};
  return parse_config(in, name);
}

// Throws std::filesystem::filesystem_error when the file cannot be read.
inline ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::filesystem::filesystem_error("cannot read configuration", path,
                                            std::make_error_code(std::errc::no_such_file_or_directory));
  }
  auto root = path.parent_path();
  if (root.empty()) root = ".";
  return parse_config(in, path.string(), root);
}

}  // namespace infraloom
