#pragma once

#include <map>
#include <optional>
#include <string>

#include "qac/model.hpp"

namespace qac {

// Flat key-value config with [section] headers, '#' comments, one
// "key = value" pair per line.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key, double fallback) const;
  double require_num(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }
  // FNV-1a over the normalized key-value stream; stable run manifest id
  std::string digest() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// [model]/[potential]/[coupling] sections -> ModelSpec
ModelSpec model_from_config(const Config& cfg);

}  // namespace qac
