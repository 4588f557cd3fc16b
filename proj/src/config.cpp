#include "qac/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace qac {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::string section = "";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_validation("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_validation("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail_validation("config line " + std::to_string(lineno) + ": empty key");
    cfg.sections_[section][key] = val;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto v = raw(section, key);
  return v ? *v : fallback;
}

double Config::get_num(const std::string& section, const std::string& key, double fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    double x = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    fail_validation("config value [" + section + "] " + key + " = '" + *v + "' is not a number");
  }
}

double Config::require_num(const std::string& section, const std::string& key) const {
  if (!has(section, key)) fail_validation("config missing required key [" + section + "] " + key);
  return get_num(section, key, 0.0);
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    long long x = std::stoll(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    fail_validation("config value [" + section + "] " + key + " = '" + *v + "' is not an integer");
  }
}

std::string Config::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  for (const auto& [sec, kv] : sections_) {
    mix(sec);
    for (const auto& [k, v] : kv) {
      mix(k);
      mix(v);
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelSpec model_from_config(const Config& cfg) {
  ModelSpec spec;
  spec.d = static_cast<int>(cfg.get_int("model", "d", 1));
  spec.nu = static_cast<int>(cfg.get_int("model", "nu", 1));
  spec.mass = cfg.require_num("model", "m");
  spec.rigidity = cfg.require_num("model", "a");
  spec.beta = cfg.require_num("model", "beta");

  for (int s = 1; s <= 16; ++s) {
    const std::string key = "b" + std::to_string(s);
    if (!cfg.has("potential", key)) break;
    spec.potential.even_coeffs.push_back(cfg.require_num("potential", key));
  }
  spec.potential.field = cfg.get_num("potential", "h", 0.0);

  const std::string kind = cfg.get_str("coupling", "kind", "nearest_neighbor");
  const double j = cfg.get_num("coupling", "J", 0.0);
  if (kind == "nearest_neighbor") {
    spec.couplings = DynamicalMatrix::nearest_neighbor(j);
  } else if (kind == "exponential_decay") {
    spec.couplings = DynamicalMatrix::exponential_decay(j, cfg.require_num("coupling", "rate"));
  } else if (kind == "polynomial_decay") {
    spec.couplings = DynamicalMatrix::polynomial_decay(j, cfg.require_num("coupling", "gamma"));
  } else {
    fail_validation("unknown coupling kind: " + kind);
  }
  return spec;
}

}  // namespace qac
