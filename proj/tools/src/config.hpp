#pragma once

// Flat `key = value` configuration with [section] headers. Keys are addressed
// as "section.key"; keys before the first header live in section "run".

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hplateau/geometry.hpp"

namespace plateau_cli {

class Config {
 public:
  static Config parse(const std::string& text, const std::filesystem::path& base_dir = {});
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key) const;
  hplateau::Vec3 vec3(const std::string& key) const;
  hplateau::Vec3 vec3(const std::string& key, const hplateau::Vec3& fallback) const;
  // Resolved against the directory of the config file; must exist.
  std::filesystem::path existing_path(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

}  // namespace plateau_cli
