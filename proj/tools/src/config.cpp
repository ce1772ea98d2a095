#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hplateau/errors.hpp"

namespace plateau_cli {

using hplateau::Errc;
using hplateau::Error;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(Errc::config_error, key + ": " + why);
}

double to_real(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + s + "'");
  }
  if (used != s.size()) bad(key, "expected a number, got '" + s + "'");
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::filesystem::path& base_dir) {
  Config c;
  c.base_dir_ = base_dir;
  std::istringstream in(text);
  std::string line, section = "run";
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad("line " + std::to_string(line_no), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) bad("line " + std::to_string(line_no), "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) bad("line " + std::to_string(line_no), "empty key");
    const std::string full = section + "." + key;
    if (c.values_.count(full)) bad(full, "duplicate key");
    c.values_[full] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path());
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) bad(key, "missing");
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::real(const std::string& key) const { return to_real(key, str(key)); }

double Config::real(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

long Config::integer(const std::string& key) const {
  const std::string s = str(key);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    bad(key, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) bad(key, "expected an integer, got '" + s + "'");
  return v;
}

long Config::integer(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string s = str(key);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  bad(key, "expected true or false, got '" + s + "'");
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  std::string item;
  std::istringstream in(str(key));
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_real(key, item));
  }
  if (out.empty()) bad(key, "empty list");
  return out;
}

hplateau::Vec3 Config::vec3(const std::string& key) const {
  const auto v = reals(key);
  if (v.size() != 3) bad(key, "expected three comma separated numbers");
  return {v[0], v[1], v[2]};
}

hplateau::Vec3 Config::vec3(const std::string& key, const hplateau::Vec3& fallback) const {
  return has(key) ? vec3(key) : fallback;
}

std::filesystem::path Config::existing_path(const std::string& key) const {
  std::filesystem::path p = str(key);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  if (!std::filesystem::exists(p)) bad(key, "file " + p.string() + " does not exist");
  return p;
}

}  // namespace plateau_cli
