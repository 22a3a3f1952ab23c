#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace kfp::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
  if (used != t.size() || std::isnan(v)) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

Config::Config(const Schema& schema) {
  for (const KeySpec& k : schema) {
    order_.push_back(k.name);
    values_[k.name] = k.default_value;
  }
}

void Config::assign(const std::string& key, const std::string& value, const std::string& origin) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin + ": unknown key '" + key + "'");
  it->second = value;
}

void Config::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    assign(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin + ":" + std::to_string(lineno));
  }
}

void Config::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  assign(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
}

const std::string& Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("config key not in schema: " + key);
  return it->second;
}

double Config::num(const std::string& key) const { return parse_number(str(key), key); }

long long Config::integer(const std::string& key) const {
  const double v = num(key);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(key + ": expected an integer");
  return static_cast<long long>(v);
}

std::vector<std::string> Config::str_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::num_list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& s : str_list(key)) out.push_back(parse_number(s, key));
  return out;
}

std::vector<std::string> Config::resolved() const {
  std::vector<std::string> out;
  for (const std::string& k : order_) out.push_back(k + "=" + values_.at(k));
  return out;
}

}  // namespace kfp::cli
