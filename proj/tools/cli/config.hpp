#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kfp::cli {

/// Bad configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

using Schema = std::vector<KeySpec>;

/// Resolved key=value set for one command. Every key of the schema is present.
class Config {
 public:
  Config() = default;
  explicit Config(const Schema& schema);

  /// Applies key=value text (one per line, '#' comments). Unknown keys throw.
  void merge_text(const std::string& text, const std::string& origin);
  void merge_file(const std::string& path);
  /// "key=value" from the command line.
  void set(const std::string& assignment);

  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::vector<double> num_list(const std::string& key) const;
  std::vector<std::string> str_list(const std::string& key) const;
  bool has_value(const std::string& key) const { return !str(key).empty(); }

  /// "key=value" lines in schema order.
  std::vector<std::string> resolved() const;

 private:
  void assign(const std::string& key, const std::string& value, const std::string& origin);

  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

/// Parses a number, accepting "inf".
double parse_number(const std::string& s, const std::string& what);

}  // namespace kfp::cli
