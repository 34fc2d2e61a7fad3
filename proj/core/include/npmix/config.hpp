#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace npmix {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat typed key-value configuration. Grammar, one entry per line:
///   key.subkey = value      # trailing comments allowed
/// Blank lines and lines starting with '#' are ignored. List values are
/// whitespace-separated. Unknown keys are kept (callers validate).
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace npmix
