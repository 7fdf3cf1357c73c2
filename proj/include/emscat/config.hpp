#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace emscat {

// Flat key-value configuration: one `section.key = value` per line, `#`
// starts a comment.  Keys are lower case [a-z0-9_-] segments joined by dots.
// Typed getters throw Parse naming the key (and its line when it came from
// text); every key read is marked used so that leftovers can be reported.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "config");
  static Config load(const std::string& path);
  // Sorted `key = value` lines; parse(serialize()) reproduces the entries.
  std::string serialize() const;

  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return values_; }
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated reals; an empty value is the empty list.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::vector<double>& values);
  void set_u64(const std::string& key, std::uint64_t value);

  // Keys never read by a getter.
  std::vector<std::string> unused_keys() const;
  // Parse error listing the unused keys, if any.
  void reject_unused() const;

  bool operator==(const Config& o) const { return values_ == o.values_; }

 private:
  std::string where(const std::string& key) const;
  const std::string& raw(const std::string& key) const;

  std::string source_ = "config";
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
};

bool valid_config_key(const std::string& key);
std::string format_doubles(const std::vector<double>& v);

}  // namespace emscat
