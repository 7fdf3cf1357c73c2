#include "emscat/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "emscat/csv.hpp"
#include "emscat/errors.hpp"

namespace emscat {

bool valid_config_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  if (key.find('.') == std::string::npos) return false;
  char prev = 0;
  for (char ch : key) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    if (!ok || (ch == '.' && prev == '.')) return false;
    prev = ch;
  }
  return true;
}

std::string format_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string at = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) fail(ErrorCode::Parse, at + "expected 'section.key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_config_key(key)) fail(ErrorCode::Parse, at + "invalid key '" + key + "'");
    if (cfg.values_.count(key)) fail(ErrorCode::Parse, at + "duplicate key '" + key + "'");
    cfg.values_[key] = value;
    cfg.lines_[key] = lineno;
  }
  return cfg;
}

Config Config::load(const std::string& path) { return parse(read_text_file(path), path); }

std::string Config::serialize() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (auto it = values_.lower_bound(prefix); it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
       ++it)
    out.push_back(it->first);
  return out;
}

std::string Config::where(const std::string& key) const {
  auto it = lines_.find(key);
  if (it == lines_.end()) return source_ + ": key '" + key + "'";
  return source_ + ":" + std::to_string(it->second) + ": key '" + key + "'";
}

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::Parse, source_ + ": missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    return parse_double(v);
  } catch (const Error&) {
    fail(ErrorCode::Parse, where(key) + ": expected a number, got '" + v + "'");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const std::string& v = raw(key);
  long long out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    fail(ErrorCode::Parse, where(key) + ": expected an integer, got '" + v + "'");
  return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    fail(ErrorCode::Parse, where(key) + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  fail(ErrorCode::Parse, where(key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const std::string& part : split(v, ',')) {
    try {
      out.push_back(parse_double(part));
    } catch (const Error&) {
      fail(ErrorCode::Parse, where(key) + ": expected a comma-separated list of numbers, got '" + v + "'");
    }
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_config_key(key)) fail(ErrorCode::InvalidArgument, "invalid config key '" + key + "'");
  if (value.find('\n') != std::string::npos || value.find('#') != std::string::npos || trim(value) != value)
    fail(ErrorCode::InvalidArgument, "config value for '" + key + "' cannot be represented");
  values_[key] = value;
  lines_.erase(key);
}

void Config::set(const std::string& key, double value) { set(key, format_double(value)); }
void Config::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Config::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
void Config::set(const std::string& key, const std::vector<double>& values) { set(key, format_doubles(values)); }
void Config::set_u64(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& kv : values_)
    if (!used_.count(kv.first)) out.push_back(kv.first);
  return out;
}

void Config::reject_unused() const {
  const auto keys = unused_keys();
  if (keys.empty()) return;
  std::string msg = source_ + ": unknown key";
  msg += keys.size() > 1 ? "s " : " ";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) msg += ", ";
    msg += "'" + keys[i] + "'";
    auto it = lines_.find(keys[i]);
    if (it != lines_.end()) msg += " (line " + std::to_string(it->second) + ")";
  }
  fail(ErrorCode::Parse, msg);
}

}  // namespace emscat
