#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace survkit {

// Flat `key = value` config text, one pair per line, '#' comments, sections
// by key prefix (e.g. optim.epochs). Values are kept as strings; typed
// accessors parse on demand and raise ConfigError with the offending key.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig from_file(const std::string& path);
  static KvConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string* find(const std::string& key) const;  // nullptr if absent

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& def) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& def) const;

  // Sorted `key = value` lines; the canonical form behind hash().
  std::string canonical() const;
  // FNV-1a 64 over canonical(), as fixed-width hex. Seed overrides change it.
  std::string hash_hex() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace survkit
