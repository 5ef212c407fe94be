#include "core/kvconfig.hpp"

#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/textio.hpp"

namespace survkit {

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

KvConfig KvConfig::from_string(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[std::string(key)] = std::string(value);
  }
  return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

const std::string* KvConfig::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& def) const {
  const auto* v = find(key);
  return v ? *v : def;
}

double KvConfig::get_double(const std::string& key, double def) const {
  const auto* v = find(key);
  if (!v) return def;
  auto parsed = parse_double(*v);
  if (!parsed) throw ConfigError("config key '" + key + "': '" + *v + "' is not a number");
  return *parsed;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t def) const {
  const auto* v = find(key);
  if (!v) return def;
  auto parsed = parse_int(*v);
  if (!parsed) throw ConfigError("config key '" + key + "': '" + *v + "' is not an integer");
  return *parsed;
}

bool KvConfig::get_bool(const std::string& key, bool def) const {
  const auto* v = find(key);
  if (!v) return def;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw ConfigError("config key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<double> KvConfig::get_double_list(const std::string& key,
                                              const std::vector<double>& def) const {
  const auto* v = find(key);
  if (!v || trim(*v).empty()) return def;
  std::vector<double> out;
  std::string_view rest = *v;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    auto parsed = parse_double(item);
    if (!parsed) throw ConfigError("config key '" + key + "': '" + std::string(item) + "' is not a number");
    out.push_back(*parsed);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::vector<int> KvConfig::get_int_list(const std::string& key, const std::vector<int>& def) const {
  const auto got = get_double_list(key, {});
  if (got.empty()) return def;
  std::vector<int> out;
  for (double v : got) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError("config key '" + key + "': expected integers");
    out.push_back(i);
  }
  return out;
}

std::string KvConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

std::string KvConfig::hash_hex() const {
  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace survkit
