#include "ldft/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ldft {

namespace {
std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

KvFile KvFile::parse(const std::string& text) {
  KvFile out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (out.entries_.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    out.entries_[key] = Entry{value, lineno, false};
    out.order_.push_back(key);
  }
  return out;
}

KvFile KvFile::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

bool KvFile::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string KvFile::get(const std::string& key, const std::string& fallback) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.used = true;
  return it->second.value;
}

std::string KvFile::require(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
  it->second.used = true;
  return it->second.value;
}

double KvFile::get_num(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  return require_num(key);
}

double KvFile::require_num(const std::string& key) {
  const std::string v = require(key);
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    const int line = entries_.at(key).line;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' is not a number: '" + v + "'");
  }
}

int KvFile::get_int(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const double x = require_num(key);
  const int i = int(x);
  if (double(i) != x) {
    const int line = entries_.at(key).line;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' must be an integer");
  }
  return i;
}

bool KvFile::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const std::string v = require(key);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  const int line = entries_.at(key).line;
  throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                    "' must be a boolean");
}

std::vector<std::string> KvFile::keys_with_prefix(
    const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& k : order_)
    if (k.rfind(prefix + ".", 0) == 0) out.push_back(k);
  return out;
}

void KvFile::finish() const {
  for (const auto& [key, entry] : entries_) {
    if (!entry.used)
      throw ConfigError("line " + std::to_string(entry.line) +
                        ": unknown key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> KvFile::items() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : order_) out.emplace_back(k, entries_.at(k).value);
  return out;
}

std::vector<double> parse_num_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, sep)) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + tok + "' in list '" + text + "'");
    }
  }
  return out;
}

}  // namespace ldft
