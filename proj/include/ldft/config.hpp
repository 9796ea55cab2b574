#ifndef LDFT_CONFIG_HPP
#define LDFT_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldft/types.hpp"

namespace ldft {

// Flat key = value text with dotted sections and '#' comments. Keys keep
// insertion order; every key must be consumed or finish() reports it with
// its line number.
class KvFile {
public:
  static KvFile parse(const std::string& text);
  static KvFile parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback);
  std::string require(const std::string& key);
  double get_num(const std::string& key, double fallback);
  double require_num(const std::string& key);
  int get_int(const std::string& key, int fallback);
  bool get_bool(const std::string& key, bool fallback);

  // Keys matching prefix + ".", in file order (used for term lists).
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  // Throws ConfigError naming any key never read.
  void finish() const;

  // All key/value pairs in file order (for manifests).
  std::vector<std::pair<std::string, std::string>> items() const;

private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

std::vector<double> parse_num_list(const std::string& text, char sep = ',');

}  // namespace ldft

#endif
