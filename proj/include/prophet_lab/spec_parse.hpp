#ifndef PROPHET_LAB_SPEC_PARSE_HPP
#define PROPHET_LAB_SPEC_PARSE_HPP

#include <string>
#include <utility>
#include <vector>

namespace prophet_lab {

// Parsed form of "name(key=value, ...)". Values may themselves contain
// parenthesized calls; commas only split at depth zero.
struct CallSpec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  int require_int(const std::string& key) const;
};

CallSpec parse_call(const std::string& text);

}  // namespace prophet_lab

#endif
