#include "prophet_lab/spec_parse.hpp"

#include <cctype>
#include <cstdlib>

#include "prophet_lab/errors.hpp"

namespace prophet_lab {

namespace {

std::string strip(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

CallSpec parse_call(const std::string& text) {
  std::string t = strip(text);
  if (t.empty()) throw BadParams("empty spec string");
  CallSpec out;
  size_t open = t.find('(');
  if (open == std::string::npos) {
    out.name = t;
    return out;
  }
  if (t.back() != ')') throw BadParams("unbalanced parentheses in '" + text + "'");
  out.name = strip(t.substr(0, open));
  std::string body = t.substr(open + 1, t.size() - open - 2);
  int depth = 0;
  std::string cur;
  std::vector<std::string> parts;
  for (char c : body) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw BadParams("unbalanced parentheses in '" + text + "'");
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (depth != 0) throw BadParams("unbalanced parentheses in '" + text + "'");
  if (!strip(cur).empty() || !parts.empty()) parts.push_back(cur);
  for (const std::string& p : parts) {
    std::string item = strip(p);
    if (item.empty()) throw BadParams("empty argument in '" + text + "'");
    size_t eq = item.find('=');
    size_t paren = item.find('(');
    if (eq == std::string::npos || (paren != std::string::npos && paren < eq))
      throw BadParams("argument '" + item + "' must have the form key=value");
    out.args.emplace_back(strip(item.substr(0, eq)), strip(item.substr(eq + 1)));
  }
  return out;
}

bool CallSpec::has(const std::string& key) const {
  for (const auto& [k, v] : args)
    if (k == key) return true;
  return false;
}

std::string CallSpec::get_string(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : args)
    if (k == key) return v;
  return fallback;
}

std::string CallSpec::require_string(const std::string& key) const {
  for (const auto& [k, v] : args)
    if (k == key) return v;
  throw BadParams("missing argument '" + key + "' for " + name);
}

double CallSpec::get_double(const std::string& key, double fallback) const {
  return has(key) ? require_double(key) : fallback;
}

double CallSpec::require_double(const std::string& key) const {
  std::string v = require_string(key);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw BadParams("argument '" + key + "=" + v + "' is not a number");
  return x;
}

int CallSpec::get_int(const std::string& key, int fallback) const {
  return has(key) ? require_int(key) : fallback;
}

int CallSpec::require_int(const std::string& key) const {
  double x = require_double(key);
  int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw BadParams("argument '" + key + "' must be an integer");
  return i;
}

}  // namespace prophet_lab
