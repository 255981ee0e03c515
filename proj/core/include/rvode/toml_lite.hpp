#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvode::toml {

/**
 * Minimal TOML subset sufficient for experiment configs: [section] tables,
 * key = value with strings, numbers, booleans and flat arrays, # comments.
 * No nested tables, dates or multi-line values. Errors carry line numbers.
 */
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_no)
      : std::runtime_error("config line " + std::to_string(line_no) + ": " + msg),
        line(line_no) {}
  int line;
};

struct Value {
  enum class Type { String, Number, Boolean, Array };
  Type type = Type::Number;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<Value> array;
  int line = 0;

  double as_number() const;
  long long as_integer() const;  // number that must be integral
  const std::string& as_string() const;
  bool as_boolean() const;
  std::vector<double> as_number_array() const;
};

using Table = std::map<std::string, Value>;

struct Document {
  std::map<std::string, Table> sections;

  static Document parse(const std::string& text);

  bool has(const std::string& section) const { return sections.count(section) != 0; }
  const Value* find(const std::string& section, const std::string& key) const;
};

}  // namespace rvode::toml
