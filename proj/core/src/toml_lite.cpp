#include "rvode/toml_lite.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace rvode::toml {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// strips a trailing comment that is not inside a quoted string
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

Value parse_scalar(const std::string& tok, int line) {
  Value v;
  v.line = line;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.type = Value::Type::String;
    v.str = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.type = Value::Type::Boolean;
    v.boolean = tok == "true";
    return v;
  }
  char* end = nullptr;
  std::string clean = tok;
  clean.erase(std::remove(clean.begin(), clean.end(), '_'), clean.end());
  v.num = std::strtod(clean.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw ParseError("cannot parse value '" + tok + "'", line);
  v.type = Value::Type::Number;
  return v;
}

std::vector<std::string> split_array_items(const std::string& body, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool quoted = false;
  for (char c : body) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  for (const auto& it : items)
    if (it.empty()) throw ParseError("empty array element", line);
  return items;
}

}  // namespace

double Value::as_number() const {
  if (type != Type::Number) throw ParseError("expected a number", line);
  return num;
}

long long Value::as_integer() const {
  const double v = as_number();
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-9 || std::fabs(v) > 9.2e18)
    throw ParseError("expected an integer", line);
  return static_cast<long long>(r);
}

const std::string& Value::as_string() const {
  if (type != Type::String) throw ParseError("expected a string", line);
  return str;
}

bool Value::as_boolean() const {
  if (type != Type::Boolean) throw ParseError("expected a boolean", line);
  return boolean;
}

std::vector<double> Value::as_number_array() const {
  std::vector<double> out;
  if (type == Type::Number) {  // scalar promotes to a one-element array
    out.push_back(num);
    return out;
  }
  if (type != Type::Array) throw ParseError("expected an array of numbers", line);
  out.reserve(array.size());
  for (const auto& v : array) out.push_back(v.as_number());
  return out;
}

Document Document::parse(const std::string& text) {
  Document doc;
  std::string section;
  doc.sections[section];  // root table

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    ++line_no;
    std::string line = trim(strip_comment(text.substr(pos, eol - pos)));
    pos = eol + 1;
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError("empty section name", line_no);
      doc.sections[section];
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
      const std::string key = trim(line.substr(0, eq));
      const std::string rhs = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("empty key", line_no);
      if (rhs.empty()) throw ParseError("missing value for '" + key + "'", line_no);
      Value v;
      if (rhs.front() == '[') {
        if (rhs.back() != ']') throw ParseError("unterminated array (arrays must be single-line)",
                                                line_no);
        v.type = Value::Type::Array;
        v.line = line_no;
        for (const auto& item : split_array_items(rhs.substr(1, rhs.size() - 2), line_no))
          v.array.push_back(parse_scalar(item, line_no));
      } else {
        v = parse_scalar(rhs, line_no);
      }
      auto& tbl = doc.sections[section];
      if (tbl.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
      tbl[key] = std::move(v);
    }
    if (eol == text.size()) break;
  }
  return doc;
}

const Value* Document::find(const std::string& section, const std::string& key) const {
  auto sit = sections.find(section);
  if (sit == sections.end()) return nullptr;
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

}  // namespace rvode::toml
