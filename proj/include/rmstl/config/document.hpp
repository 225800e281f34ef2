#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rmstl/error.hpp"

namespace rmstl::config {

/// Minimal TOML-style document: `[section]` headers (dotted names allowed),
/// `key = value` lines, `#` comments. Values are numbers, double-quoted strings,
/// booleans, arrays (may span lines) and single-line inline tables.
struct Value;
using Array = std::vector<Value>;
using Entries = std::vector<std::pair<std::string, Value>>;

struct Value {
  std::variant<double, std::string, bool, Array, Entries> data;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_table() const { return std::holds_alternative<Entries>(data); }
};

struct Table {
  std::string name;
  int line = 0;
  Entries entries;

  const Value* find(std::string_view key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

class Document {
 public:
  std::string source;
  /// Index 0 is the unnamed root table (keys before the first header).
  std::vector<Table> tables;

  const Table* find(std::string_view name) const {
    for (const auto& t : tables)
      if (t.name == name) return &t;
    return nullptr;
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw SpecValidationError(source + ":" + std::to_string(line) + ": " + msg);
  }

  double number(const Value& v, std::string_view what) const {
    if (!v.is_number()) fail(v.line, std::string(what) + " must be a number");
    return std::get<double>(v.data);
  }
  const std::string& string(const Value& v, std::string_view what) const {
    if (!v.is_string()) fail(v.line, std::string(what) + " must be a string");
    return std::get<std::string>(v.data);
  }
  bool boolean(const Value& v, std::string_view what) const {
    if (!v.is_bool()) fail(v.line, std::string(what) + " must be true or false");
    return std::get<bool>(v.data);
  }
  const Array& array(const Value& v, std::string_view what) const {
    if (!v.is_array()) fail(v.line, std::string(what) + " must be an array");
    return std::get<Array>(v.data);
  }
  const Entries& table(const Value& v, std::string_view what) const {
    if (!v.is_table()) fail(v.line, std::string(what) + " must be an inline table { ... }");
    return std::get<Entries>(v.data);
  }
  std::int64_t integer(const Value& v, std::string_view what) const {
    double d = number(v, what);
    if (std::floor(d) != d || std::fabs(d) > 9e15) fail(v.line, std::string(what) + " must be an integer");
    return static_cast<std::int64_t>(d);
  }
};

namespace detail {

class DocumentParser {
 public:
  DocumentParser(std::string_view text, std::string source) : text_(text) { doc_.source = std::move(source); }

  Document parse() {
    doc_.tables.push_back({"", 1, {}});
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        parse_header();
      } else {
        parse_entry(doc_.tables.back().entries);
      }
      end_of_line();
    }
    return std::move(doc_);
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { doc_.fail(line_, msg); }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        advance();
        continue;
      }
      return;
    }
  }

  // Whitespace, comments and newlines; used inside arrays.
  void skip_all() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (peek() != '\n') return;
      advance();
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    advance();
  }

  static bool bare_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::string parse_key() {
    skip_spaces();
    if (peek() == '"') return parse_string();
    std::size_t start = pos_;
    while (!eof() && bare_char(peek())) ++pos_;
    if (start == pos_) fail(eof() ? "expected a key, found end of input" : std::string("expected a key, found '") + peek() + "'");
    return std::string(text_.substr(start, pos_ - start));
  }

  void parse_header() {
    int line = line_;
    ++pos_;
    std::string name = parse_key();
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      name += "." + parse_key();
      skip_spaces();
    }
    if (peek() != ']') fail("expected ']' to close the section header");
    ++pos_;
    if (doc_.find(name)) fail("duplicate section [" + name + "]");
    doc_.tables.push_back({name, line, {}});
  }

  void parse_entry(Entries& into) {
    int line = line_;
    std::string key = parse_key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + key + "'");
    ++pos_;
    skip_spaces();
    Value v = parse_value();
    for (const auto& [k, _] : into)
      if (k == key) doc_.fail(line, "duplicate key '" + key + "'");
    into.emplace_back(std::move(key), std::move(v));
  }

  Value parse_value() {
    Value v;
    v.line = line_;
    char c = peek();
    if (c == '"') {
      v.data = parse_string();
    } else if (c == '[') {
      v.data = parse_array();
    } else if (c == '{') {
      v.data = parse_inline_table();
    } else if (text_.substr(pos_, 4) == "true" && !bare_char(at(pos_ + 4))) {
      pos_ += 4;
      v.data = true;
    } else if (text_.substr(pos_, 5) == "false" && !bare_char(at(pos_ + 5))) {
      pos_ += 5;
      v.data = false;
    } else {
      v.data = parse_number();
    }
    return v;
  }

  char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

  std::string parse_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (eof()) fail("unterminated string");
        char e = text_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
  }

  double parse_number() {
    std::size_t start = pos_;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) ++pos_;
    std::string tok(text_.substr(start, pos_ - start));
    if (tok.empty()) fail(eof() ? "expected a value, found end of input" : std::string("expected a value, found '") + peek() + "'");
    std::string digits;
    for (char c : tok)
      if (c != '_') digits += c;
    if (digits == "inf" || digits == "+inf") return std::numeric_limits<double>::infinity();
    if (digits == "-inf") return -std::numeric_limits<double>::infinity();
    const char* b = digits.c_str();
    if (*b == '+') ++b;
    double d = 0;
    auto [end, ec] = std::from_chars(b, digits.c_str() + digits.size(), d);
    if (ec != std::errc() || end != digits.c_str() + digits.size()) fail("expected a value, found '" + tok + "'");
    return d;
  }

  Array parse_array() {
    ++pos_;
    Array out;
    while (true) {
      skip_all();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(parse_value());
      skip_all();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail(eof() ? "unterminated array" : std::string("expected ',' or ']' in array, found '") + peek() + "'");
      }
    }
  }

  Entries parse_inline_table() {
    ++pos_;
    Entries out;
    skip_spaces();
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      parse_entry(out);
      skip_spaces();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        return out;
      }
      fail("expected ',' or '}' in inline table");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  Document doc_;
};

}  // namespace detail

inline Document parse_document(std::string_view text, std::string source = "<input>") {
  return detail::DocumentParser(text, std::move(source)).parse();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Document load_document(const std::string& path) { return parse_document(read_file(path), path); }

}  // namespace rmstl::config
