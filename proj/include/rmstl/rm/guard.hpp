#pragma once

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rmstl/error.hpp"
#include "rmstl/monitor/atoms.hpp"

namespace rmstl::rm {

using monitor::TruthAssignment;

/// Boolean expression over atom membership in a truth assignment.
class Guard {
 public:
  enum class Kind { True, Atom, Not, And, Or };

  static Guard always_true() { return Guard(std::make_shared<const Node>(Node{Kind::True})); }
  static Guard atom(std::size_t index, std::string name) {
    return Guard(std::make_shared<const Node>(Node{Kind::Atom, index, std::move(name)}));
  }
  static Guard negation(Guard g) { return Guard(std::make_shared<const Node>(Node{Kind::Not, 0, {}, g.node_})); }
  static Guard conjunction(Guard a, Guard b) {
    return Guard(std::make_shared<const Node>(Node{Kind::And, 0, {}, a.node_, b.node_}));
  }
  static Guard disjunction(Guard a, Guard b) {
    return Guard(std::make_shared<const Node>(Node{Kind::Or, 0, {}, a.node_, b.node_}));
  }

  bool eval(const TruthAssignment& sigma) const { return eval(*node_, sigma); }

  /// Indices of every atom the guard mentions.
  std::set<std::size_t> atoms() const {
    std::set<std::size_t> out;
    collect(*node_, out);
    return out;
  }

  std::string to_string() const { return print(*node_); }

 private:
  struct Node {
    Kind kind;
    std::size_t index = 0;
    std::string name{};
    std::shared_ptr<const Node> a{};
    std::shared_ptr<const Node> b{};
  };

  explicit Guard(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static bool eval(const Node& n, const TruthAssignment& s) {
    switch (n.kind) {
      case Kind::True: return true;
      case Kind::Atom: return s.contains(n.index);
      case Kind::Not: return !eval(*n.a, s);
      case Kind::And: return eval(*n.a, s) && eval(*n.b, s);
      case Kind::Or: return eval(*n.a, s) || eval(*n.b, s);
    }
    return false;
  }

  static void collect(const Node& n, std::set<std::size_t>& out) {
    if (n.kind == Kind::Atom) out.insert(n.index);
    if (n.a) collect(*n.a, out);
    if (n.b) collect(*n.b, out);
  }

  static std::string print(const Node& n) {
    switch (n.kind) {
      case Kind::True: return "true";
      case Kind::Atom: return n.name;
      case Kind::Not: return "not " + wrapped(*n.a);
      case Kind::And: return wrapped(*n.a) + " and " + wrapped(*n.b);
      case Kind::Or: return wrapped(*n.a) + " or " + wrapped(*n.b);
    }
    return {};
  }

  static std::string wrapped(const Node& n) {
    return n.kind == Kind::And || n.kind == Kind::Or ? "(" + print(n) + ")" : print(n);
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

class GuardParser {
 public:
  GuardParser(std::string_view text, const std::vector<std::string>& atoms) : text_(text), atoms_(atoms) {}

  Guard parse() {
    Guard g = parse_or();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "'and', 'or' or end of guard", "'" + std::string(text_.substr(pos_, 1)) + "'");
    return g;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string peek_word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    return std::string(text_.substr(pos_, end - pos_));
  }

  Guard parse_or() {
    Guard g = parse_and();
    while (peek_word() == "or") {
      pos_ += 2;
      g = Guard::disjunction(std::move(g), parse_and());
    }
    return g;
  }

  Guard parse_and() {
    Guard g = parse_unary();
    while (peek_word() == "and") {
      pos_ += 3;
      g = Guard::conjunction(std::move(g), parse_unary());
    }
    return g;
  }

  Guard parse_unary() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      Guard g = parse_or();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') throw SyntaxError(pos_, "')'", found());
      ++pos_;
      return g;
    }
    if (pos_ < text_.size() && text_[pos_] == '!') {
      ++pos_;
      return Guard::negation(parse_unary());
    }
    std::string word = peek_word();
    if (word.empty()) throw SyntaxError(pos_, "an atom name", found());
    pos_ += word.size();
    if (word == "not") return Guard::negation(parse_unary());
    if (word == "true") return Guard::always_true();
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i] == word) return Guard::atom(i, word);
    throw UnknownAtom(word);
  }

  std::string found() const {
    return pos_ >= text_.size() ? std::string("end of guard") : "'" + std::string(text_.substr(pos_, 1)) + "'";
  }

  std::string_view text_;
  const std::vector<std::string>& atoms_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `atom | not g | !g | g and g | g or g | (g) | true` against declared atom names.
inline Guard parse_guard(std::string_view text, const std::vector<std::string>& atom_names) {
  return detail::GuardParser(text, atom_names).parse();
}

}  // namespace rmstl::rm
