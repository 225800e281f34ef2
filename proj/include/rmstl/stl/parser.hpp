#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rmstl/error.hpp"
#include "rmstl/stl/formula.hpp"
#include "rmstl/stl/signal.hpp"

namespace rmstl::stl {

/// Previously defined formulas that may be referenced by name inside formula text.
using FormulaDefinitions = std::map<std::string, Formula, std::less<>>;

namespace detail {

enum class Tok { Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Plus, Minus, Star, Cmp, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      out.push_back({Tok::Ident, std::string(src.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      out.push_back({Tok::Number, std::string(src.substr(start, i - start)), start});
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "<=" || two == ">=" || two == "==" || two == "!=") {
      out.push_back({Tok::Cmp, std::string(two), start});
      i += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ',': k = Tok::Comma; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '<':
      case '>': k = Tok::Cmp; break;
      default: throw SyntaxError(start, "a token", std::string("'") + c + "'");
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

inline std::string describe(const Token& t) {
  return t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'";
}

inline bool is_keyword(const std::string& s) {
  return s == "not" || s == "and" || s == "or" || s == "true" || s == "abs" || s == "ev_" || s == "alw_" ||
         s == "until_";
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const VariableTable& vars, const FormulaDefinitions* defs)
      : toks_(tokenize(text)), vars_(vars), defs_(defs) {}

  Formula parse() {
    Formula f = parse_until();
    if (peek().kind != Tok::End) throw SyntaxError(peek().pos, "'and', 'or', 'until_' or end of input", describe(peek()));
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_ident(std::string_view word) const { return peek().kind == Tok::Ident && peek().text == word; }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) throw SyntaxError(peek().pos, what, describe(peek()));
    next();
  }

  Formula parse_until() {
    Formula lhs = parse_or();
    if (at_ident("until_")) {
      next();
      StepInterval i = parse_interval();
      Formula rhs = parse_until();
      return Formula::until(std::move(lhs), i, std::move(rhs));
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (at_ident("or")) {
      next();
      lhs = Formula::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (at_ident("and")) {
      next();
      lhs = Formula::conjunction(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "not") {
        next();
        return Formula::negation(parse_unary());
      }
      if (t.text == "ev_" || t.text == "alw_") {
        bool ev = t.text == "ev_";
        next();
        StepInterval i = parse_interval();
        Formula body = parse_unary();
        return ev ? Formula::eventually(i, std::move(body)) : Formula::always(i, std::move(body));
      }
      if (t.text == "true") {
        next();
        return Formula::truth();
      }
      if (defs_ && !vars_.find(t.text)) {
        auto it = defs_->find(t.text);
        auto follow = peek(1).kind;
        if (it != defs_->end() && follow != Tok::Cmp && follow != Tok::Plus && follow != Tok::Minus &&
            follow != Tok::Star) {
          next();
          return it->second;
        }
      }
    }
    if (t.kind == Tok::LParen) {
      // A parenthesis opens either an arithmetic operand or a sub-formula.
      std::size_t saved = pos_;
      try {
        return parse_predicate();
      } catch (const Error&) {
        pos_ = saved;
      }
      next();
      Formula inner = parse_until();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::End) throw SyntaxError(t.pos, "a formula", describe(t));
    return parse_predicate();
  }

  Formula parse_predicate() {
    ArithExpr lhs = parse_sum();
    if (peek().kind != Tok::Cmp) throw SyntaxError(peek().pos, "a comparison operator", describe(peek()));
    std::string op = next().text;
    ArithExpr rhs = parse_sum();
    Comparison cmp = op == "<"    ? Comparison::Less
                     : op == "<=" ? Comparison::LessEq
                     : op == ">"  ? Comparison::Greater
                     : op == ">=" ? Comparison::GreaterEq
                     : op == "==" ? Comparison::Equal
                                  : Comparison::NotEqual;
    bool rhs_zero = rhs.kind() == ArithExpr::Kind::Constant && rhs.value() == 0.0;
    return Formula::predicate(rhs_zero ? std::move(lhs) : ArithExpr::sub(std::move(lhs), std::move(rhs)), cmp);
  }

  ArithExpr parse_sum() {
    ArithExpr lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool plus = next().kind == Tok::Plus;
      ArithExpr rhs = parse_term();
      lhs = plus ? ArithExpr::add(std::move(lhs), std::move(rhs)) : ArithExpr::sub(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ArithExpr parse_term() {
    ArithExpr lhs = parse_factor();
    while (peek().kind == Tok::Star) {
      next();
      lhs = ArithExpr::mul(std::move(lhs), parse_factor());
    }
    return lhs;
  }

  ArithExpr parse_factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Minus:
        next();
        if (peek().kind == Tok::Number) return ArithExpr::constant(-parse_number(next()));
        return ArithExpr::negate(parse_factor());
      case Tok::Number: return ArithExpr::constant(parse_number(next()));
      case Tok::LParen: {
        next();
        ArithExpr e = parse_sum();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "abs") {
          next();
          expect(Tok::LParen, "'(' after abs");
          ArithExpr e = parse_sum();
          expect(Tok::RParen, "')'");
          return ArithExpr::abs(std::move(e));
        }
        if (is_keyword(t.text)) throw SyntaxError(t.pos, "an arithmetic operand", describe(t));
        auto idx = vars_.find(t.text);
        if (!idx) throw UnknownVariable(t.text);
        next();
        return ArithExpr::variable(*idx, t.text);
      }
      default: throw SyntaxError(t.pos, "an arithmetic operand", describe(t));
    }
  }

  static double parse_number(const Token& t) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size()) throw SyntaxError(t.pos, "a number", describe(t));
    return v;
  }

  std::int64_t parse_step(const Token& t) {
    if (t.kind != Tok::Number) throw SyntaxError(t.pos, "an integer step bound", describe(t));
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
      throw SyntaxError(t.pos, "an integer step bound", describe(t));
    return v;
  }

  StepInterval parse_interval() {
    expect(Tok::LBracket, "'[' after temporal operator");
    std::int64_t lo = parse_step(next());
    expect(Tok::Comma, "','");
    std::int64_t hi = parse_step(next());
    expect(Tok::RBracket, "']'");
    if (lo > hi) throw EmptyInterval(lo, hi);
    return {lo, hi};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const VariableTable& vars_;
  const FormulaDefinitions* defs_;
};

}  // namespace detail

/// Parses formula text. Comparisons are normalized to `expr ~ 0`; identifiers
/// that name an entry of `defs` (and are not variables) are replaced by that formula.
inline Formula parse_formula(std::string_view text, const VariableTable& vars,
                             const FormulaDefinitions* defs = nullptr) {
  if (vars.empty()) throw Error("formula parsing requires a non-empty variable table");
  return detail::FormulaParser(text, vars, defs).parse();
}

}  // namespace rmstl::stl
