// Recursive-descent parser for the formula text syntax.
//
//   or      := and ('|' and)*
//   and     := until ('&' until)*
//   until   := unary ('U' bound? until)?
//   unary   := '!' unary | 'F' bound? unary | primary
//   primary := 'true' | 'false' | ident | 'D{' dist '}' ident | '(' or ')'
//   bound   := '[' int ',' (int | 'inf') ']'

#include <cctype>
#include <charconv>

#include "mitld/error.hpp"
#include "mitld/formula.hpp"

namespace mitld {

namespace {

enum class Tok { End, Ident, Int, LParen, RParen, LBracket, RBracket, Comma, Bang, Amp, Bar, DistBody };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.text = std::string(src_.substr(start, pos_ - start));
      if (t.text == "D" && pos_ < src_.size() && src_[pos_] == '{') {
        advance();
        std::size_t body = pos_;
        while (pos_ < src_.size() && src_[pos_] != '}') advance();
        if (pos_ >= src_.size()) throw ParseError("unterminated distribution", t.line, t.column);
        t.kind = Tok::DistBody;
        t.text = std::string(src_.substr(body, pos_ - body));
        advance();
        return t;
      }
      t.kind = Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.kind = Tok::Int;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    advance();
    t.text = std::string(1, c);
    switch (c) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '[': t.kind = Tok::LBracket; break;
      case ']': t.kind = Tok::RBracket; break;
      case ',': t.kind = Tok::Comma; break;
      case '!': t.kind = Tok::Bang; break;
      case '&': t.kind = Tok::Amp; break;
      case '|': t.kind = Tok::Bar; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
    }
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "true" || s == "false" || s == "F" || s == "U";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { cur_ = lexer_.next(); }

  Formula parse() {
    Formula f = parse_or();
    if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur_.line, cur_.column); }
  [[noreturn]] void fail_at(const std::string& msg, const Token& t) const {
    throw ParseError(msg, t.line, t.column);
  }

  void bump() { cur_ = lexer_.next(); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) {
      fail(std::string("expected ") + what + (cur_.kind == Tok::End ? " at end of input" : ", got '" + cur_.text + "'"));
    }
    bump();
  }

  bool at_ident(const char* word) const { return cur_.kind == Tok::Ident && cur_.text == word; }

  Formula parse_or() {
    std::vector<Formula> items{parse_and()};
    while (cur_.kind == Tok::Bar) {
      bump();
      items.push_back(parse_and());
    }
    return Formula::disjunction(std::move(items));
  }

  Formula parse_and() {
    std::vector<Formula> items{parse_until()};
    while (cur_.kind == Tok::Amp) {
      bump();
      items.push_back(parse_until());
    }
    return Formula::conjunction(std::move(items));
  }

  Formula parse_until() {
    Formula left = parse_unary();
    if (at_ident("U")) {
      bump();
      Interval i = parse_optional_bound();
      Formula right = parse_until();
      return Formula::until(std::move(left), std::move(right), i);
    }
    return left;
  }

  Formula parse_unary() {
    if (cur_.kind == Tok::Bang) {
      bump();
      return Formula::negation(parse_unary());
    }
    if (at_ident("F")) {
      bump();
      Interval i = parse_optional_bound();
      return Formula::eventually(parse_unary(), i);
    }
    return parse_primary();
  }

  Formula parse_primary() {
    switch (cur_.kind) {
      case Tok::LParen: {
        bump();
        Formula f = parse_or();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::DistBody: {
        Token dist_tok = cur_;
        std::optional<DistributionSpec> dist;
        try {
          dist = DistributionSpec::parse(dist_tok.text);
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          fail_at(e.what(), dist_tok);
        }
        bump();
        if (cur_.kind != Tok::Ident || is_keyword(cur_.text)) {
          fail("distribution eventuality needs an event name");
        }
        std::string name = cur_.text;
        bump();
        return Formula::dist_eventually(std::move(name), *dist);
      }
      case Tok::Ident: {
        if (cur_.text == "true") {
          bump();
          return Formula::truth();
        }
        if (cur_.text == "false") {
          bump();
          return Formula::falsity();
        }
        if (is_keyword(cur_.text)) fail("unexpected '" + cur_.text + "'");
        std::string name = cur_.text;
        bump();
        return Formula::atom(std::move(name));
      }
      case Tok::End:
        fail("unexpected end of input");
      default:
        fail("unexpected '" + cur_.text + "'");
    }
  }

  int parse_int() {
    if (cur_.kind != Tok::Int) fail("expected integer");
    int v = 0;
    auto [ptr, ec] = std::from_chars(cur_.text.data(), cur_.text.data() + cur_.text.size(), v);
    if (ec != std::errc()) fail("integer out of range");
    bump();
    return v;
  }

  Interval parse_optional_bound() {
    if (cur_.kind != Tok::LBracket) return Interval::unbounded();
    Token open = cur_;
    bump();
    Interval i;
    i.lo = parse_int();
    expect(Tok::Comma, "','");
    if (at_ident("inf")) {
      bump();
    } else {
      i.hi = parse_int();
    }
    expect(Tok::RBracket, "']'");
    if (i.singleton()) fail_at("singleton interval [" + std::to_string(i.lo) + "," + std::to_string(i.lo) + "]", open);
    if (i.hi && *i.hi < i.lo) fail_at("empty interval", open);
    return i;
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

}  // namespace mitld
