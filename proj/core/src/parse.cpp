#include <cctype>

#include "hamclass/text.hpp"

namespace hamclass {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip_space();
    if (pos_ >= src_.size()) fail("empty expression");
    Expr e = expr();
    skip_space();
    if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    std::size_t line_end = src_.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = src_.size();
    const std::size_t column = at - line_start + 1;
    std::string msg = "parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what + "\n  ";
    msg += std::string(src_.substr(line_start, line_end - line_start));
    msg += "\n  " + std::string(column - 1, ' ') + "^";
    throw ParseError(msg, line, column);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr expr() {
    Expr e = term();
    while (true) {
      if (accept('+')) {
        e += term();
      } else if (accept('-')) {
        e -= term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    while (true) {
      if (accept('*')) {
        e *= unary();
      } else if (peek() == '/') {
        const std::size_t at = pos_;
        ++pos_;
        const Expr d = unary();
        if (d.is_zero()) fail_at(at, "division by zero");
        e = guard(at, [&] { return e / d; });
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -factor();
    return factor();
  }

  Expr factor() {
    const Expr b = base();
    if (!accept('^')) return b;
    const std::size_t at = pos_;
    const Ratio r = exponent();
    return guard(at, [&] { return pow(b, r); });
  }

  template <typename F>
  Expr guard(std::size_t at, F&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail_at(at, e.what());
    }
  }

  std::int64_t integer() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
    if (start == pos_) fail("expected integer");
    if (pos_ - start > 17) fail_at(start, "exponent too large");
    return std::stoll(std::string(src_.substr(start, pos_ - start)));
  }

  Ratio exponent() {
    skip_space();
    if (accept('(')) {
      const bool neg = accept('-');
      std::int64_t n = integer();
      std::int64_t d = 1;
      if (accept('/')) {
        const std::size_t at = pos_;
        d = integer();
        if (d == 0) fail_at(at, "zero denominator in exponent");
      }
      if (peek() != ')') fail("exponent not rational");
      expect(')');
      return Ratio(neg ? -n : n, d);
    }
    const bool neg = accept('-');
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
    const std::int64_t n = integer();
    return Ratio(neg ? -n : n);
  }

  Expr base() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
      return Expr(Scalar(mpz_class(std::string(src_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) != 0 || src_[pos_] == '_'))
        ++pos_;
      const std::string name(src_.substr(start, pos_ - start));
      int primes = 0;
      while (pos_ < src_.size() && src_[pos_] == '\'') {
        ++primes;
        ++pos_;
      }
      if (peek() == '(') {
        if (is_reserved_name(name)) fail_at(start, "reserved name '" + name + "' used as a function");
        ++pos_;
        const Expr arg = expr();
        expect(')');
        if (primes > 0 && is_builtin_function(name)) fail_at(start, "primes are not allowed on builtin " + name);
        return guard(start, [&] { return func(name, arg, primes); });
      }
      if (primes > 0) fail("expected '(' after function name");
      if (is_builtin_function(name)) fail_at(start, "builtin function " + name + " needs an argument");
      return identifier(name, start);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr identifier(const std::string& name, std::size_t at) {
    if (name == "x") return var_x();
    if (name == "u") return jet(0);
    if (name.size() >= 2 && name[0] == 'u') {
      const std::string rest = name.substr(1);
      const bool digits = rest.find_first_not_of("0123456789") == std::string::npos;
      const bool xs = rest.find_first_not_of('x') == std::string::npos;
      if (digits || xs) {
        const std::size_t n = digits ? std::stoul(rest.size() > 9 ? std::string("999999999") : rest) : rest.size();
        if (n > static_cast<std::size_t>(jet_order_bound())) fail_at(at, "unknown alias '" + name + "'");
        return jet(static_cast<int>(n));
      }
    }
    return guard(at, [&] { return param(name); });
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src) {
  Parser p(src);
  return p.parse();
}

}  // namespace hamclass
