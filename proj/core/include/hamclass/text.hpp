#pragma once

// Textual input and output of expressions.
//
// Grammar (whitespace insignificant):
//   expr     := term {("+"|"-") term}
//   term     := unary {("*"|"/") unary}
//   unary    := ["-"] factor
//   factor   := base ["^" exponent]
//   exponent := ["-"] integer | "(" ["-"] integer ["/" integer] ")"
//   base     := number | ident {"'"} "(" expr ")" | ident | "(" expr ")"
//
// Reserved identifiers: x, u, u0..uN, ux, uxx, uxxx, ...  Builtin functions:
// exp, tanh.  Any other identifier applied to an argument is a formal function
// (primes give the derivative order), otherwise a parameter.

#include <ostream>
#include <string>
#include <string_view>

#include "hamclass/expr.hpp"

namespace hamclass {

Expr parse_expr(std::string_view src);

/// Plain text that parse_expr reads back to the same normal form.
std::string to_text(const Expr& e);
/// LaTeX math fragment.
std::string to_latex(const Expr& e);

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_text(e); }

}  // namespace hamclass
