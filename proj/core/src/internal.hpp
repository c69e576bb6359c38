#pragma once

// Kernel internals shared between translation units of the core library.

#include "hamclass/expr.hpp"

namespace hamclass {

/// Structural total order on symbols (stable across runs).
bool symbol_less(SymId a, SymId b);
/// Structural three-way comparison of expressions (stable across runs).
int expr_structural_compare(const Expr& a, const Expr& b);
/// Structural three-way comparison of monomials (stable across runs).
int mono_structural_compare(const Monomial& a, const Monomial& b);

Monomial mono_mul(const Monomial& a, const Monomial& b);
/// a / b; exponents may go negative.
Monomial mono_div(const Monomial& a, const Monomial& b);
Monomial mono_pow(const Monomial& a, Ratio r);
Ratio mono_exp(const Monomial& m, SymId s);

namespace detail {
SymId base_id(const Expr& primitive_poly);
SymId numroot_id(const mpz_class& prime);
/// c^r as coefficient times NumRoot factors.
Term numeric_power(const Scalar& c, Ratio r);
/// If p = q^k for a polynomial q and some k >= 2, returns (q, k) with the largest such k.
std::optional<std::pair<Expr, int>> perfect_power(const Expr& p);
/// Splits a multi-term polynomial as content * primitive with a normalised sign.
Scalar primitive_part(const Expr& p, Expr& primitive);
}  // namespace detail

}  // namespace hamclass
