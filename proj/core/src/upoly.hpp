#pragma once

// Univariate polynomials in one atom with Expr coefficients.

#include <optional>
#include <vector>

#include "hamclass/expr.hpp"

namespace hamclass::detail {

class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Expr> c) : c_(std::move(c)) { trim(); }

  /// Fails if e is not a polynomial in z with z-free coefficients.
  static std::optional<UPoly> from_expr(const Expr& e, SymId z);
  Expr to_expr(SymId z) const;

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const Expr& coef(int i) const;
  const Expr& lc() const { return c_.back(); }

  UPoly operator+(const UPoly& o) const;
  UPoly operator-(const UPoly& o) const;
  UPoly operator*(const UPoly& o) const;
  UPoly scaled(const Expr& s) const;
  UPoly derivative() const;
  /// Drops the leading coefficient; used when it vanishes but not structurally.
  UPoly dropped_lead() const;

  /// Quotient and remainder.
  std::pair<UPoly, UPoly> divmod(const UPoly& d) const;

 private:
  void trim();
  std::vector<Expr> c_;
};

/// s, t with s*a + t*b = 1; nullopt when a and b share a factor.
std::optional<std::pair<UPoly, UPoly>> bezout(const UPoly& a, const UPoly& b);

}  // namespace hamclass::detail
