#pragma once

// Jet-space calculus: total derivatives, the Euler operator and inversion of D_x.

#include <optional>
#include <string>

#include "hamclass/expr.hpp"

namespace hamclass {

/// D_x e = de/dx + sum_i u_{i+1} de/du_i (formal functions of x are differentiated formally).
Expr total_x(const Expr& e);
/// D_x applied k times.
Expr total_x(const Expr& e, int k);

/// D_t rho along u_t = F: sum_i drho/du_i * D_x^i F.
Expr total_t(const Expr& rho, const Expr& F);

/// Euler operator E(H) = sum_k (-D_x)^k dH/du_k.
Expr variational_derivative(const Expr& H);

enum class ExactStatus { Exact, NotExact, Undecided };
const char* to_string(ExactStatus s);

struct ExactnessReport {
  ExactStatus status = ExactStatus::Undecided;
  bool exact = false;
  /// E(T); zero when exact.
  Expr residual;
  /// theta with D_x theta = T when exact and theta is in the rational class.
  std::optional<Expr> witness;
  std::string diagnostic;
};

ExactnessReport is_exact(const Expr& T);

/// theta with D_x theta = T, no additive constant and no pure-parameter term.
/// Throws IntegrationError when T is not exact or theta leaves the rational class.
Expr integrate_total(const Expr& T);

/// Antiderivative of f with respect to the atom z, other atoms held fixed.
/// Supports Laurent polynomials, rational functions (Hermite reduction),
/// radicals of bases linear in z, exp of linear arguments and formal
/// derivatives.  Throws IntegrationError when the result would need a
/// logarithm or leaves the class.
Expr integrate(const Expr& f, SymId z);

}  // namespace hamclass
