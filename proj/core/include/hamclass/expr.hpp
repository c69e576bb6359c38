#pragma once

// Exact symbolic expressions over jet variables.
//
// An Expr is a finite sum of terms c * s1^e1 * ... * sk^ek where c is an exact
// rational and the si are interned symbols with rational exponents.  Symbols are
// either atoms (x, jet variables u_n, named parameters, formal function
// applications) or composite kernels:
//
//   * NumRoot(p): p^r for a prime p, 0 < r < 1.
//   * Base(b):    b^e for a primitive multi-term polynomial b.  Positive integer
//                 parts of e are always expanded, so e is either in (0, 1)
//                 (a radical) or negative (a denominator).  Numerators sitting
//                 over a negative power of b are reduced modulo b whenever b has
//                 a monomial leading coefficient in its main variable, which
//                 gives a partial-fraction normal form with respect to b.
//
// All radicands are formally positive: (b^p)^q = b^(pq) unconditionally and odd
// roots of negative numbers are real.
//
// Exprs are immutable values; copies share storage.

#include <gmpxx.h>

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hamclass/error.hpp"
#include "hamclass/ratio.hpp"

namespace hamclass {

using Scalar = mpq_class;
using SymId = std::uint32_t;

inline constexpr int kNoJet = -1;

enum class SymKind : std::uint8_t { NumRoot, X, Jet, Param, Func, Base };

struct Factor {
  SymId sym;
  Ratio exp;
  friend bool operator==(const Factor& a, const Factor& b) { return a.sym == b.sym && a.exp == b.exp; }
};

/// Factors sorted by symbol id, no zero exponents, no repeated symbols.
using Monomial = boost::container::small_vector<Factor, 4>;

struct Term {
  Monomial mono;
  Scalar coef;
};

/// Id-based strict weak order on monomials (fast; not stable across runs).
bool mono_less(const Monomial& a, const Monomial& b);
std::size_t mono_hash(const Monomial& m);

class Expr {
 public:
  Expr();
  Expr(int v);                 // NOLINT(google-explicit-constructor)
  Expr(long v);                // NOLINT(google-explicit-constructor)
  Expr(const Scalar& v);       // NOLINT(google-explicit-constructor)
  static Expr symbol(SymId s, Ratio exp = 1);
  /// Builds an Expr from arbitrary terms, canonicalising them.
  static Expr from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return *terms_; }
  std::size_t size() const { return terms_->size(); }
  bool is_zero() const { return terms_->empty(); }
  bool is_constant() const;
  std::optional<Scalar> constant_value() const;
  /// True when the expression is a single term.
  bool is_monomial() const { return terms_->size() == 1; }

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator/=(const Expr& o);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  /// Structural equality of normal forms.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  std::size_t hash() const;
  /// Canonical in-process key (used for interning).
  std::string key() const;

 private:
  explicit Expr(std::shared_ptr<const std::vector<Term>> t) : terms_(std::move(t)) {}
  std::shared_ptr<const std::vector<Term>> terms_;
  friend class TermBuilder;
};

/// Accumulates terms and restores every normal-form invariant on finish().
class TermBuilder {
 public:
  void add(Monomial m, Scalar c);
  /// Adds c * m * e.
  void add_product(const Monomial& m, const Scalar& c, const Expr& e);
  void add(const Expr& e);
  Expr finish();

 private:
  void settle(Monomial m, Scalar c);
  std::vector<Term> pending_;
  std::vector<Term> out_;
};

/// Metadata of an interned symbol.  Immutable once created.
struct SymbolInfo {
  SymKind kind = SymKind::X;
  int order = kNoJet;          // Jet: n; composite: max jet order inside
  std::string name;            // Param / Func
  int deriv = 0;               // Func derivative order
  std::shared_ptr<const Expr> arg;   // Func argument
  std::shared_ptr<const Expr> poly;  // Base polynomial
  mpz_class prime;             // NumRoot
  bool depends_x = false;
  bool has_func = false;       // a formal function occurs (itself or inside)
  bool nested = false;         // a formal function occurs inside a function argument
  std::vector<SymId> atoms;    // sorted ids of atoms strictly inside (argument / polynomial)

  // Reduction rule lc_coef * lc_mono * main^main_deg = poly - tail  (Base only).
  bool has_rule = false;
  SymId main_var = 0;
  int main_deg = 0;
  Monomial lc_mono;
  // lc_mono is a unit (atoms and functions only): reduce by main degree alone.
  bool laurent_lc = false;
  Scalar lc_coef;
  std::shared_ptr<const Expr> tail;

  // poly = root_sign * root^root_k for a primitive root polynomial (Base only).
  int root_k = 1;
  int root_sign = 1;
  SymId root_base = 0;
};

const SymbolInfo& symbol_info(SymId id);
bool is_atom(SymId id);

// --- construction -----------------------------------------------------------

void set_jet_order_bound(int bound);
int jet_order_bound();

SymId x_id();
SymId jet_id(int n);
SymId param_id(std::string_view name);
/// Formal function (or builtin exp / tanh) applied to `arg`, differentiated `deriv` times.
SymId func_id(std::string_view name, const Expr& arg, int deriv = 0);

Expr var_x();
Expr jet(int n);
Expr param(std::string_view name);
Expr func(std::string_view name, const Expr& arg, int deriv = 0);
Expr rational(long num, long den = 1);

bool is_reserved_name(std::string_view name);
bool is_builtin_function(std::string_view name);

// --- algebra ---------------------------------------------------------------

Expr pow(const Expr& base, Ratio exponent);
Expr sqrt(const Expr& e);
Expr inverse(const Expr& e);
Expr normalize(const Expr& e);

/// Largest jet order n such that some u_n (possibly inside a kernel) occurs; kNoJet if none.
int jet_order(const Expr& e);
bool depends_on(const Expr& e, SymId atom);
bool depends_on_x(const Expr& e);
/// All atoms (x, jets, parameters, function applications) reachable from e.
std::set<SymId> atoms_of(const Expr& e);
/// All symbols appearing directly in e.
std::set<SymId> symbols_of(const Expr& e);
/// Number of terms including those inside kernels (a size measure for budgets).
std::size_t node_count(const Expr& e);

/// Decomposes e as sum over k of coeff[k] * atom^k.  Fails (nullopt) if some
/// kernel other than the atom itself depends on the atom.
std::optional<std::map<Ratio, Expr>> coefficients_in(const Expr& e, SymId atom);

// --- calculus ----------------------------------------------------------------

/// Derivative of a single symbol; returning nullopt means zero.
using SymbolDerivative = std::function<Expr(SymId)>;

/// Applies the derivation defined on symbols by `dsym` (Leibniz + chain rule).
Expr derive(const Expr& e, const SymbolDerivative& dsym);
Expr diff(const Expr& e, SymId atom);
Expr diff(const Expr& e, const Expr& atom);

/// Simultaneous substitution of atoms (or function-application kernels).
struct SubstitutionReport {
  bool jet_inconsistent = false;   // some u_n bound without u_{n-1} / u_{n+1} pattern
  std::vector<std::string> warnings;
};
Expr substitute(const Expr& e, const std::map<SymId, Expr>& bindings, SubstitutionReport* report = nullptr);

// --- equivalence ---------------------------------------------------------------

enum class Equivalence { Equal, Different, Unknown };
const char* to_string(Equivalence e);

struct EquivalenceOptions {
  int attempts = 12;
  std::uint64_t seed = 0x5eed;
};

struct EquivalenceResult {
  Equivalence verdict = Equivalence::Unknown;
  std::string diagnostic;
};

/// True iff e is zero after clearing every denominator (exact, radicals assumed independent).
bool is_zero_cleared(const Expr& e);
EquivalenceResult equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opts = {});
inline bool equal(const Expr& a, const Expr& b) { return equivalent(a, b).verdict == Equivalence::Equal; }

/// Exact evaluation with values for atoms.  Function kernels not in `values`
/// make the result nullopt; radicals must evaluate to perfect powers.
std::optional<Scalar> evaluate(const Expr& e, const std::map<SymId, Scalar>& values);

}  // namespace hamclass

template <>
struct std::hash<hamclass::Expr> {
  std::size_t operator()(const hamclass::Expr& e) const { return e.hash(); }
};
