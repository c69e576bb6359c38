// Antiderivatives with respect to a single atom.

#include "hamclass/jet.hpp"
#include "hamclass/text.hpp"
#include "internal.hpp"
#include "upoly.hpp"

namespace hamclass {
namespace {

using detail::UPoly;

[[noreturn]] void no_antiderivative(const std::string& what, SymId z) {
  throw IntegrationError("no antiderivative in the rational class with respect to " +
                         to_text(Expr::symbol(z)) + ": " + what);
}

bool involves(SymId s, SymId z) {
  if (s == z) return true;
  const auto& a = symbol_info(s).atoms;
  return std::binary_search(a.begin(), a.end(), z);
}

/// A term split into its z-dependent factors and the rest.
struct Split {
  Scalar coef;
  Monomial rest;
  Ratio zpow{0};
  std::vector<Factor> kernels;
};

Split split_term(const Term& t, SymId z) {
  Split s{t.coef, {}, Ratio(0), {}};
  for (const Factor& f : t.mono) {
    if (f.sym == z) {
      s.zpow = f.exp;
    } else if (involves(f.sym, z)) {
      s.kernels.push_back(f);
    } else {
      s.rest.push_back(f);
    }
  }
  return s;
}

Expr rest_expr(const Split& s) { return Expr::from_terms({Term{s.rest, s.coef}}); }

/// (alpha, beta) with arg = alpha*z + beta, both z-free.
std::optional<std::pair<Expr, Expr>> linear_in(const Expr& arg, SymId z) {
  auto parts = coefficients_in(arg, z);
  if (!parts) return std::nullopt;
  Expr alpha, beta;
  for (const auto& [k, c] : *parts) {
    if (k == Ratio(1)) {
      alpha = c;
    } else if (k == Ratio(0)) {
      beta = c;
    } else {
      return std::nullopt;
    }
  }
  if (alpha.is_zero()) return std::nullopt;
  return std::make_pair(alpha, beta);
}

Expr power_rule(const Expr& c, Ratio k, SymId z) {
  if (k == Ratio(-1)) no_antiderivative("logarithm of " + to_text(Expr::symbol(z)), z);
  const Ratio k1 = k + Ratio(1);
  return c * Expr::symbol(z, k1) / Expr(Scalar(k1.num(), k1.den()));
}

Expr function_kernel(const Split& s, SymId z) {
  const Factor& f = s.kernels.front();
  const SymbolInfo& info = symbol_info(f.sym);
  auto lin = linear_in(*info.arg, z);
  if (!lin) no_antiderivative("function of a nonlinear argument", z);
  const auto& [alpha, beta] = *lin;
  if (info.name == "exp") {
    if (!f.exp.is_integer() || !s.zpow.is_integer() || s.zpow.is_negative())
      no_antiderivative("exponential with a non-polynomial cofactor", z);
    // int z^k E dz with dE/dz = n*alpha*E, by parts.
    const Expr rate = Expr(f.exp.num()) * alpha;
    const Expr inv = inverse(rate);
    const std::int64_t k = s.zpow.num();
    Expr out;
    Expr factor = inv;
    for (std::int64_t i = 0; i <= k; ++i) {
      out += factor * Expr::symbol(z, Ratio(k - i));
      factor = factor * Expr(-(k - i)) * inv;
    }
    return rest_expr(s) * out * Expr::symbol(f.sym, f.exp);
  }
  no_antiderivative("function " + info.name, z);
}

/// Sums of p(z) * f^(d)(alpha*z + beta), integrated by parts from the top derivative down.
class FormalIntegrator {
 public:
  explicit FormalIntegrator(SymId z) : z_(z) {}

  static bool accepts(const Split& s) {
    if (s.kernels.size() != 1 || s.kernels.front().exp != Ratio(1)) return false;
    const SymbolInfo& info = symbol_info(s.kernels.front().sym);
    return info.kind == SymKind::Func && !is_builtin_function(info.name) && s.zpow.is_integer() &&
           !s.zpow.is_negative();
  }

  void add(const Split& s) {
    const SymbolInfo& info = symbol_info(s.kernels.front().sym);
    const SymId f = func_id(info.name, *info.arg, 0);
    groups_[f][info.deriv] += rest_expr(s) * Expr::symbol(z_, s.zpow);
  }

  Expr run() {
    Expr out;
    for (auto& [f, by_order] : groups_) {
      const SymbolInfo& info = symbol_info(f);
      auto lin = linear_in(*info.arg, z_);
      if (!lin) no_antiderivative("function of a nonlinear argument", z_);
      const Expr inv_alpha = inverse(lin->first);
      for (int d = by_order.rbegin()->first; d >= 1; --d) {
        auto it = by_order.find(d);
        if (it == by_order.end()) continue;
        auto P = UPoly::from_expr(it->second, z_);
        if (!P) no_antiderivative("non-polynomial cofactor of " + info.name, z_);
        out += it->second * func(info.name, *info.arg, d - 1) * inv_alpha;
        by_order[d - 1] -= P->derivative().to_expr(z_) * inv_alpha;
      }
      auto base = by_order.find(0);
      if (base != by_order.end() && !base->second.is_zero() && !is_zero_cleared(base->second))
        no_antiderivative("formal function " + info.name + " without a derivative", z_);
    }
    return out;
  }

 private:
  SymId z_;
  std::map<SymId, std::map<int, Expr>> groups_;
};

Scalar binomial(std::int64_t n, std::int64_t k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Scalar(r);
}

Expr ratio_expr(Ratio r) { return Expr(Scalar(r.num(), r.den())); }

/// int N*B^s dz = M*B^(s+1) with M polynomial in z, solved from the top degree down.
Expr power_ansatz(const UPoly& N, SymId base, Ratio s, SymId z) {
  const SymbolInfo& info = symbol_info(base);
  auto bp = UPoly::from_expr(*info.poly, z);
  if (!bp) no_antiderivative("base is not polynomial", z);
  const UPoly& B = *bp;
  const int d = B.degree();
  const UPoly dB = B.derivative();
  const Expr inv_lc = inverse(B.lc());
  const Ratio s1 = s + Ratio(1);
  UPoly R = N;
  std::vector<Expr> M;
  while (!R.is_zero() && R.degree() >= d - 1) {
    const int mu = R.degree() - d + 1;
    const Ratio factor = Ratio(mu) + s1 * Ratio(d);
    if (factor.is_zero()) no_antiderivative("logarithmic part over " + to_text(*info.poly), z);
    const Expr m = R.lc() * inv_lc / ratio_expr(factor);
    if (M.size() <= static_cast<std::size_t>(mu)) M.resize(static_cast<std::size_t>(mu) + 1);
    M[static_cast<std::size_t>(mu)] += m;
    std::vector<Expr> zm(static_cast<std::size_t>(mu) + 1);
    zm.back() = m;
    const UPoly Zm(std::move(zm));
    const int before = R.degree();
    R = R - (Zm.derivative() * B + (Zm * dB).scaled(ratio_expr(s1)));
    if (!R.is_zero() && R.degree() >= before) R = R.dropped_lead();
  }
  if (!R.is_zero()) no_antiderivative("logarithmic part over " + to_text(*info.poly), z);
  return UPoly(std::move(M)).to_expr(z) * Expr::symbol(base, s1);
}

class KernelIntegrator {
 public:
  explicit KernelIntegrator(SymId z) : z_(z) {}

  void add(const Term& t) { work_.push_back(t); }

  Expr run() {
    Expr out;
    while (!work_.empty()) {
      Term t = std::move(work_.back());
      work_.pop_back();
      const Split s = split_term(t, z_);
      if (s.kernels.empty()) {
        out += power_rule(rest_expr(s), s.zpow, z_);
        continue;
      }
      if (s.kernels.size() == 1 && !s.zpow.is_negative()) {
        const Factor& b = s.kernels.front();
        const Ratio frac = b.exp - Ratio(b.exp.floor());
        auto& group = groups_[{b.sym, frac}];
        group.emplace_back(b.exp, rest_expr(s) * Expr::symbol(z_, s.zpow));
        continue;
      }
      split_fractions(t, s);
    }
    for (const auto& [key, group] : groups_) {
      Ratio lo = group.front().first;
      for (const auto& g : group) lo = std::min(lo, g.first);
      const Expr poly = *symbol_info(key.first).poly;
      if (auto lin = linear_in(poly, z_)) {
        out += linear_group(group, key.first, *lin);
        continue;
      }
      Expr numerator;
      for (const auto& [e, c] : group) numerator += c * pow(poly, e - lo);
      auto N = UPoly::from_expr(numerator, z_);
      if (!N) no_antiderivative("numerator is not polynomial", z_);
      out += power_ansatz(*N, key.first, lo, z_);
    }
    return out;
  }

 private:
  /// Terms c(z)*B^e with B = alpha*z + beta: substitute z = (B - beta)/alpha term by term.
  Expr linear_group(const std::vector<std::pair<Ratio, Expr>>& group, SymId base,
                    const std::pair<Expr, Expr>& lin) const {
    const auto& [alpha, beta] = lin;
    const Expr inv_alpha = inverse(alpha);
    std::map<Ratio, Expr> by_power;
    for (const auto& [e, c] : group) {
      auto parts = coefficients_in(c, z_);
      if (!parts) no_antiderivative("cofactor is not polynomial", z_);
      for (const auto& [k, ck] : *parts) {
        if (!k.is_integer() || k.is_negative()) no_antiderivative("cofactor is not polynomial", z_);
        const std::int64_t n = k.num();
        const Expr scale = ck * pow(inv_alpha, Ratio(n));
        for (std::int64_t i = 0; i <= n; ++i)
          by_power[e + Ratio(i)] += scale * Expr(binomial(n, i)) * pow(-beta, Ratio(n - i));
      }
    }
    Expr out;
    for (const auto& [p, c] : by_power) {
      if (c.is_zero()) continue;
      if (p == Ratio(-1)) {
        if (!is_zero_cleared(c)) no_antiderivative("logarithm of " + to_text(*symbol_info(base).poly), z_);
        continue;
      }
      const Ratio p1 = p + Ratio(1);
      out += c * inv_alpha * Expr::symbol(base, p1) / ratio_expr(p1);
    }
    return out;
  }

  UPoly denominator_poly(const Factor& f) const {
    if (f.sym == z_) {
      std::vector<Expr> c(static_cast<std::size_t>(-f.exp.num()) + 1);
      c.back() = Expr(1);
      return UPoly(std::move(c));
    }
    auto p = UPoly::from_expr(pow(Expr::symbol(f.sym), -f.exp), z_);
    if (!p) no_antiderivative("denominator is not polynomial", z_);
    return *p;
  }

  /// c/(D1*D2) = c*(s*D1 + t*D2)/(D1*D2) with s*D1 + t*D2 = 1.
  void split_fractions(const Term& t, const Split& s) {
    std::vector<Factor> dens = s.kernels;
    if (s.zpow.is_negative()) dens.push_back({z_, s.zpow});
    for (const Factor& f : dens)
      if (!f.exp.is_integer() || !f.exp.is_negative())
        no_antiderivative("product of distinct kernels " + to_text(Expr::from_terms({t})), z_);
    const UPoly d1 = denominator_poly(dens[0]);
    const UPoly d2 = denominator_poly(dens[1]);
    auto st = detail::bezout(d1, d2);
    if (!st) no_antiderivative("denominators share a factor", z_);
    const Expr term = Expr::from_terms({t});
    const Expr split =
        term * (st->first.to_expr(z_) * pow(Expr::symbol(dens[0].sym), -dens[0].exp)) +
        term * (st->second.to_expr(z_) * pow(Expr::symbol(dens[1].sym), -dens[1].exp));
    for (const Term& piece : split.terms()) work_.push_back(piece);
  }

  SymId z_;
  std::vector<Term> work_;
  std::map<std::pair<SymId, Ratio>, std::vector<std::pair<Ratio, Expr>>> groups_;
};

}  // namespace

Expr integrate(const Expr& f, SymId z) {
  Expr out;
  KernelIntegrator kernels(z);
  FormalIntegrator formal(z);
  for (const Term& t : f.terms()) {
    const Split s = split_term(t, z);
    if (s.kernels.empty() && !(s.zpow.is_negative() && s.zpow.is_integer())) {
      out += power_rule(rest_expr(s), s.zpow, z);
      continue;
    }
    if (FormalIntegrator::accepts(s)) {
      formal.add(s);
      continue;
    }
    if (s.kernels.size() == 1 && symbol_info(s.kernels.front().sym).kind == SymKind::Func) {
      out += function_kernel(s, z);
      continue;
    }
    for (const Factor& k : s.kernels)
      if (symbol_info(k.sym).kind != SymKind::Base) no_antiderivative(to_text(Expr::from_terms({t})), z);
    if (!s.zpow.is_integer()) no_antiderivative(to_text(Expr::from_terms({t})), z);
    kernels.add(t);
  }
  return out + kernels.run() + formal.run();
}

}  // namespace hamclass
