#include <algorithm>
#include <unordered_map>

#include "hamclass/expr.hpp"
#include "internal.hpp"

namespace hamclass {
namespace {

class Derivation {
 public:
  Derivation(const SymbolDerivative& atom_rule, SymId func_atom, bool has_func_atom)
      : atom_rule_(atom_rule), func_atom_(func_atom), has_func_atom_(has_func_atom) {}

  Expr apply(const Expr& e) {
    TermBuilder out;
    for (const Term& t : e.terms()) {
      for (std::size_t i = 0; i < t.mono.size(); ++i) {
        const Factor& f = t.mono[i];
        const Expr& d = of_symbol(f.sym);
        if (d.is_zero()) continue;
        Monomial m = t.mono;
        m[i].exp -= Ratio(1);
        if (m[i].exp.is_zero()) m.erase(m.begin() + static_cast<std::ptrdiff_t>(i));
        out.add_product(m, t.coef * Scalar(f.exp.num(), f.exp.den()), d);
      }
    }
    return out.finish();
  }

 private:
  const Expr& of_symbol(SymId s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    Expr d = compute(s);
    return cache_.emplace(s, std::move(d)).first->second;
  }

  Expr compute(SymId s) {
    const SymbolInfo& info = symbol_info(s);
    switch (info.kind) {
      case SymKind::NumRoot: return Expr();
      case SymKind::X:
      case SymKind::Jet:
      case SymKind::Param: return atom_rule_(s);
      case SymKind::Base: return apply(*info.poly);
      case SymKind::Func: {
        if (has_func_atom_) return s == func_atom_ ? Expr(1) : Expr();
        const Expr inner = apply(*info.arg);
        if (inner.is_zero()) return Expr();
        if (info.name == "exp") return Expr::symbol(s) * inner;
        if (info.name == "tanh") return (Expr(1) - Expr::symbol(s, 2)) * inner;
        return func(info.name, *info.arg, info.deriv + 1) * inner;
      }
    }
    return Expr();
  }

  const SymbolDerivative& atom_rule_;
  SymId func_atom_;
  bool has_func_atom_;
  std::unordered_map<SymId, Expr> cache_;
};

}  // namespace

Expr derive(const Expr& e, const SymbolDerivative& dsym) {
  Derivation d(dsym, 0, false);
  return d.apply(e);
}

Expr diff(const Expr& e, SymId atom) {
  const SymbolInfo& info = symbol_info(atom);
  if (!is_atom(atom)) throw PreconditionError("diff: differentiation variable is not an atom");
  const SymbolDerivative rule = [atom](SymId s) { return s == atom ? Expr(1) : Expr(); };
  if (info.kind == SymKind::Func) {
    Derivation d(rule, atom, true);
    return d.apply(e);
  }
  Derivation d(rule, 0, false);
  return d.apply(e);
}

Expr diff(const Expr& e, const Expr& atom) {
  if (!atom.is_monomial() || atom.terms().front().coef != 1 || atom.terms().front().mono.size() != 1 ||
      atom.terms().front().mono.front().exp != Ratio(1))
    throw PreconditionError("diff: differentiation variable is not an atom");
  return diff(e, atom.terms().front().mono.front().sym);
}

// --- substitution --------------------------------------------------------------

namespace {

class Substituter {
 public:
  explicit Substituter(const std::map<SymId, Expr>& bindings) : bindings_(bindings) {
    for (const auto& [s, v] : bindings) bound_atoms_.push_back(s);
  }

  Expr apply(const Expr& e) {
    TermBuilder out;
    for (const Term& t : e.terms()) {
      Monomial kept;
      std::vector<const Factor*> changed;
      for (const Factor& f : t.mono) {
        if (touched(f.sym)) {
          changed.push_back(&f);
        } else {
          kept.push_back(f);
        }
      }
      if (changed.empty()) {
        out.add(std::move(kept), t.coef);
        continue;
      }
      Expr value = power_of(*changed.front());
      for (std::size_t i = 1; i < changed.size() && !value.is_zero(); ++i) value = value * power_of(*changed[i]);
      out.add_product(kept, t.coef, value);
    }
    return out.finish();
  }

 private:
  bool touched(SymId s) {
    if (bindings_.count(s) != 0) return true;
    const auto& atoms = symbol_info(s).atoms;
    for (SymId a : bound_atoms_)
      if (std::binary_search(atoms.begin(), atoms.end(), a)) return true;
    return false;
  }

  const Expr& value_of(SymId s) {
    auto it = values_.find(s);
    if (it != values_.end()) return it->second;
    Expr v;
    auto b = bindings_.find(s);
    const SymbolInfo& info = symbol_info(s);
    if (b != bindings_.end()) {
      v = b->second;
    } else if (info.kind == SymKind::Base) {
      v = apply(*info.poly);
    } else if (info.kind == SymKind::Func) {
      v = func(info.name, apply(*info.arg), info.deriv);
    } else {
      v = Expr::symbol(s);
    }
    return values_.emplace(s, std::move(v)).first->second;
  }

  Expr power_of(const Factor& f) {
    const Expr& base = value_of(f.sym);
    if (f.exp == Ratio(1)) return base;
    auto key = std::make_pair(f.sym, std::make_pair(f.exp.num(), f.exp.den()));
    auto it = powers_.find(key);
    if (it != powers_.end()) return it->second;
    Expr p = pow(base, f.exp);
    powers_.emplace(key, p);
    return p;
  }

  const std::map<SymId, Expr>& bindings_;
  std::vector<SymId> bound_atoms_;
  std::unordered_map<SymId, Expr> values_;
  std::map<std::pair<SymId, std::pair<std::int64_t, std::int64_t>>, Expr> powers_;
};

}  // namespace

Expr substitute(const Expr& e, const std::map<SymId, Expr>& bindings, SubstitutionReport* report) {
  if (bindings.empty()) return e;
  if (report != nullptr) {
    bool binds_jet = false;
    for (const auto& [s, v] : bindings) binds_jet = binds_jet || symbol_info(s).kind == SymKind::Jet;
    if (binds_jet) {
      for (SymId a : atoms_of(e)) {
        if (symbol_info(a).kind == SymKind::Jet && bindings.count(a) == 0) {
          report->jet_inconsistent = true;
          report->warnings.push_back("jet variable u" + std::to_string(symbol_info(a).order) +
                                     " left unbound while other jet variables are substituted");
        }
      }
    }
  }
  Substituter sub(bindings);
  return sub.apply(e);
}

}  // namespace hamclass
