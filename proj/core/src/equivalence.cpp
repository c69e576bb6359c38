#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "hamclass/expr.hpp"
#include "internal.hpp"

namespace hamclass {

const char* to_string(Equivalence e) {
  switch (e) {
    case Equivalence::Equal: return "equal";
    case Equivalence::Different: return "different";
    case Equivalence::Unknown: return "unknown";
  }
  return "unknown";
}

bool is_zero_cleared(const Expr& e) {
  if (e.is_zero()) return true;
  std::map<SymId, Ratio> clear;
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono)
      if (f.exp.is_negative()) {
        auto [it, inserted] = clear.emplace(f.sym, -f.exp);
        if (!inserted && it->second < -f.exp) it->second = -f.exp;
      }
  Monomial m;
  for (const auto& [s, r] : clear) m.push_back({s, r});
  if (m.empty()) return false;
  TermBuilder b;
  for (const Term& t : e.terms()) b.add(mono_mul(t.mono, m), t.coef);
  return b.finish().is_zero();
}

namespace {

std::optional<Scalar> exact_root(const Scalar& v, std::int64_t d) {
  if (d == 1) return v;
  if (v < 0 && d % 2 == 0) return std::nullopt;
  const bool neg = v < 0;
  mpz_class n = abs(v.get_num());
  mpz_class q = v.get_den();
  mpz_class rn, rq;
  if (mpz_root(rn.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(d)) == 0) return std::nullopt;
  if (mpz_root(rq.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(d)) == 0) return std::nullopt;
  Scalar r(rn, rq);
  r.canonicalize();
  return neg ? Scalar(-r) : r;
}

std::optional<Scalar> rational_power(const Scalar& v, Ratio r) {
  if (v == 0) {
    if (r.is_negative()) return std::nullopt;
    return Scalar(0);
  }
  auto root = exact_root(v, r.den());
  if (!root) return std::nullopt;
  const std::int64_t k = r.num() < 0 ? -r.num() : r.num();
  mpz_class pn, pd;
  mpz_pow_ui(pn.get_mpz_t(), root->get_num_mpz_t(), static_cast<unsigned long>(k));
  mpz_pow_ui(pd.get_mpz_t(), root->get_den_mpz_t(), static_cast<unsigned long>(k));
  Scalar out = r.num() < 0 ? Scalar(pd, pn) : Scalar(pn, pd);
  out.canonicalize();
  return out;
}

class Evaluator {
 public:
  explicit Evaluator(const std::map<SymId, Scalar>& values) : values_(values) {}

  std::optional<Scalar> expr(const Expr& e) {
    Scalar sum(0);
    for (const Term& t : e.terms()) {
      Scalar prod = t.coef;
      for (const Factor& f : t.mono) {
        auto v = symbol(f.sym);
        if (!v) return std::nullopt;
        auto p = rational_power(*v, f.exp);
        if (!p) return std::nullopt;
        prod *= *p;
      }
      sum += prod;
    }
    return sum;
  }

  std::optional<Scalar> symbol(SymId s) {
    if (auto it = values_.find(s); it != values_.end()) return it->second;
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
    const SymbolInfo& info = symbol_info(s);
    std::optional<Scalar> v;
    if (info.kind == SymKind::Base) v = expr(*info.poly);
    memo_.emplace(s, v);
    return v;
  }

 private:
  const std::map<SymId, Scalar>& values_;
  std::unordered_map<SymId, std::optional<Scalar>> memo_;
};

/// Denominators of the exponents each kernel carries anywhere inside e.
void collect_roots(const Expr& e, std::map<SymId, std::int64_t>& lcm, std::set<SymId>& seen) {
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono) {
      auto [it, inserted] = lcm.emplace(f.sym, f.exp.den());
      if (!inserted) it->second = std::lcm(it->second, f.exp.den());
      if (!seen.insert(f.sym).second) continue;
      const SymbolInfo& info = symbol_info(f.sym);
      if (info.poly) collect_roots(*info.poly, lcm, seen);
      if (info.arg) collect_roots(*info.arg, lcm, seen);
    }
}

class Sampler {
 public:
  Sampler(const Expr& e, std::uint64_t seed) : rng_(seed) {
    std::set<SymId> seen;
    collect_roots(e, lcm_, seen);
    for (const auto& [s, l] : lcm_) {
      const SymbolInfo& info = symbol_info(s);
      if (is_atom(s)) atoms_.push_back(s);
      if (info.kind == SymKind::NumRoot) numroots_.push_back(s);
      if (info.kind == SymKind::Base && l > 1) radicals_.push_back(s);
    }
    // Inner radicals first so outer radicands see their final values.
    std::sort(radicals_.begin(), radicals_.end(), [](SymId a, SymId b) {
      return symbol_info(a).atoms.size() < symbol_info(b).atoms.size();
    });
  }

  /// Draws a point; false if no admissible point was produced.
  bool draw(std::map<SymId, Scalar>& values, std::string& why) {
    values.clear();
    for (SymId a : atoms_) {
      const SymbolInfo& info = symbol_info(a);
      if (info.kind == SymKind::Param || (info.kind == SymKind::Func && info.name == "exp")) {
        values[a] = Scalar(uniform(1, 9), uniform(1, 4));
        values[a].canonicalize();
      } else {
        std::int64_t n = 0;
        while (n == 0) n = uniform(-9, 9);
        values[a] = Scalar(n, uniform(1, 5));
        values[a].canonicalize();
      }
      values[a].canonicalize();
      if (const std::int64_t L = lcm_[a]; L > 1) {
        // A fractional power of an atom needs an exact root.
        Scalar t(uniform(1, 5), uniform(1, 3));
        t.canonicalize();
        values[a] = power(t, L);
        if (L % 2 == 1 && info.kind != SymKind::Param && uniform(0, 1) == 0) values[a] = -values[a];
      }
    }
    for (SymId r : numroots_) {
      // Radicals of distinct primes are linearly independent; a free value of the
      // right power preserves every relation the normal form can express.
      values[r] = power(Scalar(uniform(2, 7)), lcm_[r]);
    }
    std::set<SymId> pinned_atoms;
    for (SymId b : radicals_) {
      if (!solve_radical(b, values, pinned_atoms)) {
        why = "no admissible point for radicand";
        return false;
      }
    }
    return true;
  }

 private:
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }

  static Scalar power(const Scalar& v, std::int64_t k) {
    Scalar out(1);
    for (std::int64_t i = 0; i < k; ++i) out *= v;
    return out;
  }

  bool solve_radical(SymId b, std::map<SymId, Scalar>& values, std::set<SymId>& pinned) {
    const SymbolInfo& info = symbol_info(b);
    const std::int64_t L = lcm_[b];
    {
      Evaluator ev(values);
      if (auto v = ev.expr(*info.poly); v && *v > 0 && exact_root(*v, L)) {
        pin_all(info, pinned);
        return true;
      }
    }
    // Choose the highest ranked atom the radicand is linear in.
    std::vector<SymId> candidates;
    for (SymId a : info.atoms) {
      if (pinned.count(a) != 0 || lcm_[a] > 1) continue;
      const SymbolInfo& ai = symbol_info(a);
      if (ai.kind == SymKind::Param) continue;
      candidates.push_back(a);
    }
    std::sort(candidates.begin(), candidates.end(), [](SymId x, SymId y) {
      return symbol_info(x).order > symbol_info(y).order;
    });
    for (SymId z : candidates) {
      auto coeffs = coefficients_in(*info.poly, z);
      if (!coeffs || coeffs->size() > 2) continue;
      bool linear = true;
      for (const auto& [k, c] : *coeffs) linear = linear && (k == Ratio(0) || k == Ratio(1));
      if (!linear || coeffs->count(Ratio(1)) == 0) continue;
      Evaluator ev(values);
      auto A = ev.expr(coeffs->at(Ratio(1)));
      auto R = coeffs->count(Ratio(0)) ? ev.expr(coeffs->at(Ratio(0))) : std::optional<Scalar>(Scalar(0));
      if (!A || !R || *A == 0) continue;
      for (int attempt = 0; attempt < 8; ++attempt) {
        Scalar base(uniform(1, 6), uniform(1, 3));
        base.canonicalize();
        const Scalar target = power(base, L);
        Scalar zv = (target - *R) / *A;
        zv.canonicalize();
        if (zv == 0) continue;
        values[z] = zv;
        pin_all(info, pinned);
        return true;
      }
    }
    return false;
  }

  static void pin_all(const SymbolInfo& info, std::set<SymId>& pinned) {
    pinned.insert(info.atoms.begin(), info.atoms.end());
  }

  std::mt19937_64 rng_;
  std::map<SymId, std::int64_t> lcm_;
  std::vector<SymId> atoms_;
  std::vector<SymId> numroots_;
  std::vector<SymId> radicals_;
};

}  // namespace

std::optional<Scalar> evaluate(const Expr& e, const std::map<SymId, Scalar>& values) {
  Evaluator ev(values);
  return ev.expr(e);
}

EquivalenceResult equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opts) {
  const Expr d = a - b;
  if (d.is_zero() || is_zero_cleared(d)) return {Equivalence::Equal, ""};
  Sampler sampler(d, opts.seed);
  int admissible = 0;
  std::string why;
  std::map<SymId, Scalar> values;
  for (int i = 0; i < opts.attempts; ++i) {
    if (!sampler.draw(values, why)) continue;
    auto v = evaluate(d, values);
    if (!v) {
      why = "evaluation undefined at sampled point";
      continue;
    }
    ++admissible;
    if (*v != 0) return {Equivalence::Different, "nonzero difference " + v->get_str() + " at a sampled point"};
  }
  if (admissible == 0) return {Equivalence::Unknown, "sampling failed: " + why};
  return {Equivalence::Unknown, "difference vanished at every sampled point but is not structurally zero"};
}

}  // namespace hamclass
