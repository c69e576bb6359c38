#include "hamclass/expr.hpp"

#include <algorithm>
#include <unordered_map>

#include "internal.hpp"

namespace hamclass {
namespace {

const std::shared_ptr<const std::vector<Term>>& empty_terms() {
  static const auto empty = std::make_shared<const std::vector<Term>>();
  return empty;
}

struct MonoHash {
  std::size_t operator()(const Monomial& m) const { return mono_hash(m); }
};
struct MonoEq {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
  }
};

bool divides(const Monomial& d, const Monomial& m) {
  auto it = m.begin();
  for (const Factor& f : d) {
    while (it != m.end() && it->sym < f.sym) ++it;
    if (it == m.end() || it->sym != f.sym || it->exp < f.exp) return false;
  }
  return true;
}

Scalar int_pow(const mpz_class& base, std::int64_t k) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(k < 0 ? -k : k));
  if (k < 0) return Scalar(mpz_class(1), r);
  return Scalar(r);
}

Expr pow_int(const Expr& e, std::int64_t k) {
  Expr result(1);
  Expr b = e;
  while (k > 0) {
    if (k & 1) result *= b;
    k >>= 1;
    if (k > 0) b = b * b;
  }
  return result;
}

}  // namespace

// --- monomials ---------------------------------------------------------------

bool mono_less(const Monomial& a, const Monomial& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].sym != b[i].sym) return a[i].sym < b[i].sym;
    if (a[i].exp != b[i].exp) return a[i].exp < b[i].exp;
  }
  return a.size() < b.size();
}

std::size_t mono_hash(const Monomial& m) {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const Factor& f : m) {
    h ^= f.sym + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(f.exp.num() * 31 + f.exp.den()) + (h << 6) + (h >> 2);
  }
  return h;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->sym < j->sym)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->sym < i->sym) {
      out.push_back(*j++);
    } else {
      const Ratio e = i->exp + j->exp;
      if (!e.is_zero()) out.push_back({i->sym, e});
      ++i;
      ++j;
    }
  }
  return out;
}

Monomial mono_div(const Monomial& a, const Monomial& b) {
  Monomial neg(b);
  for (Factor& f : neg) f.exp = -f.exp;
  return mono_mul(a, neg);
}

Monomial mono_pow(const Monomial& a, Ratio r) {
  Monomial out;
  if (r.is_zero()) return out;
  out.reserve(a.size());
  for (const Factor& f : a) out.push_back({f.sym, f.exp * r});
  return out;
}

Ratio mono_exp(const Monomial& m, SymId s) {
  for (const Factor& f : m)
    if (f.sym == s) return f.exp;
  return Ratio(0);
}

// --- TermBuilder -------------------------------------------------------------

void TermBuilder::add(Monomial m, Scalar c) {
  if (c == 0) return;
  settle(std::move(m), std::move(c));
}

void TermBuilder::add_product(const Monomial& m, const Scalar& c, const Expr& e) {
  if (c == 0) return;
  for (const Term& t : e.terms()) settle(mono_mul(m, t.mono), c * t.coef);
}

void TermBuilder::add(const Expr& e) {
  for (const Term& t : e.terms()) out_.push_back(t);
}

// Restores the per-term invariants: NumRoot exponents in (0,1), Base exponents
// in (0,1) or negative, and numerators over negative Base powers reduced.
void TermBuilder::settle(Monomial m, Scalar c) {
  pending_.push_back({std::move(m), std::move(c)});
  while (!pending_.empty()) {
    Term t = std::move(pending_.back());
    pending_.pop_back();
    if (t.coef == 0) continue;
    bool clean = true;
    for (std::size_t i = 0; i < t.mono.size(); ++i) {
      Factor& f = t.mono[i];
      const SymbolInfo& s = symbol_info(f.sym);
      if (s.kind == SymKind::NumRoot) {
        if (f.exp >= Ratio(1) || f.exp.is_negative()) {
          const std::int64_t k = f.exp.floor();
          t.coef *= int_pow(s.prime, k);
          f.exp -= Ratio(k);
          if (f.exp.is_zero()) {
            t.mono.erase(t.mono.begin() + static_cast<std::ptrdiff_t>(i));
            --i;
          }
        }
        continue;
      }
      if (s.kind != SymKind::Base) continue;
      if (f.exp >= Ratio(1)) {
        const std::int64_t k = f.exp.floor();
        Monomial rest = t.mono;
        rest[i].exp -= Ratio(k);
        if (rest[i].exp.is_zero()) rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        const Expr expanded = pow_int(*s.poly, k);
        for (const Term& p : expanded.terms()) pending_.push_back({mono_mul(rest, p.mono), t.coef * p.coef});
        clean = false;
        break;
      }
      if (f.exp.is_negative() && s.has_rule) {
        Monomial lead = s.lc_mono;
        lead = mono_mul(lead, Monomial{{s.main_var, Ratio(s.main_deg)}});
        if (s.laurent_lc) {
          auto m = std::find_if(t.mono.begin(), t.mono.end(), [&](const Factor& g) { return g.sym == s.main_var; });
          if (m == t.mono.end() || m->exp < Ratio(s.main_deg)) continue;
        } else if (!divides(lead, t.mono)) {
          continue;
        }
        Monomial rest = mono_div(t.mono, lead);
        const Scalar scale = t.coef / s.lc_coef;
        // lc * main^d = B - tail
        pending_.push_back({mono_mul(rest, Monomial{{f.sym, Ratio(1)}}), scale});
        for (const Term& p : s.tail->terms()) pending_.push_back({mono_mul(rest, p.mono), -scale * p.coef});
        clean = false;
        break;
      }
    }
    if (clean) out_.push_back(std::move(t));
  }
}

Expr TermBuilder::finish() {
  if (out_.empty()) return Expr();
  std::sort(out_.begin(), out_.end(), [](const Term& a, const Term& b) { return mono_less(a.mono, b.mono); });
  std::vector<Term> merged;
  merged.reserve(out_.size());
  for (Term& t : out_) {
    if (!merged.empty() && MonoEq{}(merged.back().mono, t.mono)) {
      merged.back().coef += t.coef;
    } else {
      if (!merged.empty() && merged.back().coef == 0) merged.pop_back();
      merged.push_back(std::move(t));
    }
  }
  if (!merged.empty() && merged.back().coef == 0) merged.pop_back();
  out_.clear();
  if (merged.empty()) return Expr();
  return Expr(std::make_shared<const std::vector<Term>>(std::move(merged)));
}

// --- Expr ----------------------------------------------------------------------

Expr::Expr() : terms_(empty_terms()) {}
Expr::Expr(int v) : Expr(Scalar(v)) {}
Expr::Expr(long v) : Expr(Scalar(v)) {}
Expr::Expr(const Scalar& v) : terms_(empty_terms()) {
  Scalar c = v;
  c.canonicalize();
  if (c != 0) terms_ = std::make_shared<const std::vector<Term>>(std::vector<Term>{Term{Monomial{}, std::move(c)}});
}

Expr Expr::symbol(SymId s, Ratio exp) {
  if (exp.is_zero()) return Expr(1);
  TermBuilder b;
  b.add(Monomial{{s, exp}}, Scalar(1));
  return b.finish();
}

Expr Expr::from_terms(std::vector<Term> terms) {
  TermBuilder b;
  for (Term& t : terms) {
    std::sort(t.mono.begin(), t.mono.end(), [](const Factor& a, const Factor& c) { return a.sym < c.sym; });
    Monomial merged;
    for (const Factor& f : t.mono) {
      if (!merged.empty() && merged.back().sym == f.sym) {
        merged.back().exp += f.exp;
      } else {
        merged.push_back(f);
      }
    }
    Monomial clean;
    for (const Factor& f : merged)
      if (!f.exp.is_zero()) clean.push_back(f);
    b.add(std::move(clean), std::move(t.coef));
  }
  return b.finish();
}

bool Expr::is_constant() const {
  return terms_->empty() || (terms_->size() == 1 && terms_->front().mono.empty());
}

std::optional<Scalar> Expr::constant_value() const {
  if (terms_->empty()) return Scalar(0);
  if (terms_->size() == 1 && terms_->front().mono.empty()) return terms_->front().coef;
  return std::nullopt;
}

Expr Expr::operator-() const {
  auto out = std::make_shared<std::vector<Term>>(*terms_);
  for (Term& t : *out) t.coef = -t.coef;
  return Expr(std::shared_ptr<const std::vector<Term>>(std::move(out)));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto i = a.terms().begin();
  auto j = b.terms().begin();
  while (i != a.terms().end() || j != b.terms().end()) {
    if (j == b.terms().end() || (i != a.terms().end() && mono_less(i->mono, j->mono))) {
      out.push_back(*i++);
    } else if (i == a.terms().end() || mono_less(j->mono, i->mono)) {
      out.push_back(*j++);
    } else {
      Scalar c = i->coef + j->coef;
      if (c != 0) out.push_back({i->mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  if (out.empty()) return Expr();
  return Expr(std::make_shared<const std::vector<Term>>(std::move(out)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (auto c = a.constant_value(); c && *c == 1) return b;
  if (auto c = b.constant_value(); c && *c == 1) return a;
  const Expr& small = a.size() <= b.size() ? a : b;
  const Expr& large = a.size() <= b.size() ? b : a;
  TermBuilder builder;
  for (const Term& t : small.terms()) builder.add_product(t.mono, t.coef, large);
  return builder.finish();
}

Expr operator/(const Expr& a, const Expr& b) { return a * inverse(b); }

Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }
Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }
Expr& Expr::operator/=(const Expr& o) { return *this = *this / o; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.terms_ == b.terms_) return true;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Term& x = a.terms()[i];
    const Term& y = b.terms()[i];
    if (x.coef != y.coef || !MonoEq{}(x.mono, y.mono)) return false;
  }
  return true;
}

std::size_t Expr::hash() const {
  std::size_t h = terms_->size();
  for (const Term& t : *terms_) {
    h ^= mono_hash(t.mono) + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= std::hash<std::string>{}(t.coef.get_str()) + (h << 6) + (h >> 2);
  }
  return h;
}

std::string Expr::key() const {
  std::string k;
  for (const Term& t : *terms_) {
    k += t.coef.get_str();
    k += '[';
    for (const Factor& f : t.mono) {
      k += std::to_string(f.sym);
      k += '^';
      k += f.exp.str();
      k += ',';
    }
    k += ']';
  }
  return k;
}

// --- structural order ----------------------------------------------------------

namespace {

/// Factors of a monomial sorted by structural symbol order, descending.
std::vector<Factor> structural_factors(const Monomial& m) {
  std::vector<Factor> f(m.begin(), m.end());
  std::sort(f.begin(), f.end(), [](const Factor& a, const Factor& b) { return symbol_less(b.sym, a.sym); });
  return f;
}

}  // namespace

int mono_structural_compare(const Monomial& a, const Monomial& b) {
  const auto fa = structural_factors(a);
  const auto fb = structural_factors(b);
  const std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i].sym != fb[i].sym) return symbol_less(fa[i].sym, fb[i].sym) ? -1 : 1;
    if (fa[i].exp != fb[i].exp) return fa[i].exp < fb[i].exp ? -1 : 1;
  }
  if (fa.size() != fb.size()) return fa.size() < fb.size() ? -1 : 1;
  return 0;
}

int expr_structural_compare(const Expr& a, const Expr& b) {
  auto sorted = [](const Expr& e) {
    std::vector<const Term*> v;
    for (const Term& t : e.terms()) v.push_back(&t);
    std::sort(v.begin(), v.end(),
              [](const Term* x, const Term* y) { return mono_structural_compare(x->mono, y->mono) > 0; });
    return v;
  };
  const auto ta = sorted(a);
  const auto tb = sorted(b);
  const std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = mono_structural_compare(ta[i]->mono, tb[i]->mono); c != 0) return c;
    if (ta[i]->coef != tb[i]->coef) return ta[i]->coef < tb[i]->coef ? -1 : 1;
  }
  if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
  return 0;
}

// --- construction helpers ----------------------------------------------------

Expr var_x() { return Expr::symbol(x_id()); }
Expr jet(int n) { return Expr::symbol(jet_id(n)); }
Expr param(std::string_view name) { return Expr::symbol(param_id(name)); }
Expr rational(long num, long den) { return Expr(Scalar(num, den)); }

Expr func(std::string_view name, const Expr& arg, int deriv) {
  if (name == "exp" && arg.is_monomial() && !arg.terms().front().mono.empty()) {
    // exp(c*m) = exp(m)^c keeps exponentials of one monomial in a single kernel.
    const Term& t = arg.terms().front();
    if (t.coef != 1 && t.coef.get_den() == 1 && abs(t.coef.get_num()) < 1000) {
      const Expr inner = Expr::from_terms({Term{t.mono, Scalar(1)}});
      return pow(Expr::symbol(func_id(name, inner)), Ratio(t.coef.get_num().get_si()));
    }
  }
  if (name == "exp" && arg.is_zero()) return Expr(1);
  if (name == "tanh" && arg.is_zero()) return Expr();
  return Expr::symbol(func_id(name, arg, deriv));
}

// --- numeric powers --------------------------------------------------------------

namespace detail {

namespace {

std::vector<std::pair<mpz_class, long>> factorize(mpz_class n) {
  std::vector<std::pair<mpz_class, long>> out;
  for (unsigned long p = 2; p <= 100000 && n > 1; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p) == 0) continue;
    long k = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++k;
    }
    out.emplace_back(mpz_class(p), k);
  }
  if (n > 1) out.emplace_back(n, 1);  // treated as prime
  return out;
}

}  // namespace

Term numeric_power(const Scalar& c, Ratio r) {
  if (c == 0) {
    if (r.is_negative()) throw DomainError("zero raised to a negative power");
    return Term{{}, Scalar(0)};
  }
  Scalar coef(1);
  Scalar mag = abs(c);
  if (c < 0) {
    if (r.den() % 2 == 0) throw DomainError("even root of a negative number");
    if (r.num() % 2 != 0) coef = -1;
  }
  Monomial radicals;
  auto absorb = [&](const mpz_class& n, int sign) {
    for (const auto& [p, k] : factorize(n)) {
      const Ratio e = Ratio(k * sign) * r;
      const std::int64_t whole = e.floor();
      coef *= int_pow(p, whole);
      const Ratio frac = e - Ratio(whole);
      if (!frac.is_zero()) radicals = mono_mul(radicals, Monomial{{numroot_id(p), frac}});
    }
  };
  absorb(mag.get_num(), 1);
  absorb(mag.get_den(), -1);
  return Term{std::move(radicals), std::move(coef)};
}

}  // namespace detail

// --- powers --------------------------------------------------------------------------

namespace {

Expr term_power(const Term& t, Ratio r) {
  if (t.coef < 0 && r.den() % 2 == 0 && !t.mono.empty()) {
    // Formally positive radicand -c*m: keep the sign inside a single-term base.
    Monomial top;
    Monomial bottom;
    for (const Factor& f : t.mono) {
      if (f.exp.is_negative()) {
        bottom.push_back({f.sym, -f.exp});
      } else {
        top.push_back(f);
      }
    }
    const bool upper = !top.empty();
    const SymId b = detail::base_id(Expr::from_terms({Term{upper ? top : bottom, Scalar(-1)}}));
    Term num = detail::numeric_power(-t.coef, r);
    Monomial m = mono_mul(num.mono, Monomial{{b, upper ? r : -r}});
    if (upper) m = mono_mul(m, mono_pow(bottom, -r));
    TermBuilder out;
    out.add(std::move(m), num.coef);
    return out.finish();
  }
  Term num = detail::numeric_power(t.coef, r);
  TermBuilder b;
  b.add(mono_mul(num.mono, mono_pow(t.mono, r)), num.coef);
  return b.finish();
}

/// Leading term under the in-process id order; used only for sign normalisation.
const Term& leading_term(const Expr& e) { return e.terms().back(); }

}  // namespace

Expr pow(const Expr& base, Ratio r) {
  if (r.is_zero()) return Expr(1);
  if (base.is_zero()) {
    if (r.is_negative()) throw DomainError("zero raised to a negative power");
    return Expr();
  }
  if (base.is_monomial()) return term_power(base.terms().front(), r);
  if (r.is_integer() && r.num() > 0) return pow_int(base, r.num());

  // Clear denominators: base = N / D with N free of negative exponents.
  std::map<SymId, Ratio> clear;
  for (const Term& t : base.terms())
    for (const Factor& f : t.mono)
      if (f.exp.is_negative()) {
        auto [it, inserted] = clear.emplace(f.sym, -f.exp);
        if (!inserted && it->second < -f.exp) it->second = -f.exp;
      }
  Monomial denom;
  for (const auto& [s, e] : clear) denom.push_back({s, e});
  Expr numer = base;
  if (!denom.empty()) {
    TermBuilder b;
    for (const Term& t : base.terms()) b.add(mono_mul(t.mono, denom), t.coef);
    numer = b.finish();
  }
  if (numer.is_monomial()) {
    const Expr top = term_power(numer.terms().front(), r);
    return top * term_power(Term{denom, Scalar(1)}, -r);
  }
  // Monomial content.
  std::map<SymId, Ratio> mins;
  bool first = true;
  for (const Term& t : numer.terms()) {
    std::map<SymId, Ratio> here;
    for (const Factor& f : t.mono) here[f.sym] = f.exp;
    if (first) {
      mins = here;
      first = false;
      continue;
    }
    for (auto it = mins.begin(); it != mins.end();) {
      auto h = here.find(it->first);
      if (h == here.end()) {
        it = mins.erase(it);
      } else {
        if (h->second < it->second) it->second = h->second;
        ++it;
      }
    }
  }
  Monomial content_mono;
  for (const auto& [s, e] : mins)
    if (!e.is_zero()) content_mono.push_back({s, e});
  std::vector<Term> stripped;
  stripped.reserve(numer.size());
  for (const Term& t : numer.terms()) stripped.push_back({mono_div(t.mono, content_mono), t.coef});
  // Numeric radical content, read off the term with the largest radical-free monomial.
  auto radical_split = [](const Monomial& m) {
    Monomial roots, rest;
    for (const Factor& f : m) (symbol_info(f.sym).kind == SymKind::NumRoot ? roots : rest).push_back(f);
    return std::pair{roots, rest};
  };
  Monomial root_content;
  Monomial best_rest;
  bool have_best = false;
  for (const Term& t : stripped) {
    auto [roots, rest] = radical_split(t.mono);
    if (!have_best || mono_less(best_rest, rest)) {
      best_rest = std::move(rest);
      root_content = std::move(roots);
      have_best = true;
    }
  }
  if (!root_content.empty()) {
    TermBuilder rb;
    const Monomial inv = mono_pow(root_content, Ratio(-1));
    for (const Term& t : stripped) rb.add(mono_mul(t.mono, inv), t.coef);
    const Expr re = rb.finish();
    stripped.assign(re.terms().begin(), re.terms().end());
  }
  Expr primitive;
  Scalar content = detail::primitive_part(Expr::from_terms(std::move(stripped)), primitive);
  if (content < 0 && r.den() % 2 == 0) {
    // Even roots keep the sign inside the radicand.
    content = -content;
    primitive = -primitive;
  }
  SymId b = detail::base_id(primitive);
  Ratio e = r;
  const SymbolInfo& info = symbol_info(b);
  if (info.root_k > 1 && (info.root_sign > 0 || (r * Ratio(info.root_k)).den() % 2 == 1)) {
    if (info.root_sign < 0) content = -content;
    e = r * Ratio(info.root_k);
    b = info.root_base;
  }

  Term scale = detail::numeric_power(content, r);
  TermBuilder out;
  Monomial m = mono_mul(scale.mono, mono_pow(content_mono, r));
  m = mono_mul(m, mono_pow(root_content, r));
  m = mono_mul(m, mono_pow(denom, -r));
  m = mono_mul(m, Monomial{{b, e}});
  out.add(std::move(m), scale.coef);
  return out.finish();
}

namespace detail {

Scalar primitive_part(const Expr& p, Expr& primitive) {
  mpz_class gnum = 0;
  mpz_class lden = 1;
  for (const Term& t : p.terms()) {
    mpz_gcd(gnum.get_mpz_t(), gnum.get_mpz_t(), t.coef.get_num_mpz_t());
    mpz_lcm(lden.get_mpz_t(), lden.get_mpz_t(), t.coef.get_den_mpz_t());
  }
  Scalar content(gnum, lden);
  content.canonicalize();
  if (leading_term(p).coef < 0) content = -content;
  std::vector<Term> prim;
  prim.reserve(p.size());
  for (const Term& t : p.terms()) prim.push_back({t.mono, t.coef / content});
  primitive = Expr::from_terms(std::move(prim));
  return content;
}

namespace {

Ratio total_degree(const Monomial& m) {
  Ratio d(0);
  for (const Factor& f : m) d += f.exp;
  return d;
}

/// Graded lexicographic order; compatible with multiplication.
bool grlex_less(const Monomial& a, const Monomial& b) {
  const Ratio da = total_degree(a);
  const Ratio db = total_degree(b);
  if (da != db) return da < db;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->sym < j->sym)) return i->exp.is_negative();
    if (i == a.end() || j->sym < i->sym) return !j->exp.is_negative();
    if (i->exp != j->exp) return i->exp < j->exp;
    ++i;
    ++j;
  }
  return false;
}

const Term& grlex_leading(const Expr& e) {
  const Term* best = &e.terms().front();
  for (const Term& t : e.terms())
    if (grlex_less(best->mono, t.mono)) best = &t;
  return *best;
}

std::optional<Scalar> scalar_root(const Scalar& c, int k) {
  if (c < 0 && k % 2 == 0) return std::nullopt;
  mpz_class n = abs(c.get_num());
  mpz_class d = c.get_den();
  mpz_class rn, rd;
  if (mpz_root(rn.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(k)) == 0) return std::nullopt;
  if (mpz_root(rd.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(k)) == 0) return std::nullopt;
  Scalar r(rn, rd);
  r.canonicalize();
  return c < 0 ? Scalar(-r) : r;
}

std::optional<Expr> try_root(const Expr& p, int k) {
  const Term& lead = grlex_leading(p);
  auto c = scalar_root(lead.coef, k);
  if (!c) return std::nullopt;
  Expr root = Expr::from_terms({Term{mono_pow(lead.mono, Ratio(1, k)), *c}});
  const Term lead_root = root.terms().front();
  // Denominator of the Newton step: k * LT(root)^(k-1).
  const Monomial step_mono = mono_pow(lead_root.mono, Ratio(k - 1));
  Scalar step_coef = k;
  for (int i = 1; i < k; ++i) step_coef *= lead_root.coef;
  for (std::size_t iter = 0; iter <= p.size() + 1; ++iter) {
    const Expr diff = p - pow_int(root, k);
    if (diff.is_zero()) return root;
    const Term& t = grlex_leading(diff);
    Monomial m = mono_div(t.mono, step_mono);
    if (!grlex_less(m, lead_root.mono)) return std::nullopt;
    for (const Factor& f : m)
      if (f.exp.is_negative()) return std::nullopt;
    root += Expr::from_terms({Term{std::move(m), t.coef / step_coef}});
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::pair<Expr, int>> perfect_power(const Expr& p) {
  if (p.size() < 2 || p.size() > 400) return std::nullopt;
  // Degree filter: each integer exponent range must be divisible by k.
  std::map<SymId, std::pair<Ratio, Ratio>> range;
  std::map<SymId, std::size_t> count;
  std::set<SymId> fractional;
  for (const Term& t : p.terms()) {
    for (const Factor& f : t.mono) {
      ++count[f.sym];
      if (!f.exp.is_integer()) fractional.insert(f.sym);
      auto [it, inserted] = range.emplace(f.sym, std::make_pair(f.exp, f.exp));
      if (!inserted) {
        it->second.first = std::min(it->second.first, f.exp);
        it->second.second = std::max(it->second.second, f.exp);
      }
    }
  }
  for (auto& [s, mm] : range)
    if (count[s] < p.size()) mm.first = Ratio(0);
  for (int k = 12; k >= 2; --k) {
    bool ok = true;
    for (const auto& [s, mm] : range) {
      if (fractional.count(s) != 0) continue;
      if (mm.first.num() % k != 0 || mm.second.num() % k != 0) ok = false;
    }
    if (!ok) continue;
    if (auto root = try_root(p, k)) return std::make_pair(*root, k);
  }
  return std::nullopt;
}

}  // namespace detail

Expr sqrt(const Expr& e) { return pow(e, Ratio(1, 2)); }
Expr inverse(const Expr& e) { return pow(e, Ratio(-1)); }

Expr normalize(const Expr& e) {
  std::vector<Term> t = e.terms();
  return Expr::from_terms(std::move(t));
}

// --- queries ---------------------------------------------------------------------

int jet_order(const Expr& e) {
  int order = kNoJet;
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono) order = std::max(order, symbol_info(f.sym).order);
  return order;
}

bool depends_on(const Expr& e, SymId atom) {
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono) {
      if (f.sym == atom) return true;
      const auto& a = symbol_info(f.sym).atoms;
      if (std::binary_search(a.begin(), a.end(), atom)) return true;
    }
  return false;
}

bool depends_on_x(const Expr& e) {
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono)
      if (symbol_info(f.sym).depends_x) return true;
  return false;
}

std::set<SymId> atoms_of(const Expr& e) {
  std::set<SymId> out;
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono) {
      if (is_atom(f.sym)) out.insert(f.sym);
      const auto& a = symbol_info(f.sym).atoms;
      out.insert(a.begin(), a.end());
    }
  return out;
}

std::set<SymId> symbols_of(const Expr& e) {
  std::set<SymId> out;
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono) out.insert(f.sym);
  return out;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = e.size();
  for (SymId s : symbols_of(e)) {
    const SymbolInfo& info = symbol_info(s);
    if (info.poly) n += info.poly->size();
    if (info.arg) n += info.arg->size();
  }
  return n;
}

std::optional<std::map<Ratio, Expr>> coefficients_in(const Expr& e, SymId atom) {
  std::map<Ratio, std::vector<Term>> parts;
  for (const Term& t : e.terms()) {
    Ratio k(0);
    Monomial rest;
    for (const Factor& f : t.mono) {
      if (f.sym == atom) {
        k = f.exp;
        continue;
      }
      const auto& a = symbol_info(f.sym).atoms;
      if (std::binary_search(a.begin(), a.end(), atom)) return std::nullopt;
      rest.push_back(f);
    }
    parts[k].push_back({std::move(rest), t.coef});
  }
  std::map<Ratio, Expr> out;
  for (auto& [k, terms] : parts) out.emplace(k, Expr::from_terms(std::move(terms)));
  return out;
}

}  // namespace hamclass
