#include "upoly.hpp"

#include "internal.hpp"

namespace hamclass::detail {
namespace {

Expr clean(const Expr& e) {
  if (e.is_zero() || is_zero_cleared(e)) return Expr();
  return e;
}

}  // namespace

std::optional<UPoly> UPoly::from_expr(const Expr& e, SymId z) {
  auto parts = coefficients_in(e, z);
  if (!parts) return std::nullopt;
  std::vector<Expr> c;
  for (const auto& [k, v] : *parts) {
    if (!k.is_integer() || k.is_negative()) return std::nullopt;
    const auto i = static_cast<std::size_t>(k.num());
    if (c.size() <= i) c.resize(i + 1);
    c[i] = v;
  }
  return UPoly(std::move(c));
}

Expr UPoly::to_expr(SymId z) const {
  Expr out;
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (!c_[i].is_zero()) out += c_[i] * Expr::symbol(z, Ratio(static_cast<std::int64_t>(i)));
  return out;
}

const Expr& UPoly::coef(int i) const {
  static const Expr zero;
  if (i < 0 || i > degree()) return zero;
  return c_[static_cast<std::size_t>(i)];
}

void UPoly::trim() {
  for (Expr& v : c_) v = clean(v);
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

UPoly UPoly::operator+(const UPoly& o) const {
  std::vector<Expr> c(std::max(c_.size(), o.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coef(static_cast<int>(i)) + o.coef(static_cast<int>(i));
  return UPoly(std::move(c));
}

UPoly UPoly::operator-(const UPoly& o) const { return *this + o.scaled(Expr(-1)); }

UPoly UPoly::operator*(const UPoly& o) const {
  if (is_zero() || o.is_zero()) return UPoly();
  std::vector<Expr> c(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
  return UPoly(std::move(c));
}

UPoly UPoly::scaled(const Expr& s) const {
  std::vector<Expr> c(c_);
  for (Expr& v : c) v = v * s;
  return UPoly(std::move(c));
}

UPoly UPoly::derivative() const {
  if (c_.size() <= 1) return UPoly();
  std::vector<Expr> c(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * Expr(static_cast<long>(i));
  return UPoly(std::move(c));
}

UPoly UPoly::dropped_lead() const {
  UPoly r = *this;
  if (!r.c_.empty()) r.c_.pop_back();
  r.trim();
  return r;
}

std::pair<UPoly, UPoly> UPoly::divmod(const UPoly& d) const {
  if (d.is_zero()) throw DomainError("polynomial division by zero");
  const Expr inv = inverse(d.lc());
  UPoly r = *this;
  std::vector<Expr> q(static_cast<std::size_t>(std::max(0, degree() - d.degree() + 1)));
  while (!r.is_zero() && r.degree() >= d.degree()) {
    const int shift = r.degree() - d.degree();
    const Expr factor = clean(r.lc() * inv);
    q[static_cast<std::size_t>(shift)] = factor;
    std::vector<Expr> sub(static_cast<std::size_t>(shift) + d.c_.size());
    for (std::size_t i = 0; i < d.c_.size(); ++i) sub[i + static_cast<std::size_t>(shift)] = d.c_[i] * factor;
    const int before = r.degree();
    r = r - UPoly(std::move(sub));
    if (!r.is_zero() && r.degree() >= before) {
      // Leading coefficient did not cancel structurally; force it.
      r.c_.pop_back();
      r.trim();
    }
  }
  return {UPoly(std::move(q)), r};
}

std::optional<std::pair<UPoly, UPoly>> bezout(const UPoly& a, const UPoly& b) {
  // Invariant: s0*a + t0*b = r0, s1*a + t1*b = r1.
  UPoly r0 = a, r1 = b;
  UPoly s0({Expr(1)}), s1;
  UPoly t0, t1({Expr(1)});
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    UPoly s2 = s0 - q * s1;
    UPoly t2 = t0 - q * t1;
    r0 = r1;
    r1 = r;
    s0 = s1;
    s1 = s2;
    t0 = t1;
    t1 = t2;
  }
  if (r0.degree() != 0) return std::nullopt;
  const Expr inv = inverse(r0.lc());
  return std::make_pair(s0.scaled(inv), t0.scaled(inv));
}

}  // namespace hamclass::detail
