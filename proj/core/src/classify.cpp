#include "hamclass/classify.hpp"

#include <json.hpp>

#include "hamclass/jet.hpp"
#include "hamclass/text.hpp"

namespace hamclass {

namespace {

Expr u(int n = 0) { return jet(n); }
Expr X() { return var_x(); }
Expr F(const std::string& name, int k = 0) { return func(name, X(), k); }

bool vanishes(const Expr& e) { return e.is_zero() || is_zero_cleared(e); }

bool numeric(const Expr& e) {
  for (SymId s : symbols_of(e))
    if (symbol_info(s).kind != SymKind::NumRoot) return false;
  return true;
}

bool positive_rational(const Expr& e) {
  const auto v = e.constant_value();
  return v && *v > 0;
}

/// d/dx of an expression in x and u only.
Expr partial_x(const Expr& e) { return total_x(e) - u(1) * diff(e, jet_id(0)); }

/// Removes u-free terms and x-free multiples of u; with keep_constants only
/// the u-free terms depending on x.
Expr drop_trivial(const Expr& h, bool keep_constants) {
  std::vector<Term> keep;
  for (const Term& t : h.terms()) {
    const Expr e = Expr::from_terms({t});
    if (!depends_on(e, jet_id(0))) {
      if (keep_constants && !depends_on_x(e)) keep.push_back(t);
      continue;
    }
    const Expr rest = e / u();
    if (!keep_constants && !depends_on(rest, jet_id(0)) && !depends_on_x(rest)) continue;
    keep.push_back(t);
  }
  return Expr::from_terms(std::move(keep));
}

/// h0 + lin u1 modulo total derivatives and constant multiples of u.
Expr potential(const Expr& lin, const Expr& h0, bool keep_constants = false) {
  Expr h = h0;
  if (depends_on_x(lin)) h -= integrate(partial_x(lin), jet_id(0));
  return drop_trivial(h, keep_constants);
}

std::map<int, Expr> integer_coeffs(const Expr& e, SymId z, int lo, int hi, const char* what) {
  const auto co = coefficients_in(e, z);
  if (!co) throw PreconditionError(std::string(what) + " is not polynomial in " + to_text(Expr::symbol(z)) + ": " +
                                   to_text(e));
  std::map<int, Expr> out;
  for (const auto& [k, c] : *co) {
    if (!k.is_integer() || k.num() < lo || k.num() > hi)
      throw PreconditionError(std::string(what) + " has the term " + to_text(c * Expr::symbol(z, k)));
    out[static_cast<int>(k.num())] = c;
  }
  return out;
}

Expr at(const std::map<int, Expr>& m, int k) {
  const auto it = m.find(k);
  return it == m.end() ? Expr() : it->second;
}

/// H = quad u1^2 + lin u1 + h0.
std::map<int, Expr> u1_parts(const Expr& H, int max_deg) { return integer_coeffs(H, jet_id(1), 0, max_deg, "H"); }

Expr du(const Expr& e, int k) {
  Expr out = e;
  for (int i = 0; i < k; ++i) out = diff(out, jet_id(0));
  return out;
}

/// a h5 + 5 a' h4 + 10 a'' h3, derivatives in u.
Expr degree_residual(const Expr& a, const Expr& h) {
  return a * du(h, 5) + 5 * du(a, 1) * du(h, 4) + 10 * du(a, 2) * du(h, 3);
}

std::string relation_line(const RelationCheck& r) {
  return std::string(to_string(r.status)) + ": " + r.name + " (condition n = " + std::to_string(r.condition_n) +
         "), residual " + to_text(r.residual);
}

Expr coeff(const Ansatz& a, const std::string& name) {
  const auto it = a.coeffs.find(name);
  return it == a.coeffs.end() ? Expr() : it->second;
}

std::map<std::string, Expr> quartic_bindings(const std::map<int, Expr>& c) {
  std::map<std::string, Expr> out;
  for (int k = 0; k <= 4; ++k) out["p" + std::to_string(k)] = at(c, k);
  return out;
}

bool affine_flow(const Hamiltonian& H) {
  const Expr F = flow(H).rhs();
  for (int i = 0; i <= 3; ++i)
    if (jet_order(diff(F, jet_id(i))) != kNoJet) return false;
  return true;
}

}  // namespace

const char* to_string(SeparantTag t) {
  switch (t) {
    case SeparantTag::A: return "A";
    case SeparantTag::B: return "B";
    case SeparantTag::OutOfClass: return "out-of-class";
  }
  return "?";
}

const char* to_string(Subcase s) {
  switch (s) {
    case Subcase::A1: return "A.1";
    case Subcase::A2: return "A.2";
    case Subcase::A3: return "A.3";
    case Subcase::B: return "B";
  }
  return "?";
}

const char* to_string(RelationStatus s) {
  switch (s) {
    case RelationStatus::Holds: return "holds";
    case RelationStatus::Violated: return "violated";
    case RelationStatus::Undecided: return "undecided";
  }
  return "?";
}

SeparantClass detect_class(const Hamiltonian& H) {
  SeparantClass c;
  c.a = separant_from_H(H);
  if (!depends_on(c.a, jet_id(1))) {
    c.tag = SeparantTag::A;
    c.data = c.a;
    return c;
  }
  const Expr sq = c.a * c.a;
  std::map<int, Expr> co;
  try {
    co = integer_coeffs(sq, jet_id(1), 0, 2, "a^2");
  } catch (const PreconditionError& e) {
    c.residual = sq;
    c.diagnostic = e.what();
    return c;
  }
  const Expr a1 = at(co, 2), a2 = at(co, 1), a3 = at(co, 0);
  const Expr disc = a2 * a2 - 4 * a1 * a3;
  if (depends_on_x(disc) || jet_order(disc) != kNoJet) {
    c.residual = disc;
    c.diagnostic = "a2^2 - 4 a1 a3 is not constant";
    return c;
  }
  if (!a1.is_zero()) {
    c.residual = a1;
    c.diagnostic = "a1 = " + to_text(a1) + " is nonzero; reducing it needs a non-point-linear transformation";
    return c;
  }
  c.tag = SeparantTag::B;
  c.lead = a2;
  c.data = a3 / a2;
  return c;
}

Ansatz extract_ansatz(const Hamiltonian& H, const SeparantClass& cls) {
  Ansatz out;
  if (cls.tag == SeparantTag::OutOfClass) throw PreconditionError("separant out of class: " + cls.diagnostic);
  if (cls.tag == SeparantTag::B) {
    if (cls.lead != Expr(1)) throw PreconditionError("case B needs a = sqrt(u1 + q), lead " + to_text(cls.lead));
    const Expr q = cls.data;
    const auto parts = u1_parts(H.expr() - 4 * sqrt(u(1) + q), 1);
    const Expr h = potential(at(parts, 1), at(parts, 0));
    const auto hc = integer_coeffs(h, jet_id(0), 0, 2, "h");
    const auto qc = integer_coeffs(q, jet_id(0), 0, 4, "q");
    out.subcase = Subcase::B;
    out.coeffs = {{"h1", 2 * at(hc, 2)}, {"h2", at(hc, 1)}, {"h3", Expr()}};
    for (int i = 1; i <= 5; ++i) out.coeffs["q" + std::to_string(i)] = at(qc, 5 - i);
    return out;
  }
  const Expr& a = cls.data;
  const auto parts = u1_parts(H.expr(), 2);
  const Expr h = potential(at(parts, 1), at(parts, 0));
  if (a == Expr(1)) {
    const auto c = integer_coeffs(h, jet_id(0), 0, 4, "h");
    out.subcase = Subcase::A1;
    out.coeffs = {{"q1", 4 * at(c, 4)}, {"q2", 3 * at(c, 3)}, {"q3", 2 * at(c, 2)}, {"q4", at(c, 1)}};
    return out;
  }
  if (a == u()) {
    const auto c = integer_coeffs(h, jet_id(0), -1, 3, "h");
    out.subcase = Subcase::A2;
    out.coeffs = {{"q1", 3 * at(c, 3)}, {"q2", 2 * at(c, 2)}, {"q3", -at(c, -1)}, {"q4", at(c, 1)}};
    return out;
  }
  const auto s = coefficients_in(a, jet_id(0));
  const Expr c = a - u() * u();
  if (s && jet_order(c) == kNoJet && !depends_on_x(c)) {
    const auto g = integer_coeffs(a * h, jet_id(0), 0, 4, "a h");
    out.subcase = Subcase::A3;
    out.coeffs = {{"c", c}};
    for (int i = 1; i <= 5; ++i) out.coeffs["r" + std::to_string(i)] = at(g, 5 - i);
    return out;
  }
  throw PreconditionError("separant " + to_text(a) + " is not normalized (expected 1, u or u^2 + c)");
}

ConditionSystem condition_system(Subcase s) {
  ConditionSystem cs;
  cs.context = s;
  auto add = [&](std::string name, Expr rel, int n) {
    cs.names.push_back(std::move(name));
    cs.relations.push_back(std::move(rel));
    cs.condition_n.push_back(n);
  };
  switch (s) {
    case Subcase::A1: {
      const Expr q1 = F("q1"), q2 = F("q2"), q3 = F("q3");
      add("q1' = 0", F("q1", 1), 1);
      add("2 q2 q2' - 3 q1 q3' = 0", 2 * q2 * F("q2", 1) - 3 * q1 * F("q3", 1), 1);
      add("2 q2''' + 2 q2' q3 - 6 q1 q4' = 0", 2 * F("q2", 3) + 2 * F("q2", 1) * q3 - 6 * q1 * F("q4", 1), 1);
      break;
    }
    case Subcase::A2: {
      const Expr q1 = F("q1"), q2 = F("q2"), q3 = F("q3");
      add("q1' q2 - 2 q1 q2' = 0", F("q1", 1) * q2 - 2 * q1 * F("q2", 1), 1);
      add("q2''' - q2 q3' - 2 q2' q3 = 0", F("q2", 3) - q2 * F("q3", 1) - 2 * F("q2", 1) * q3, 1);
      add("q4' = 0", F("q4", 1), 1);
      break;
    }
    case Subcase::A3:
      for (int i = 1; i <= 5; ++i) add("r" + std::to_string(i) + "' = 0", F("r" + std::to_string(i), 1), -1);
      break;
    case Subcase::B: {
      const Expr h1 = F("h1"), d1 = F("h1", 1), d2 = F("h2", 1);
      add("2 q1 h1' - q1' h1 = 0", 2 * F("q1") * d1 - F("q1", 1) * h1, -1);
      add("q2 h1' - q2' h1 + 4 q1 h2' = 0", F("q2") * d1 - F("q2", 1) * h1 + 4 * F("q1") * d2, -1);
      add("q3' h1 - 3 q2 h2' = 0", F("q3", 1) * h1 - 3 * F("q2") * d2, -1);
      add("h1'' + 2 q3 h2' - q4 h1' - q4' h1 = 0", F("h1", 2) + 2 * F("q3") * d2 - F("q4") * d1 - F("q4", 1) * h1, -1);
      add("h2'' - 2 q5 h1' + q4 h2' - q5' h1 = 0", F("h2", 2) - 2 * F("q5") * d1 + F("q4") * d2 - F("q5", 1) * h1,
          -1);
      break;
    }
  }
  return cs;
}

bool ConditionReport::holds() const {
  for (const auto& r : relations)
    if (r.status != RelationStatus::Holds) return false;
  return true;
}

bool ConditionReport::violated() const {
  for (const auto& r : relations)
    if (r.status == RelationStatus::Violated) return true;
  return false;
}

int ConditionReport::first_violated_n() const {
  int n = 1 << 20;
  for (const auto& r : relations)
    if (r.status == RelationStatus::Violated) n = std::min(n, r.condition_n);
  return n;
}

ConditionReport check_conditions(const Ansatz& ansatz) {
  const ConditionSystem cs = condition_system(ansatz.subcase);
  std::map<SymId, Expr> b;
  for (const auto& [name, value] : ansatz.coeffs) {
    Expr d = value;
    for (int k = 0; k <= 3; ++k) {
      b[func_id(name, X(), k)] = d;
      d = total_x(d);
    }
  }
  ConditionReport rep;
  rep.subcase = ansatz.subcase;
  for (std::size_t i = 0; i < cs.relations.size(); ++i) {
    RelationCheck rc;
    rc.name = cs.names[i];
    rc.condition_n = cs.condition_n[i];
    rc.residual = substitute(cs.relations[i], b);
    bool formal = false;
    for (SymId s : atoms_of(rc.residual))
      if (symbol_info(s).kind == SymKind::Func) formal = true;
    if (vanishes(rc.residual))
      rc.status = RelationStatus::Holds;
    else
      rc.status = formal ? RelationStatus::Undecided : RelationStatus::Violated;
    rep.relations.push_back(std::move(rc));
  }
  return rep;
}

Hamiltonian canonical_form(const std::string& id, const std::map<std::string, Expr>& bindings) {
  if (id == "linear-2.13") {
    const auto f = bindings.find("f");
    const auto g = bindings.find("g");
    const Expr fv = f == bindings.end() ? X() : f->second;
    const Expr gv = g == bindings.end() ? Expr() : g->second;
    return Hamiltonian(-u(1) * u(1) / 2 + fv * u() * u() / 2 + gv * u(), id);
  }
  const CatalogEntry e = specialize(catalog_get(id), bindings);
  if (!e.hamiltonian) throw PreconditionError("catalog entry " + id + " has no Hamiltonian");
  return *e.hamiltonian;
}

namespace {

class Normalizer {
 public:
  explicit Normalizer(const Hamiltonian& H) : H_(H) {}

  ClassificationResult run() {
    try {
      const SeparantClass cls = detect_class(H_);
      if (cls.tag == SeparantTag::OutOfClass)
        fail("separant out of class: " + cls.diagnostic);
      else if (cls.tag == SeparantTag::A)
        run_a(cls);
      else
        run_b(cls);
    } catch (const IntegrationError& e) {
      fail(std::string("integration outside the rational class: ") + e.what());
    }
    if (r_.classified() && r_.obstructions.empty()) {
      const Hamiltonian target = canonical_form(r_.canonical_id, r_.bindings);
      r_.verified = hamiltonians_equivalent(H_.expr(), target.expr()).verdict == Equivalence::Equal;
      if (!r_.verified) r_.diagnostics.push_back("the replayed trail does not reach " + to_text(target.expr()));
    }
    return r_;
  }

 private:
  Hamiltonian H_;
  ClassificationResult r_;

  void apply(const TransformTrail& t) {
    H_ = t.replay(H_);
    r_.trail.append(t);
  }
  void apply(TrailStep s) {
    TransformTrail t;
    t.push(std::move(s));
    apply(t);
  }
  void dilate(const Expr& alpha, const Expr& beta, const Expr& gamma) {
    apply({StepKind::Dilatation, {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}}});
  }
  void translate(const Expr& s) {
    if (s.is_zero()) return;
    TransformTrail t;
    t.push_point(PointTransform::translation(s));
    apply(t);
  }
  void galilean(const Expr& c) {
    if (!c.is_zero()) apply({StepKind::Galilean, {{"c", c}}});
  }
  void shift_ct(const Expr& c) {
    if (!c.is_zero()) apply({StepKind::ShiftCt, {{"c", c}}});
  }

  bool flow_x_free() const { return !depends_on_x(variational_derivative(H_.expr())); }

  void finish(std::string id, std::map<std::string, Expr> bindings = {}) {
    r_.canonical_id = std::move(id);
    r_.bindings = std::move(bindings);
  }
  void fail(std::string why) {
    r_.canonical_id = "unclassified";
    r_.diagnostics.push_back(std::move(why));
  }
  void obstruct(std::string id, Expr equation, const std::string& what) {
    r_.canonical_id = std::move(id);
    r_.diagnostics.push_back("unsolved: " + what + ": " + to_text(equation) + " = 0");
    r_.obstructions.push_back(std::move(equation));
  }
  void violated(const std::string& name, int n, const Expr& residual) {
    RelationCheck rc{name, n, residual, RelationStatus::Violated};
    if (!r_.conditions) r_.conditions = ConditionReport{};
    r_.conditions->relations.push_back(rc);
    fail(relation_line(rc));
  }

  std::optional<Ansatz> ansatz() {
    const SeparantClass cls = detect_class(H_);
    try {
      return extract_ansatz(H_, cls);
    } catch (const PreconditionError& e) {
      shape_violation(cls, e.what());
      return std::nullopt;
    }
  }

  void shape_violation(const SeparantClass& cls, const std::string& what) {
    if (cls.tag == SeparantTag::A) {
      const auto parts = u1_parts(H_.expr(), 2);
      const Expr h = potential(at(parts, 1), at(parts, 0));
      const Expr res = degree_residual(cls.data, h);
      if (!vanishes(res)) return violated("a h_5 + 5 a' h_4 + 10 a'' h_3 = 0", 1, res);
    } else if (cls.tag == SeparantTag::B) {
      const auto parts = u1_parts(H_.expr() - 4 * sqrt(u(1) + cls.data), 1);
      const Expr h = potential(at(parts, 1), at(parts, 0));
      if (!vanishes(du(h, 3))) return violated("h_uuu = 0", -1, du(h, 3));
      if (!vanishes(du(cls.data, 5))) return violated("q_uuuuu = 0", 1, du(cls.data, 5));
    }
    fail("shape mismatch: " + what);
  }

  bool conditions_hold(const Ansatz& an) {
    r_.conditions = check_conditions(an);
    if (!r_.conditions->violated()) return true;
    for (const auto& rc : r_.conditions->relations)
      if (rc.status == RelationStatus::Violated) r_.diagnostics.push_back(relation_line(rc));
    r_.canonical_id = "unclassified";
    return false;
  }

  /// Theorem-level family (2.1) when a subcase decision depends on parameter values.
  void general_family() {
    if (!flow_x_free()) return fail("the subcase depends on parameter values and H depends on x");
    const Expr a = separant_from_H(H_);
    const auto s = integer_coeffs(a, jet_id(0), 0, 2, "a");
    const auto parts = u1_parts(H_.expr(), 2);
    const Expr h = potential(at(parts, 1), at(parts, 0), true);
    const auto g = integer_coeffs(a * h, jet_id(0), 0, 4, "a h");
    auto b = quartic_bindings(g);
    b["c1"] = at(s, 2);
    b["c2"] = at(s, 1);
    b["c3"] = at(s, 0);
    r_.diagnostics.push_back("subcase depends on parameter values; reporting the general family");
    finish("2.1", std::move(b));
  }

  void run_a(const SeparantClass& cls) {
    std::map<int, Expr> s;
    try {
      s = integer_coeffs(cls.data, jet_id(0), 0, 2, "a");
    } catch (const PreconditionError&) {
      return violated("a_uuu = 0", -1, du(cls.data, 3));
    }
    const Expr s1 = at(s, 2), s2 = at(s, 1), s3 = at(s, 0);
    const Expr disc = s2 * s2 - 4 * s1 * s3;
    if (depends_on_x(disc)) return violated("(s2^2 - 4 s1 s3)' = 0", -1, total_x(disc));
    if (!s1.is_zero()) return run_a3(s1, s2);
    if (!s2.is_zero()) return run_a2(s2, s3);
    run_a1(s3);
  }

  void run_a3(const Expr& s1, const Expr& s2) {
    r_.diagnostics.push_back("subcase A.3");
    if (depends_on_x(s1))
      return obstruct("2.1d", F("f", 1) - substitute(s1, {{x_id(), F("f")}}), "x = f(y) normalizing the leading coefficient of a");
    if (!numeric(s1)) {
      if (depends_on_x(s2)) translate(-s2 / (2 * s1));
      return general_family();
    }
    translate(-s2 / (2 * s1));
    if (s1 != Expr(1)) dilate(pow(s1, Ratio(3)), 1, 1);
    const auto an = ansatz();
    if (!an || !conditions_hold(*an)) return;
    const Expr c = coeff(*an, "c");
    const Expr g4 = coeff(*an, "r1"), g3 = coeff(*an, "r2"), g2 = coeff(*an, "r3"), g1 = coeff(*an, "r4"),
               g0 = coeff(*an, "r5");
    galilean(2 * g4);
    finish("2.1d", {{"c", c}, {"c1", g1 - c * g3}, {"c2", g0 - c * (g2 - c * g4)}});
  }

  void run_a2(const Expr& s2, const Expr& s3) {
    r_.diagnostics.push_back("subcase A.2");
    if (!numeric(s2)) {
      if (depends_on_x(s3)) translate(-s3 / s2);
      return general_family();
    }
    translate(-s3 / s2);
    if (s2 != Expr(1)) dilate(pow(s2, Ratio(3)), 1, 1);
    const auto an = ansatz();
    if (!an || !conditions_hold(*an)) return;
    const Expr q1 = coeff(*an, "q1"), q2 = coeff(*an, "q2"), q3 = coeff(*an, "q3");
    if (!q2.is_zero()) {
      if (depends_on_x(q2)) {
        const Expr ratio = q1 / (q2 * q2);
        if (!depends_on_x(ratio)) r_.bindings["c1"] = ratio;
        return obstruct("2.1c", F("f", 1) * q2 - 1, "y = f(x) with f' = 1/q2");
      }
      galilean(q2);
      return finish("2.1c", {{"c1", q1}, {"c2", q3}});
    }
    if (!depends_on_x(q1) && !depends_on_x(q3)) return finish("2.1c", {{"c1", q1}, {"c2", q3}});
    if (!q3.is_zero()) {
      const Expr f1 = F("f", 1), f2 = F("f", 2);
      return obstruct("2.2", f1 * F("f", 3) - rational(3, 2) * f2 * f2 + q3 * f1 * f1,
                      "any nonconstant solution f normalizing q3 to zero");
    }
    std::map<int, Expr> p;
    try {
      p = integer_coeffs(q1, x_id(), 0, 4, "q1");
    } catch (const PreconditionError&) {
      Expr d = q1;
      for (int k = 0; k < 5; ++k) d = total_x(d);
      return violated("q1^(5) = 0", 3, d);
    }
    finish("2.2", quartic_bindings(p));
  }

  void run_a1(const Expr& s3) {
    r_.diagnostics.push_back("subcase A.1");
    if (depends_on_x(s3))
      return fail("A.1 separant depends on x; unsolved: " +
                  to_text(F("f", 1) * substitute(s3, {{x_id(), F("f")}}) - 1) + " = 0");
    if (s3 != Expr(1)) dilate(pow(s3, Ratio(3)), 1, 1);
    auto an = ansatz();
    if (!an || !conditions_hold(*an)) return;
    const Expr q1 = coeff(*an, "q1"), q2 = coeff(*an, "q2"), q3 = coeff(*an, "q3");
    if (!q1.is_zero()) {
      if (depends_on_x(q2) || numeric(q1)) translate(-q2 / (3 * q1));
      if (!numeric(q1)) return general_family();
      an = ansatz();
      if (!an) return;
      const Expr k3 = coeff(*an, "q3"), k4 = coeff(*an, "q4");
      if (depends_on_x(k3) || depends_on_x(k4)) return violated("q3' = q4' = 0", 1, total_x(k3) + u() * total_x(k4));
      galilean(k3);
      if (q1 == Expr(1)) return finish("2.1a");
      if (positive_rational(q1)) {
        dilate(1, 1, pow(q1, Ratio(-1, 2)));
        return finish("2.1a");
      }
      r_.diagnostics.push_back("q1 = " + to_text(q1) + " cannot be normalized to 1 over the reals");
      return general_family();
    }
    if (!q2.is_zero()) {
      if (!numeric(q2)) {
        if (depends_on_x(q3)) translate(-q3 / (2 * q2));
        return general_family();
      }
      translate(-q3 / (2 * q2));
      an = ansatz();
      if (!an) return;
      const Expr k4 = coeff(*an, "q4");
      if (depends_on_x(k4)) return violated("q4' = 0", 3, total_x(k4));
      if (q2 != Expr(1)) dilate(1, 1, inverse(q2));
      return finish("2.1b");
    }
    finish("linear-2.13", {{"f", q3}, {"g", coeff(*an, "q4")}});
  }

  void run_b(SeparantClass cls) {
    r_.diagnostics.push_back("case B");
    if (cls.lead != Expr(1)) {
      dilate(1, 1, inverse(cls.lead));
      cls = detect_class(H_);
      if (cls.tag != SeparantTag::B || cls.lead != Expr(1)) return fail("could not normalize a^2 to u1 + q");
    }
    // a^2 does not see the sign of H.
    const Expr flipped = H_.expr() + 4 * sqrt(u(1) + cls.data);
    if (vanishes(diff(diff(flipped, jet_id(1)), jet_id(1)))) dilate(-1, 1, 1);
    const auto an = ansatz();
    if (!an || !conditions_hold(*an)) return;
    const Expr h1 = coeff(*an, "h1"), h2 = coeff(*an, "h2"), q4 = coeff(*an, "q4"), q5 = coeff(*an, "q5");
    if (!h1.is_zero()) {
      if (depends_on_x(h1)) return obstruct("2.3", F("phi", 1) * h1 - 1, "y = phi(x) with phi' = 1/h1");
      if (!flow_x_free()) translate(-h2 / h1);
      if (!flow_x_free()) return fail("the flow still depends on x after normalizing h1, h2");
      galilean(h1);
    } else if (depends_on_x(h2)) {
      if (!q4.is_zero()) return obstruct("2.3", F("phi", 2) + q4 * F("phi", 1), "y = phi(x) removing q4");
      const Expr c = total_x(h2);
      if (!q5.is_zero()) {
        try {
          translate(-integrate(q5, x_id()));
        } catch (const IntegrationError&) {
          return obstruct("2.3", F("psi", 1) + q5, "u -> u + psi(x) removing q5");
        }
      }
      shift_ct(c);
    }
    normalize_q();
  }

  void normalize_q() {
    SeparantClass cls = detect_class(H_);
    auto qc = integer_coeffs(cls.data, jet_id(0), 0, 4, "q");
    if (depends_on_x(cls.data)) {
      const Expr q1 = at(qc, 4), q2 = at(qc, 3), q3 = at(qc, 2), q4 = at(qc, 1);
      if (!q1.is_zero() && !depends_on_x(q1))
        translate(-q2 / (4 * q1));
      else if (q1.is_zero() && !q2.is_zero() && !depends_on_x(q2))
        translate(-q3 / (3 * q2));
      else if (q1.is_zero() && q2.is_zero() && !q3.is_zero() && !depends_on_x(q3))
        translate(-q4 / (2 * q3));
      else if (q1.is_zero() && q2.is_zero() && q3.is_zero() && q4.is_zero())
        translate(integrate(-at(qc, 0), x_id()));
      else
        return fail("normalizing q = " + to_text(cls.data) + " needs a change of x");
      cls = detect_class(H_);
      if (depends_on_x(cls.data)) return violated("q_i' = 0", 1, partial_x(cls.data));
      qc = integer_coeffs(cls.data, jet_id(0), 0, 4, "q");
    }
    finish("2.3", quartic_bindings(qc));
  }
};

}  // namespace

ConditionReport check_conditions(const Hamiltonian& H) {
  Normalizer probe(H);
  ClassificationResult r = probe.run();
  if (r.conditions) return *r.conditions;
  throw PreconditionError("no condition system applies: " +
                          (r.diagnostics.empty() ? std::string("unknown") : r.diagnostics.back()));
}

ClassificationResult normalize_algebraic(const Hamiltonian& H) { return Normalizer(H).run(); }

ClassificationResult identify(const Hamiltonian& H) {
  ClassificationResult r = normalize_algebraic(H);
  if (!r.classified() && affine_flow(H)) {
    r.canonical_id = "linear-2.13";
    r.diagnostics.push_back("the flow is affine in the jet");
  }
  return r;
}

std::string ClassificationResult::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = canonical_id;
  nlohmann::ordered_json b = nlohmann::ordered_json::object();
  for (const auto& [k, v] : bindings) b[k] = to_text(v);
  j["bindings"] = b;
  j["trail"] = nlohmann::ordered_json::parse(trail.to_json());
  nlohmann::ordered_json obs = nlohmann::ordered_json::array();
  for (const Expr& e : obstructions) obs.push_back(to_text(e));
  j["obstructions"] = obs;
  nlohmann::ordered_json rel = nlohmann::ordered_json::array();
  if (conditions)
    for (const auto& rc : conditions->relations)
      rel.push_back({{"name", rc.name}, {"n", rc.condition_n}, {"status", to_string(rc.status)},
                     {"residual", to_text(rc.residual)}});
  j["relations"] = rel;
  j["diagnostics"] = diagnostics;
  j["verified"] = verified;
  return j.dump();
}

}  // namespace hamclass
