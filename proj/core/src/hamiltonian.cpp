#include "hamclass/hamiltonian.hpp"

#include <algorithm>
#include <functional>

#include "hamclass/jet.hpp"
#include "hamclass/text.hpp"
#include "internal.hpp"

namespace hamclass {

namespace {

Expr u(int n = 0) { return jet(n); }
Expr p(const char* name) { return param(name); }
Expr power(const Expr& e, long k) { return pow(e, Ratio(k)); }

/// p0 + p1 z + ... + p4 z^4.
Expr quartic(const Expr& z) {
  Expr out;
  Expr zk(1);
  for (int k = 0; k <= 4; ++k) {
    out += param("p" + std::to_string(k)) * zk;
    zk *= z;
  }
  return out;
}

bool has_fraction(const Expr& e) {
  for (const Term& t : e.terms())
    for (const Factor& f : t.mono) {
      if (f.exp.den() != 1) return true;
      const SymbolInfo& info = symbol_info(f.sym);
      if (info.poly && has_fraction(*info.poly)) return true;
      if (info.arg && has_fraction(*info.arg)) return true;
    }
  return false;
}

std::vector<std::string> parameter_names(const Expr& e) {
  std::vector<std::string> out;
  for (SymId s : atoms_of(e))
    if (symbol_info(s).kind == SymKind::Param) out.push_back(symbol_info(s).name);
  std::sort(out.begin(), out.end());
  return out;
}

CatalogEntry hamiltonian_entry(std::string id, Expr H, Expr printed, Expr separant, std::string notes,
                               std::vector<Expr> constraints = {}) {
  Hamiltonian ham(std::move(H), id);
  FlowEquation F = flow(ham);
  const bool radicals = has_fraction(F.rhs());
  return CatalogEntry{std::move(id), std::move(ham), std::move(F), std::move(separant), std::move(constraints),
                      std::move(notes),   std::move(printed), radicals};
}

CatalogEntry flow_entry(std::string id, Expr F, Expr separant, std::string notes, std::vector<Expr> constraints = {}) {
  FlowEquation flow(F);
  const bool radicals = has_fraction(F);
  return CatalogEntry{std::move(id),          std::nullopt,     std::move(flow), std::move(separant),
                      std::move(constraints), std::move(notes), std::move(F),    radicals};
}

/// u2/a^3 - 3 a' u1^2 / (2 a^4) for a = a(u).
Expr separant_part(const Expr& a) {
  const Expr da = diff(a, jet_id(0));
  return u(2) * power(a, -3) - rational(3, 2) * da * u(1) * u(1) * power(a, -4);
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> out;
  const Expr half = rational(1, 2);
  const Expr third = rational(1, 3);
  const Expr u1sq = u(1) * u(1);
  {
    const Expr a = p("c1") * u() * u() + p("c2") * u() + p("c3");
    const Expr P = quartic(u());
    const Expr H = -u1sq * half * power(a, -3) + P * inverse(a);
    const Expr printed = total_x(separant_part(a) + diff(P * inverse(a), jet_id(0)));
    out.push_back(hamiltonian_entry("2.1", H, printed, a, "a = c1 u^2 + c2 u + c3, P(u) = p0 + ... + p4 u^4"));
  }
  out.push_back(hamiltonian_entry("2.1a", -half * u1sq + power(u(), 4) / 4, total_x(u(2) + power(u(), 3)), Expr(1),
                                  "modified KdV"));
  out.push_back(hamiltonian_entry("2.1b", -half * u1sq + power(u(), 3) / 3, total_x(u(2) + u() * u()), Expr(1), "KdV"));
  {
    const Expr H = -u1sq * half * power(u(), -3) + third * p("c1") * power(u(), 3) - p("c2") * inverse(u());
    const Expr printed = total_x(separant_part(u()) + p("c1") * u() * u() + p("c2") * power(u(), -2));
    out.push_back(hamiltonian_entry("2.1c", H, printed, u(), "a = u"));
  }
  {
    const Expr a = u() * u() + p("c");
    const Expr H = -u1sq * half * power(a, -3) + (p("c1") * u() + p("c2")) * inverse(a);
    const Expr printed = total_x(u(2) * power(a, -3) - 3 * u() * u1sq * power(a, -4) +
                                 p("c1") * (p("c") - u() * u()) * power(a, -2) - 2 * p("c2") * u() * power(a, -2));
    out.push_back(hamiltonian_entry("2.1d", H, printed, a, "a = u^2 + c"));
  }
  {
    const Expr P = quartic(var_x());
    const Expr H = -u1sq * half * power(u(), -3) + third * P * power(u(), 3);
    const Expr printed = total_x(separant_part(u()) + P * u() * u());
    out.push_back(hamiltonian_entry("2.2", H, printed, u(), "P(x) = p0 + ... + p4 x^4"));
  }
  {
    const Expr P = quartic(u());
    const Expr dP = diff(P, jet_id(0));
    const Expr B = u(1) + P;
    const Expr H = 4 * sqrt(B);
    const Expr printed =
        total_x(u(2) * pow(B, Ratio(-3, 2)) + 3 * dP * pow(B, Ratio(-1, 2)) - P * dP * pow(B, Ratio(-3, 2)));
    out.push_back(hamiltonian_entry("2.3", H, printed, sqrt(B), "P(u) = p0 + ... + p4 u^4"));
  }
  out.push_back(hamiltonian_entry("2.13", -half * u1sq + half * var_x() * u() * u(),
                                  total_x(u(2) + var_x() * u()), Expr(1), "linear, f(x) = x, g(x) = 0"));
  {
    const Expr q2 = p("s0") + p("s1") * var_x() + p("s2") * var_x() * var_x();
    const Expr H = -u1sq * half * power(u(), -3) + third * p("c") * q2 * q2 * power(u(), 3) + half * q2 * u() * u();
    const Expr printed = total_x(separant_part(u()) + p("c") * q2 * q2 * u() * u() + q2 * u());
    out.push_back(hamiltonian_entry("remark3", H, printed, u(), "q2(x) = s0 + s1 x + s2 x^2, so q2''' = 0"));
  }
  {
    const Expr phi = func("phi", var_x());
    const Expr dphi = func("phi", var_x(), 1);
    const Expr H = -u1sq * half * power(u(), -3) + third * power(u(), 3) - rational(3, 2) * phi * inverse(u());
    const Expr printed = total_x(separant_part(u()) + u() * u() + rational(3, 2) * phi * power(u(), -2));
    const std::vector<Expr> rules{dphi * dphi - (4 * power(phi, 3) - p("g2") * phi - p("g3")),
                                  func("phi", var_x(), 2) - (6 * phi * phi - half * p("g2"))};
    out.push_back(hamiltonian_entry("remark4", H, printed, u(), "phi'^2 = 4 phi^3 - g2 phi - g3", rules));
  }
  {
    const Expr e = func("exp", u());
    const Expr F = u(3) - half * power(u(1), 3) + u(1) * (p("c1") * e * e - 3 * p("c2") * power(e, -2));
    out.push_back(flow_entry("cd-exp", F, Expr(1), "Calogero-Degasperis, exponential form"));
  }
  {
    const Expr e = func("exp", u());
    const Expr k = p("k");
    const Expr kinv2 = power(k, -2);
    const Expr ct1 = rational(3, 2) * kinv2 * (2 * p("c2") + k * p("c1"));
    const Expr ct2 = rational(3, 2) * kinv2 * (2 * p("c2") - k * p("c1"));
    const Expr c3 = 6 * p("c2") * kinv2;
    const Expr F = u(3) - half * power(u(1), 3) + u(1) * (ct1 * e * e + ct2 * power(e, -2)) - c3 * u(1);
    out.push_back(flow_entry("cd-tanh", F, Expr(1), "Calogero-Degasperis with c = -k^2/4"));
  }
  out.push_back(flow_entry("mkdv-w", u(3) + 12 * p("c2") * u() * u() * u(1) + 6 * p("c1") * u() * u(1), Expr(1),
                           "modified KdV after v = 1/w"));
  out.push_back(flow_entry("kn", u(3) - rational(3, 2) * u(2) * u(2) * inverse(u(1)) - quartic(u()) * inverse(u(1)),
                           Expr(1), "Krichever-Novikov, P(v) = p0 + ... + p4 v^4"));
  {
    const Expr Q = 4 * quartic(u());
    const Expr dQQ = diff(diff(Q, jet_id(0)), jet_id(0));
    const Expr G = total_x(Q + u(1) * u(1));
    const Expr F = u(3) - rational(3, 8) * G * G * inverse(u(1) * (u(1) * u(1) + Q)) + half * dQQ * u(1);
    out.push_back(flow_entry("cd-B", F, Expr(1), "second Calogero-Degasperis form, Q = 4P, denominator v_y (v_y^2 + Q)"));
  }
  return out;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

}  // namespace

Hamiltonian::Hamiltonian(Expr H, std::string label, std::vector<std::string> positive)
    : H_(std::move(H)), label_(std::move(label)), positive_(std::move(positive)) {
  const int order = jet_order(H_);
  if (order > 1) throw PreconditionError("Hamiltonian depends on u" + std::to_string(order));
  const Expr h11 = diff(diff(H_, jet_id(1)), jet_id(1));
  if (h11.is_zero() || is_zero_cleared(h11)) throw PreconditionError("degenerate Hamiltonian: d^2H/du1^2 = 0");
  params_ = parameter_names(H_);
  std::sort(positive_.begin(), positive_.end());
}

FlowEquation flow(const Hamiltonian& H) { return FlowEquation(total_x(variational_derivative(H.expr()))); }

Expr separant_from_H(const Hamiltonian& H) {
  return pow(-diff(diff(H.expr(), jet_id(1)), jet_id(1)), Ratio(-1, 3));
}

EquivalenceResult hamiltonians_equivalent(const Expr& H1, const Expr& H2) {
  if (jet_order(H1) > 1 || jet_order(H2) > 1)
    throw PreconditionError("hamiltonians_equivalent expects Hamiltonians of order at most 1");
  const Expr d = variational_derivative(H1 - H2);
  if (jet_order(d) == kNoJet && !depends_on_x(d)) return {Equivalence::Equal, ""};
  // d is constant iff D_x d vanishes.
  EquivalenceResult r = equivalent(total_x(d), Expr());
  if (r.verdict == Equivalence::Different) r.diagnostic = "E(H1 - H2) = " + to_text(d) + " is not constant";
  return r;
}

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const CatalogEntry& e : catalog()) out.push_back(e.id);
    return out;
  }();
  return ids;
}

const std::vector<std::string>& primary_catalog_ids() {
  static const std::vector<std::string> ids{"2.1", "2.1a", "2.1b", "2.1c", "2.1d", "2.2", "2.3", "2.13"};
  return ids;
}

const CatalogEntry& catalog_get(std::string_view id) {
  static const std::map<std::string, std::string, std::less<>> aliases{
      {"kdv", "2.1b"}, {"mkdv", "2.1a"}, {"linear-2.13", "2.13"}};
  std::string_view key = id;
  if (auto it = aliases.find(id); it != aliases.end()) key = it->second;
  for (const CatalogEntry& e : catalog())
    if (e.id == key) return e;
  throw PreconditionError("unknown catalog id '" + std::string(id) + "'");
}

CatalogEntry specialize(const CatalogEntry& entry, const std::map<std::string, Expr>& bindings) {
  std::map<SymId, Expr> subs;
  for (const auto& [name, value] : bindings) subs.emplace(param_id(name), value);
  auto apply = [&](const Expr& e) { return substitute(e, subs); };
  std::optional<Hamiltonian> ham;
  if (entry.hamiltonian) ham.emplace(apply(entry.hamiltonian->expr()), entry.hamiltonian->label());
  FlowEquation F = ham ? flow(*ham) : FlowEquation(apply(entry.flow.rhs()));
  std::vector<Expr> constraints;
  for (const Expr& c : entry.constraints) constraints.push_back(apply(c));
  const bool radicals = has_fraction(F.rhs());
  return CatalogEntry{entry.id,           std::move(ham), std::move(F),          apply(entry.expected_separant),
                      std::move(constraints), entry.notes, apply(entry.printed_flow), radicals};
}

DensityStatus CatalogReport::status() const {
  if (sequence.status != DensityStatus::Ok) return sequence.status;
  bool unknown = false;
  for (Equivalence v : {separant, printed}) {
    if (v == Equivalence::Different) return DensityStatus::Violated;
    unknown = unknown || v == Equivalence::Unknown;
  }
  if (even) {
    for (const auto& item : even->items) {
      if (item.status == ExactStatus::NotExact) return DensityStatus::Violated;
      unknown = unknown || item.status == ExactStatus::Undecided;
    }
  }
  return unknown ? DensityStatus::Undecided : DensityStatus::Ok;
}

CatalogReport catalog_verify(const CatalogEntry& entry, int N, const Budget& budget) {
  CatalogReport report(check_integrability(entry.flow, N, budget));
  report.id = entry.id;
  auto record = [&](Equivalence& slot, const EquivalenceResult& r, const std::string& what) {
    if (r.verdict == Equivalence::Equal) return;
    if (slot != Equivalence::Different) slot = r.verdict;
    report.problems.push_back(what + ": " + r.diagnostic);
  };
  record(report.separant, equivalent(separant_density(entry.flow), entry.expected_separant),
         "separant of the flow differs from the expected separant");
  if (entry.hamiltonian) {
    record(report.separant, equivalent(separant_from_H(*entry.hamiltonian), entry.expected_separant),
           "separant of H differs from the expected separant");
    record(report.printed, equivalent(entry.flow.rhs(), entry.printed_flow),
           "flow of H differs from the printed right-hand side");
    report.even = hamiltonian_even_triviality(report.sequence);
  } else {
    record(report.printed, equivalent(entry.flow.rhs(), entry.printed_flow), "flow differs from the printed form");
  }
  if (report.sequence.status != DensityStatus::Ok) report.problems.push_back(report.sequence.diagnostic);
  return report;
}

CatalogReport catalog_verify(std::string_view id, int N, const Budget& budget) {
  return catalog_verify(catalog_get(id), N, budget);
}

}  // namespace hamclass
