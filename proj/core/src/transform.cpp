#include "hamclass/transform.hpp"

#include <json.hpp>

#include "hamclass/jet.hpp"
#include "hamclass/text.hpp"
#include "internal.hpp"

namespace hamclass {

namespace {

Expr u(int n = 0) { return jet(n); }

bool vanishes(const Expr& e) { return e.is_zero() || is_zero_cleared(e); }

void require_canonical(const PointTransform& T) {
  if (!T.canonical()) throw PreconditionError("point transform is not canonical: Delta = " + to_text(T.delta()));
}

/// Binds u_0..u_order to values[0..order].
std::map<SymId, Expr> jet_bindings(const std::vector<Expr>& values) {
  std::map<SymId, Expr> out;
  for (std::size_t n = 0; n < values.size(); ++n) out.emplace(jet_id(static_cast<int>(n)), values[n]);
  return out;
}

/// w_0 = first, w_{n+1} = scale * D_x w_n.
std::vector<Expr> jet_chain(const Expr& first, const Expr& scale, int order) {
  std::vector<Expr> w{first};
  for (int n = 0; n < order; ++n) w.push_back(scale * total_x(w.back()));
  return w;
}

void require_order(const Expr& e, int max_order, const char* what) {
  if (jet_order(e) > max_order)
    throw PreconditionError(std::string(what) + " may depend on x and u only, got " + to_text(e));
}

}  // namespace

PointTransform::PointTransform(Expr phi, Expr psi) : phi_(std::move(phi)), psi_(std::move(psi)) {
  require_order(phi_, 0, "phi");
  require_order(psi_, 0, "psi");
  delta_ = diff(psi_, jet_id(0)) * diff(phi_, x_id()) - diff(phi_, jet_id(0)) * diff(psi_, x_id());
}

bool PointTransform::canonical() const { return equivalent(delta_, Expr(1)).verdict == Equivalence::Equal; }

PointTransform PointTransform::identity() { return {var_x(), u()}; }

PointTransform PointTransform::linear(const Expr& f, const Expr& g) {
  require_order(f, kNoJet, "f");
  require_order(g, kNoJet, "g");
  return {f, u() * inverse(diff(f, x_id())) + g};
}

PointTransform PointTransform::shear(const Expr& f) {
  if (depends_on_x(f) || jet_order(f) > 0) throw PreconditionError("shear needs f = f(v)");
  return {f + var_x(), u()};
}

PointTransform PointTransform::scaling(const Expr& beta, const Expr& gamma) { return {beta * var_x(), gamma * u()}; }

PointTransform PointTransform::translation(const Expr& s) {
  require_order(s, kNoJet, "s");
  return {var_x(), u() + s};
}

PointTransform compose(const PointTransform& first, const PointTransform& second) {
  const std::map<SymId, Expr> b{{x_id(), second.phi()}, {jet_id(0), second.psi()}};
  return {substitute(first.phi(), b), substitute(first.psi(), b)};
}

Hamiltonian transform_hamiltonian(const Hamiltonian& H, const PointTransform& T) {
  require_canonical(T);
  const Expr dphi = total_x(T.phi());
  if (vanishes(dphi)) throw PreconditionError("D_y phi vanishes identically");
  const Expr slope = total_x(T.psi()) * inverse(dphi);
  const Expr out = substitute(H.expr(), {{x_id(), T.phi()}, {jet_id(0), T.psi()}, {jet_id(1), slope}}) * dphi;
  return Hamiltonian(out, H.label(), H.positive());
}

FlowEquation push_flow(const FlowEquation& F, const PointTransform& T) {
  require_canonical(T);
  const Expr dphi = total_x(T.phi());
  if (vanishes(dphi)) throw PreconditionError("D_y phi vanishes identically");
  std::map<SymId, Expr> b = jet_bindings(jet_chain(T.psi(), inverse(dphi), jet_order(F.rhs())));
  b.emplace(x_id(), T.phi());
  return FlowEquation(dphi * substitute(F.rhs(), b));
}

Hamiltonian dilatation(const Hamiltonian& H, const Expr& alpha, const Expr& beta, const Expr& gamma) {
  const Expr scaled = substitute(
      H.expr(), {{x_id(), beta * var_x()}, {jet_id(0), gamma * u()}, {jet_id(1), gamma * inverse(beta) * u(1)}});
  return Hamiltonian(alpha * inverse(beta * gamma * gamma) * scaled, H.label(), H.positive());
}

Hamiltonian galilean(const Hamiltonian& H, const Expr& c) {
  if (depends_on_x(variational_derivative(H.expr())))
    throw PreconditionError("Galilean transformation needs a flow free of x");
  return Hamiltonian(H.expr() - rational(1, 2) * c * u() * u(), H.label(), H.positive());
}

Hamiltonian shift_ct(const Hamiltonian& H, const Expr& c) {
  const Expr rest = H.expr() - c * var_x() * u();
  const Expr e = variational_derivative(rest);
  if (depends_on_x(e) || depends_on(e, jet_id(0)))
    throw PreconditionError("u -> u + ct needs H = c x u + h(u1), remainder " + to_text(rest));
  return Hamiltonian(rest, H.label(), H.positive());
}

FlowEquation dilatation(const FlowEquation& F, const Expr& alpha, const Expr& beta, const Expr& gamma) {
  const int order = jet_order(F.rhs());
  std::vector<Expr> w;
  Expr factor = gamma;
  for (int n = 0; n <= order; ++n) {
    w.push_back(factor * u(n));
    factor *= inverse(beta);
  }
  std::map<SymId, Expr> b = jet_bindings(w);
  b.emplace(x_id(), beta * var_x());
  return FlowEquation(alpha * inverse(gamma) * substitute(F.rhs(), b));
}

FlowEquation galilean(const FlowEquation& F, const Expr& c) { return FlowEquation(F.rhs() - c * u(1)); }

FlowEquation shift_ct(const FlowEquation& F, const Expr& c) { return FlowEquation(F.rhs() - c); }

FlowEquation reciprocal(const FlowEquation& F, const Expr& rho, const Expr& theta) {
  if (jet_order(rho) > 0) throw PreconditionError("reciprocal transformation needs rho = rho(u), got " + to_text(rho));
  if (depends_on_x(rho)) throw PreconditionError("reciprocal transformation needs rho free of x");
  if (depends_on_x(F.rhs())) throw PreconditionError("reciprocal transformation needs F free of x");
  if (depends_on_x(theta)) throw PreconditionError("reciprocal transformation needs theta free of x");
  if (vanishes(rho)) throw PreconditionError("reciprocal transformation needs rho != 0");
  const EquivalenceResult law = equivalent(total_t(rho, F.rhs()), total_x(theta));
  if (law.verdict != Equivalence::Equal)
    throw PreconditionError("(rho, theta) is not a conservation law: " + law.diagnostic);
  const int order = std::max(jet_order(F.rhs()), jet_order(theta));
  const std::map<SymId, Expr> b = jet_bindings(jet_chain(u(), rho, order));
  return FlowEquation(substitute(F.rhs(), b) - substitute(theta, b) * u(1));
}

FlowEquation point_substitute(const FlowEquation& F, const Expr& f) {
  require_order(f, 0, "f");
  if (depends_on_x(f)) throw PreconditionError("point substitution needs v = f(w)");
  const Expr df = diff(f, jet_id(0));
  if (vanishes(df)) throw PreconditionError("point substitution needs f' != 0");
  std::vector<Expr> w{f};
  for (int n = 0; n < jet_order(F.rhs()); ++n) w.push_back(total_x(w.back()));
  return FlowEquation(substitute(F.rhs(), jet_bindings(w)) * inverse(df));
}

FlowEquation potential_form(const FlowEquation& F) {
  Expr Phi;
  try {
    Phi = integrate_total(F.rhs());
  } catch (const IntegrationError& e) {
    throw PreconditionError(std::string("potential form undefined, F is not a total derivative: ") + e.what());
  }
  std::vector<Expr> w;
  for (int n = 0; n <= jet_order(Phi); ++n) w.push_back(u(n + 1));
  return FlowEquation(substitute(Phi, jet_bindings(w)));
}

FlowEquation hodograph(const FlowEquation& F) {
  const Expr slope = inverse(u(1));
  std::vector<Expr> w{var_x()};
  if (jet_order(F.rhs()) >= 1) {
    w.push_back(slope);
    for (int n = 1; n < jet_order(F.rhs()); ++n) w.push_back(slope * total_x(w.back()));
  }
  std::map<SymId, Expr> b = jet_bindings(w);
  b.emplace(x_id(), u());
  return FlowEquation(-u(1) * substitute(F.rhs(), b));
}

Expr tanh_to_exp(const Expr& e) {
  std::map<SymId, Expr> b;
  for (SymId s : atoms_of(e)) {
    const SymbolInfo& info = symbol_info(s);
    if (info.kind != SymKind::Func || info.name != "tanh") continue;
    const Expr e2 = func("exp", 2 * *info.arg);
    b.emplace(s, (e2 - 1) * inverse(e2 + 1));
  }
  return substitute(e, b);
}

std::optional<Expr> galilean_parameter(const FlowEquation& F, const FlowEquation& target) {
  const Expr s = (target.rhs() - F.rhs()) * inverse(u(1));
  if (jet_order(s) == kNoJet && !depends_on_x(s)) return s;
  if (!vanishes(total_x(s))) return std::nullopt;
  // s is constant but not structurally so; read it off at a point where it is defined.
  for (long at : {0L, 1L, 2L}) {
    std::map<SymId, Expr> b{{x_id(), Expr(at)}};
    for (int n = 0; n <= jet_order(s); ++n) b.emplace(jet_id(n), Expr(at));
    try {
      const Expr value = substitute(s, b);
      if (jet_order(value) == kNoJet && !depends_on_x(value)) return value;
    } catch (const DomainError&) {
    }
  }
  return std::nullopt;
}

// --- trails ------------------------------------------------------------------

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Point: return "point";
    case StepKind::Dilatation: return "dilatation";
    case StepKind::Galilean: return "galilean";
    case StepKind::ShiftCt: return "shift_ct";
    case StepKind::Reciprocal: return "reciprocal";
    case StepKind::Substitute: return "point_substitute";
    case StepKind::Potential: return "potential";
    case StepKind::Hodograph: return "hodograph";
  }
  return "point";
}

const Expr& TrailStep::arg(const std::string& name) const {
  auto it = args.find(name);
  if (it == args.end()) throw PreconditionError(std::string(to_string(kind)) + " step lacks argument '" + name + "'");
  return it->second;
}

void TransformTrail::push_point(const PointTransform& T) {
  steps_.push_back({StepKind::Point, {{"phi", T.phi()}, {"psi", T.psi()}}});
}

void TransformTrail::append(const TransformTrail& other) {
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
}

Hamiltonian TransformTrail::replay(const Hamiltonian& H) const {
  Hamiltonian out = H;
  for (const TrailStep& s : steps_) {
    switch (s.kind) {
      case StepKind::Point: out = transform_hamiltonian(out, PointTransform(s.arg("phi"), s.arg("psi"))); break;
      case StepKind::Dilatation: out = dilatation(out, s.arg("alpha"), s.arg("beta"), s.arg("gamma")); break;
      case StepKind::Galilean: out = galilean(out, s.arg("c")); break;
      case StepKind::ShiftCt: out = shift_ct(out, s.arg("c")); break;
      default:
        throw PreconditionError(std::string(to_string(s.kind)) + " acts on equations, not on Hamiltonians");
    }
  }
  return out;
}

FlowEquation TransformTrail::replay(const FlowEquation& F) const {
  FlowEquation out = F;
  for (const TrailStep& s : steps_) {
    switch (s.kind) {
      case StepKind::Point: out = push_flow(out, PointTransform(s.arg("phi"), s.arg("psi"))); break;
      case StepKind::Dilatation: out = dilatation(out, s.arg("alpha"), s.arg("beta"), s.arg("gamma")); break;
      case StepKind::Galilean: out = galilean(out, s.arg("c")); break;
      case StepKind::ShiftCt: out = shift_ct(out, s.arg("c")); break;
      case StepKind::Reciprocal: out = reciprocal(out, s.arg("rho"), s.arg("theta")); break;
      case StepKind::Substitute: out = point_substitute(out, s.arg("f")); break;
      case StepKind::Potential: out = potential_form(out); break;
      case StepKind::Hodograph: out = hodograph(out); break;
    }
  }
  return out;
}

std::string TransformTrail::to_json() const {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const TrailStep& s : steps_) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    for (const auto& [name, value] : s.args) j[name] = to_text(value);
    steps.push_back(std::move(j));
  }
  return steps.dump();
}

TransformTrail TransformTrail::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed trail JSON: ") + e.what(), 1, e.byte);
  }
  if (doc.is_object() && doc.contains("trail")) doc = doc["trail"];
  if (!doc.is_array()) throw ParseError("trail JSON must be an array of steps", 1, 1);
  static const std::map<std::string, StepKind> kinds{
      {"point", StepKind::Point},           {"dilatation", StepKind::Dilatation},
      {"galilean", StepKind::Galilean},     {"shift_ct", StepKind::ShiftCt},
      {"reciprocal", StepKind::Reciprocal}, {"point_substitute", StepKind::Substitute},
      {"potential", StepKind::Potential},   {"hodograph", StepKind::Hodograph}};
  TransformTrail out;
  for (const auto& j : doc) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
      throw ParseError("trail step needs a string 'kind'", 1, 1);
    auto k = kinds.find(j["kind"].get<std::string>());
    if (k == kinds.end()) throw ParseError("unknown trail step kind '" + j["kind"].get<std::string>() + "'", 1, 1);
    TrailStep step{k->second, {}};
    for (const auto& [name, value] : j.items()) {
      if (name == "kind") continue;
      if (!value.is_string()) throw ParseError("trail argument '" + name + "' must be a string", 1, 1);
      step.args.emplace(name, parse_expr(value.get<std::string>()));
    }
    out.push(std::move(step));
  }
  return out;
}

}  // namespace hamclass
