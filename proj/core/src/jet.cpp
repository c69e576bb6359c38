#include "hamclass/jet.hpp"

#include "hamclass/text.hpp"
#include "internal.hpp"

namespace hamclass {

namespace {

const SymbolDerivative& dx_rule() {
  static const SymbolDerivative rule = [](SymId s) -> Expr {
    const SymbolInfo& info = symbol_info(s);
    switch (info.kind) {
      case SymKind::X: return Expr(1);
      case SymKind::Jet: return jet(info.order + 1);
      default: return Expr();
    }
  };
  return rule;
}

/// Terms that mention neither x nor a jet variable.
Expr strip_constants(const Expr& e) {
  std::vector<Term> kept;
  for (const Term& t : e.terms()) {
    bool keep = false;
    for (const Factor& f : t.mono) {
      const SymbolInfo& info = symbol_info(f.sym);
      if (info.depends_x || info.order != kNoJet) keep = true;
    }
    if (keep) kept.push_back(t);
  }
  return Expr::from_terms(std::move(kept));
}

}  // namespace

const char* to_string(ExactStatus s) {
  switch (s) {
    case ExactStatus::Exact: return "exact";
    case ExactStatus::NotExact: return "not-exact";
    case ExactStatus::Undecided: return "undecided";
  }
  return "undecided";
}

Expr total_x(const Expr& e) { return derive(e, dx_rule()); }

Expr total_x(const Expr& e, int k) {
  Expr out = e;
  for (int i = 0; i < k; ++i) out = total_x(out);
  return out;
}

Expr total_t(const Expr& rho, const Expr& F) {
  const int order = jet_order(rho);
  Expr out;
  Expr dF = F;
  for (int i = 0; i <= order; ++i) {
    if (i > 0) dF = total_x(dF);
    const Expr p = diff(rho, jet_id(i));
    if (!p.is_zero()) out += p * dF;
  }
  return out;
}

Expr variational_derivative(const Expr& H) {
  const int order = jet_order(H);
  if (order == kNoJet) return Expr();
  // Horner form: P0 - D(P1 - D(P2 - ...)).
  Expr acc = diff(H, jet_id(order));
  for (int k = order - 1; k >= 0; --k) acc = diff(H, jet_id(k)) - total_x(acc);
  return acc;
}

Expr integrate_total(const Expr& T) {
  Expr theta;
  Expr R = T;
  while (!R.is_zero()) {
    const int m = jet_order(R);
    if (m == 0) {
      std::vector<Term> with_u, free;
      for (const Term& t : R.terms())
        (depends_on(Expr::from_terms({t}), jet_id(0)) ? with_u : free).push_back(t);
      if (!is_zero_cleared(Expr::from_terms(std::move(with_u))))
        throw IntegrationError("not exact: remainder depends on u but not on its derivatives: " + to_text(R));
      R = Expr::from_terms(std::move(free));
      continue;
    }
    if (m == kNoJet) {
      theta += integrate(R, x_id());
      break;
    }
    const SymId top = jet_id(m);
    Expr a;
    if (auto parts = coefficients_in(R, top)) {
      for (const auto& [k, c] : *parts)
        if (k != Ratio(0) && k != Ratio(1))
          throw IntegrationError("not exact: nonlinear in u" + std::to_string(m));
      auto it = parts->find(Ratio(1));
      if (it == parts->end()) throw IntegrationError("not exact: u" + std::to_string(m) + " enters only through kernels");
      a = it->second;
    } else {
      // u_m inside a kernel: the coefficient is the partial derivative.
      a = diff(R, top);
      if (depends_on(a, top)) {
        if (!is_zero_cleared(diff(a, top))) throw IntegrationError("not exact: nonlinear in u" + std::to_string(m));
        a = substitute(a, {{top, Expr()}});
      }
    }
    const Expr phi = integrate(a, jet_id(m - 1));
    theta += phi;
    R = R - total_x(phi);
    if (auto rest = coefficients_in(R, top)) {
      if (rest->count(Ratio(1)) != 0 && is_zero_cleared(rest->at(Ratio(1)))) R = (*rest)[Ratio(0)];
    } else if (is_zero_cleared(diff(R, top))) {
      R = substitute(R, {{top, Expr()}});
    }
    if (jet_order(R) >= m) throw IntegrationError("internal: top order did not drop while integrating");
  }
  return strip_constants(theta);
}

ExactnessReport is_exact(const Expr& T) {
  ExactnessReport report;
  if (T.is_zero()) {
    report.status = ExactStatus::Exact;
    report.exact = true;
    report.witness = Expr();
    return report;
  }
  // A verified witness certifies E(T) = 0 without computing it.
  try {
    const Expr theta = integrate_total(T);
    const EquivalenceResult check = equivalent(total_x(theta), T);
    if (check.verdict == Equivalence::Equal) {
      report.status = ExactStatus::Exact;
      report.exact = true;
      report.witness = theta;
      return report;
    }
    report.diagnostic = "integration produced a candidate that failed verification: " + check.diagnostic;
  } catch (const IntegrationError& e) {
    report.diagnostic = e.what();
  }
  report.residual = variational_derivative(T);
  const EquivalenceResult verdict = equivalent(report.residual, Expr());
  switch (verdict.verdict) {
    case Equivalence::Equal:
      report.status = ExactStatus::Exact;
      report.exact = true;
      report.residual = Expr();
      report.diagnostic = "Euler operator vanishes but no rational flux was found: " + report.diagnostic;
      break;
    case Equivalence::Different:
      report.status = ExactStatus::NotExact;
      break;
    case Equivalence::Unknown:
      report.status = ExactStatus::Undecided;
      report.diagnostic = verdict.diagnostic;
      break;
  }
  return report;
}

}  // namespace hamclass
