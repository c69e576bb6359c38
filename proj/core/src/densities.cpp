#include "hamclass/densities.hpp"

#include <algorithm>

#include "hamclass/text.hpp"
#include "internal.hpp"

namespace hamclass {

namespace {

const Expr& zero() {
  static const Expr z;
  return z;
}

/// Ordered compositions of b into k parts, each >= a, as a multiset product sum.
void compositions(int a, int remaining, int k, std::vector<int>& prefix, const std::map<int, Expr>& rhos, Expr& out) {
  if (k == 0) {
    if (remaining != 0) return;
    Expr product(1);
    for (int i : prefix) {
      if (i < -1) return;
      auto it = rhos.find(i);
      if (it == rhos.end()) throw PreconditionError("multi-index sum needs rho_" + std::to_string(i));
      if (it->second.is_zero()) return;
      product *= it->second;
    }
    out += product;
    return;
  }
  // Remaining parts need at least a each.
  for (int i = a; i <= remaining - (k - 1) * a; ++i) {
    prefix.push_back(i);
    compositions(a, remaining - i, k - 1, prefix, rhos, out);
    prefix.pop_back();
  }
}

/// Terms free of x and of jet variables.
Expr constant_part(const Expr& e) {
  std::vector<Term> kept;
  for (const Term& t : e.terms()) {
    bool constant = true;
    for (const Factor& f : t.mono) {
      const SymbolInfo& info = symbol_info(f.sym);
      if (info.depends_x || info.order != kNoJet) constant = false;
    }
    if (constant) kept.push_back(t);
  }
  return Expr::from_terms(std::move(kept));
}

}  // namespace

FlowEquation::FlowEquation(Expr F) : F_(std::move(F)) {
  if (jet_order(F_) != 3)
    throw PreconditionError("flow must have jet order exactly 3, got " + std::to_string(jet_order(F_)));
  for (int n = 0; n <= 3; ++n) partials_[static_cast<std::size_t>(n)] = diff(F_, jet_id(n));
  if (partials_[3].is_zero() || is_zero_cleared(partials_[3])) throw PreconditionError("F_3 vanishes");
  for (SymId s : atoms_of(F_))
    if (symbol_info(s).kind == SymKind::Param) params_.push_back(symbol_info(s).name);
  std::sort(params_.begin(), params_.end());
}

const Expr& FlowEquation::partial(int n) const {
  if (n < 0 || n > 3) return zero();
  return partials_[static_cast<std::size_t>(n)];
}

Expr separant_density(const FlowEquation& F) { return pow(F.partial(3), Ratio(-1, 3)); }

Expr multi_index_sum(const std::map<int, Expr>& rhos, int a, int b, int k) {
  if (k < 1) throw PreconditionError("multi-index sum needs k >= 1");
  Expr out;
  std::vector<int> prefix;
  compositions(a, b, k, prefix, rhos, out);
  return out;
}

const char* to_string(DensityStatus s) {
  switch (s) {
    case DensityStatus::Ok: return "ok";
    case DensityStatus::Violated: return "violated";
    case DensityStatus::Undecided: return "undecided";
    case DensityStatus::Resource: return "resource";
  }
  return "undecided";
}

const Expr& DensitySequence::rho(int n) const {
  if (n < -1) return zero();
  const auto i = static_cast<std::size_t>(n + 1);
  if (i >= entries.size()) throw PreconditionError("rho_" + std::to_string(n) + " has not been computed");
  return entries[i].rho;
}

const Expr& DensitySequence::theta(int n) const {
  if (n < -1) return zero();
  const auto i = static_cast<std::size_t>(n + 1);
  if (i >= entries.size()) throw PreconditionError("theta_" + std::to_string(n) + " has not been computed");
  return entries[i].theta;
}

std::map<int, Expr> DensitySequence::rhos() const {
  std::map<int, Expr> out;
  for (const DensityEntry& e : entries) out.emplace(e.n, e.rho);
  return out;
}

Expr next_density(int n, const DensitySequence& seq) {
  if (n < -2) throw PreconditionError("next_density needs n >= -2");
  if (seq.entries.empty()) throw PreconditionError("next_density needs rho_{-1}");
  const FlowEquation& F = seq.flow;
  std::map<int, Expr> rhos = seq.rhos();
  // rho_{n+1} enters the sums; it exists once rho_{-1} .. rho_{n+1} are stored.
  if (n + 1 >= -1 && rhos.count(n + 1) == 0)
    throw PreconditionError("next_density(" + std::to_string(n) + ") needs rho_" + std::to_string(n + 1));
  const Expr& a = seq.rho(-1);
  const Expr& rho_n = seq.rho(n);
  const Expr& theta_n = seq.theta(n);
  const Expr a_m2 = pow(a, Ratio(-2));

  Expr first = theta_n - F.partial(1) * rho_n - F.partial(2) * total_x(rho_n) -
               F.partial(2) * multi_index_sum(rhos, -1, n, 2);
  if (n == 0) first -= F.partial(0);
  Expr out = rational(1, 3) * a * first;
  out -= rational(1, 3) * a_m2 * total_x(rho_n, 2);
  const Expr group = rational(1, 2) * total_x(multi_index_sum(rhos, -1, n, 2)) +
                     rational(1, 3) * multi_index_sum(rhos, 0, n, 3) + a * multi_index_sum(rhos, 0, n + 1, 2);
  out -= a_m2 * group;
  return out;
}

Expr closed_form_rho(int n, const FlowEquation& F, const Expr& theta_minus1) {
  const Expr a = separant_density(F);
  const Expr da = total_x(a);
  switch (n) {
    case -1: return a;
    case 0: return -da * inverse(a) - rational(1, 3) * F.partial(2) * a;
    case 1: {
      const Expr& F1 = F.partial(1);
      const Expr& F2 = F.partial(2);
      return rational(1, 3) * theta_minus1 * a - rational(1, 3) * F1 * pow(a, Ratio(2)) + F2 * a * da +
             rational(1, 9) * F2 * F2 * pow(a, Ratio(5)) + rational(1, 3) * pow(a, Ratio(2)) * total_x(F2) +
             rational(2, 3) * total_x(pow(a, Ratio(-2)) * da) + rational(1, 3) * pow(a, Ratio(-3)) * da * da;
    }
    default: throw PreconditionError("closed forms exist for n = -1, 0, 1 only");
  }
}

Expr rho0_correction(const FlowEquation& F) {
  const Expr a = separant_density(F);
  return -rational(1, 3) * F.partial(2) * (pow(a, Ratio(3)) - a);
}

DensitySequence check_integrability(const FlowEquation& F, int N, const Budget& budget) {
  if (N < -1) throw PreconditionError("check_integrability needs N >= -1");
  const auto start = std::chrono::steady_clock::now();
  DensitySequence seq(F);
  auto out_of_budget = [&](int n, const Expr& e, const char* what) {
    if (node_count(e) > budget.max_nodes) {
      seq.status = DensityStatus::Resource;
      seq.failed_n = n;
      seq.diagnostic = std::string(what) + " exceeds the node budget of " + std::to_string(budget.max_nodes);
      return true;
    }
    if (std::chrono::steady_clock::now() - start > budget.wall) {
      seq.status = DensityStatus::Resource;
      seq.failed_n = n;
      seq.diagnostic = "wall-clock budget exhausted at n = " + std::to_string(n);
      return true;
    }
    return false;
  };
  // Set when E(rho_{-1}) is a nonzero constant; then the constant of theta_{n-2} is gauge.
  std::optional<Expr> gauge;
  for (int n = -1; n <= N; ++n) {
    Expr rho;
    try {
      rho = n == -1 ? separant_density(F) : next_density(n - 2, seq);
    } catch (const ResourceError& e) {
      seq.status = DensityStatus::Resource;
      seq.failed_n = n;
      seq.diagnostic = e.what();
      return seq;
    }
    if (out_of_budget(n, rho, "rho")) return seq;
    if (n == -1) {
      const Expr mu = variational_derivative(rho);
      if (!mu.is_zero() && jet_order(mu) == kNoJet && !depends_on_x(mu)) gauge = mu;
    } else if (gauge && n >= 2 && n % 2 == 0) {
      const Expr lambda = constant_part(variational_derivative(rho));
      if (!lambda.is_zero()) {
        const Expr kappa = -3 * lambda / *gauge;
        DensityEntry& source = seq.entries[static_cast<std::size_t>(n - 1)];
        source.theta += kappa;
        rho += rational(1, 3) * kappa * seq.rho(-1);
      }
    }
    const Expr T = total_t(rho, F.rhs());
    if (out_of_budget(n, T, "D_t rho")) return seq;
    const ExactnessReport report = is_exact(T);
    switch (report.status) {
      case ExactStatus::Exact:
        if (!report.witness) {
          seq.status = DensityStatus::Undecided;
          seq.failed_n = n;
          seq.diagnostic = "condition holds but the flux is not in the rational class: " + report.diagnostic;
          seq.entries.push_back({n, rho, Expr()});
          return seq;
        }
        seq.entries.push_back({n, rho, *report.witness});
        break;
      case ExactStatus::NotExact:
        seq.status = DensityStatus::Violated;
        seq.failed_n = n;
        seq.failed_rho = rho;
        seq.residual = report.residual;
        seq.diagnostic = "D_t rho_" + std::to_string(n) + " is not a total x-derivative";
        return seq;
      case ExactStatus::Undecided:
        seq.status = DensityStatus::Undecided;
        seq.failed_n = n;
        seq.failed_rho = rho;
        seq.residual = report.residual;
        seq.diagnostic = report.diagnostic;
        return seq;
    }
  }
  return seq;
}

bool EvenTriviality::all_trivial() const {
  return std::all_of(items.begin(), items.end(), [](const Item& i) { return i.status == ExactStatus::Exact; });
}

EvenTriviality hamiltonian_even_triviality(const FlowEquation& F, int N, const Budget& budget) {
  return hamiltonian_even_triviality(check_integrability(F, N, budget));
}

EvenTriviality hamiltonian_even_triviality(const DensitySequence& seq) {
  EvenTriviality out;
  out.run_status = seq.status;
  for (const DensityEntry& e : seq.entries) {
    if (e.n < 0 || e.n % 2 != 0) continue;
    ExactnessReport r = is_exact(e.rho);
    // theta_{n-2} is fixed only up to a constant, which moves rho_n by a multiple of rho_{-1}.
    if (r.status == ExactStatus::NotExact && jet_order(r.residual) == kNoJet && !depends_on_x(r.residual))
      r.status = ExactStatus::Exact;
    out.items.push_back({e.n, r.status, r.witness});
  }
  return out;
}

bool Calibration::agrees() const {
  return std::all_of(items.begin(), items.end(), [](const Item& i) { return i.modulo_image == Equivalence::Equal; });
}

Calibration calibrate(const FlowEquation& F, const Expr& theta_minus1) {
  DensitySequence seq(F);
  seq.entries.push_back({-1, separant_density(F), theta_minus1});
  Calibration out;
  const Expr rho0 = next_density(-2, seq);
  seq.entries.push_back({0, rho0, Expr()});
  const Expr rho1 = next_density(-1, seq);
  const Expr closed0 = closed_form_rho(0, F);
  const Expr closed1 = closed_form_rho(1, F, theta_minus1);
  int i = 0;
  for (const auto& [n, rec, closed] : {std::tuple{0, rho0, closed0}, std::tuple{1, rho1, closed1}}) {
    const Expr diff_expr = rec - closed;
    // Im D_x is annihilated by E; a constant image comes from a lambda*u term.
    const Expr image = variational_derivative(diff_expr);
    Equivalence verdict = equivalent(image, Expr()).verdict;
    if (verdict != Equivalence::Equal && jet_order(image) == kNoJet && !depends_on_x(image))
      verdict = Equivalence::Equal;
    out.items[static_cast<std::size_t>(i++)] = {n, rec, closed, diff_expr, verdict};
  }
  return out;
}

}  // namespace hamclass
