#pragma once

// Canonical densities of u_t = F(x, u, u1, u2, u3) and the integrability checker.

#include <array>
#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "hamclass/expr.hpp"
#include "hamclass/jet.hpp"

namespace hamclass {

/// Right-hand side of a third-order evolution equation with cached partials.
class FlowEquation {
 public:
  /// Throws PreconditionError unless F has jet order exactly 3.
  explicit FlowEquation(Expr F);

  const Expr& rhs() const { return F_; }
  /// F_n = dF/du_n for n = 0..3.
  const Expr& partial(int n) const;
  /// Names of the parameters occurring in F, sorted.
  const std::vector<std::string>& parameters() const { return params_; }

 private:
  Expr F_;
  std::array<Expr, 4> partials_;
  std::vector<std::string> params_;
};

/// rho_{-1} = F_3^(-1/3) with the real odd root.
Expr separant_density(const FlowEquation& F);

/// Sum of rho_{I1}...rho_{Ik} over I1 + ... + Ik = b with every Is >= a.
/// Indices below -1 contribute zero; other missing indices raise PreconditionError.
Expr multi_index_sum(const std::map<int, Expr>& rhos, int a, int b, int k);

enum class DensityStatus { Ok, Violated, Undecided, Resource };
const char* to_string(DensityStatus s);

struct DensityEntry {
  int n;
  Expr rho;
  Expr theta;
};

struct DensitySequence {
  explicit DensitySequence(FlowEquation f) : flow(std::move(f)) {}

  FlowEquation flow;
  /// Contiguous from n = -1.
  std::vector<DensityEntry> entries;
  DensityStatus status = DensityStatus::Ok;
  /// Index of the failing condition when status != Ok.
  int failed_n = 0;
  /// E(D_t rho_n) for a violation.
  Expr residual;
  /// rho_{failed_n} when the run stopped at a condition rather than a budget.
  Expr failed_rho;
  std::string diagnostic;

  /// rho_n; zero for n < -1.  Throws PreconditionError if not yet computed.
  const Expr& rho(int n) const;
  const Expr& theta(int n) const;
  std::map<int, Expr> rhos() const;
};

/// rho_{n+2} from the recursion for n >= -2, evaluated literally as printed.
Expr next_density(int n, const DensitySequence& seq);

/// Printed closed forms of rho_{-1}, rho_0 and rho_1 (theta_minus1 is used for n = 1).
Expr closed_form_rho(int n, const FlowEquation& F, const Expr& theta_minus1 = Expr());

struct Budget {
  /// Largest node count of any rho_n or D_t rho_n.
  std::size_t max_nodes = 2'000'000;
  /// Checked between steps.
  std::chrono::milliseconds wall{std::chrono::minutes(10)};
};

/// Computes rho_n, theta_n for n = -1..N and stops at the first failing condition.
DensitySequence check_integrability(const FlowEquation& F, int N, const Budget& budget = {});

struct EvenTriviality {
  struct Item {
    int n;
    ExactStatus status;
    std::optional<Expr> witness;
  };
  std::vector<Item> items;
  /// Status of the underlying density run.
  DensityStatus run_status = DensityStatus::Ok;
  bool all_trivial() const;
};

/// For each even n <= N reached by check_integrability, whether rho_n lies in Im D_x
/// up to terms with constant Euler derivative.
EvenTriviality hamiltonian_even_triviality(const FlowEquation& F, int N, const Budget& budget = {});
/// Same, for an existing run.
EvenTriviality hamiltonian_even_triviality(const DensitySequence& seq);

/// Recursion against the printed closed forms for rho_0 and rho_1.
struct Calibration {
  struct Item {
    int n;
    Expr recursion;
    Expr closed_form;
    /// recursion - closed_form.
    Expr discrepancy;
    /// E(discrepancy) is constant.
    Equivalence modulo_image;
  };
  std::array<Item, 2> items;
  bool agrees() const;
};

/// theta_minus1 is the flux of D_t rho_{-1}.
Calibration calibrate(const FlowEquation& F, const Expr& theta_minus1);

/// The recursion's rho_0 differs from the printed closed form by this term.
Expr rho0_correction(const FlowEquation& F);

}  // namespace hamclass
