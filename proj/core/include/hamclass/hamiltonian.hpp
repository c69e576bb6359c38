#pragma once

// Hamiltonians H(x, u, u1), their flows u_t = D_x E(H), and the catalog of
// integrable canonical forms.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamclass/densities.hpp"
#include "hamclass/expr.hpp"

namespace hamclass {

class Hamiltonian {
 public:
  /// Throws PreconditionError unless H depends on x, u, u1 only and d^2H/du1^2 != 0.
  explicit Hamiltonian(Expr H, std::string label = {}, std::vector<std::string> positive = {});

  const Expr& expr() const { return H_; }
  const std::string& label() const { return label_; }
  /// Parameter names occurring in H, sorted.
  const std::vector<std::string>& parameters() const { return params_; }
  /// Parameters assumed positive.
  const std::vector<std::string>& positive() const { return positive_; }

 private:
  Expr H_;
  std::string label_;
  std::vector<std::string> params_;
  std::vector<std::string> positive_;
};

/// u_t = D_x(E(H)).
FlowEquation flow(const Hamiltonian& H);

/// a with d^2H/du1^2 = -a^(-3).
Expr separant_from_H(const Hamiltonian& H);

/// Equal when E(H1 - H2) is a constant.
EquivalenceResult hamiltonians_equivalent(const Expr& H1, const Expr& H2);

struct CatalogEntry {
  std::string id;
  std::optional<Hamiltonian> hamiltonian;
  FlowEquation flow;
  Expr expected_separant;
  /// Relations among parameters and functions, each required to vanish.
  std::vector<Expr> constraints;
  std::string notes;
  /// The right-hand side as printed, compared against flow when a Hamiltonian is present.
  Expr printed_flow;
  /// Whether the flow contains fractional powers.
  bool has_radicals = false;
};

/// Catalog ids in a fixed order.
const std::vector<std::string>& catalog_ids();
/// The eight entries of the classification statement and its canonical forms.
const std::vector<std::string>& primary_catalog_ids();
/// Accepts the stable ids and the aliases kdv, mkdv, linear-2.13.  Throws PreconditionError for unknown ids.
const CatalogEntry& catalog_get(std::string_view id);

/// Entry with parameters (and the formal function P of a polynomial entry) bound.
CatalogEntry specialize(const CatalogEntry& entry, const std::map<std::string, Expr>& bindings);

struct CatalogReport {
  explicit CatalogReport(DensitySequence s) : sequence(std::move(s)) {}

  std::string id;
  DensitySequence sequence;
  std::optional<EvenTriviality> even;
  /// separant_from_H against the expected separant and separant_density(flow).
  Equivalence separant = Equivalence::Equal;
  /// flow(H) against the printed right-hand side.
  Equivalence printed = Equivalence::Equal;
  std::vector<std::string> problems;

  DensityStatus status() const;
};

CatalogReport catalog_verify(const CatalogEntry& entry, int N, const Budget& budget = {});
CatalogReport catalog_verify(std::string_view id, int N, const Budget& budget = {});

}  // namespace hamclass
