#pragma once

// Classification of Hamiltonians H(x, u, u1) up to canonical transformations:
// separant class, coefficient ansatz, condition systems, algebraic
// normalization and identification of the canonical form.

#include <map>
#include <string>
#include <vector>

#include "hamclass/hamiltonian.hpp"
#include "hamclass/transform.hpp"

namespace hamclass {

enum class SeparantTag { A, B, OutOfClass };
const char* to_string(SeparantTag t);

struct SeparantClass {
  SeparantTag tag = SeparantTag::OutOfClass;
  /// The separant a.
  Expr a;
  /// A: a(x, u).  B: q(x, u) with a^2 = lead (u1 + q).
  Expr data;
  /// B: coefficient of u1 in a^2 (1 once normalized).
  Expr lead;
  /// Out of class: the offending quantity.
  Expr residual;
  std::string diagnostic;
};

SeparantClass detect_class(const Hamiltonian& H);

enum class Subcase { A1, A2, A3, B };
const char* to_string(Subcase s);

/// Coefficient functions of the subcase normal forms
///   A.1: -u1^2/2 + q1 u^4/4 + q2 u^3/3 + q3 u^2/2 + q4 u
///   A.2: -u1^2/(2u^3) + q1 u^3/3 + q2 u^2/2 - q3/u + q4 u
///   A.3: -u1^2/(2a^3) + (r1 u^4 + ... + r5)/a, a = u^2 + c
///   B:   h1 u^2/2 + h2 u + 4 sqrt(u1 + q1 u^4 + ... + q5)
/// Terms that are total derivatives or constant multiples of u are dropped.
struct Ansatz {
  Subcase subcase = Subcase::A1;
  std::map<std::string, Expr> coeffs;
};

/// Throws PreconditionError when the separant is not in normalized form
/// (a = 1, u, u^2 + c, or sqrt(u1 + q)) or H does not have the subcase shape.
Ansatz extract_ansatz(const Hamiltonian& H, const SeparantClass& cls);

struct ConditionSystem {
  Subcase context = Subcase::A1;
  std::vector<std::string> names;
  /// Relations in formal functions q1(x), ... required to vanish.
  std::vector<Expr> relations;
  /// Integrability condition index each relation comes from.
  std::vector<int> condition_n;
};

ConditionSystem condition_system(Subcase s);

enum class RelationStatus { Holds, Violated, Undecided };
const char* to_string(RelationStatus s);

struct RelationCheck {
  std::string name;
  int condition_n = 0;
  Expr residual;
  RelationStatus status = RelationStatus::Undecided;
};

struct ConditionReport {
  Subcase subcase = Subcase::A1;
  std::vector<RelationCheck> relations;

  bool holds() const;
  bool violated() const;
  /// Smallest condition index among the violated relations.
  int first_violated_n() const;
};

ConditionReport check_conditions(const Ansatz& ansatz);
/// Normalizes the separant, extracts the ansatz and checks its system.
ConditionReport check_conditions(const Hamiltonian& H);

struct ClassificationResult {
  /// Catalog id, "linear-2.13" or "unclassified".
  std::string canonical_id = "unclassified";
  std::map<std::string, Expr> bindings;
  TransformTrail trail;
  /// Equations that still have to be solved before the trail is complete.
  std::vector<Expr> obstructions;
  std::vector<std::string> diagnostics;
  std::optional<ConditionReport> conditions;
  /// Replaying the trail was checked against the canonical form.
  bool verified = false;

  bool classified() const { return canonical_id != "unclassified"; }
  std::string to_json() const;
};

ClassificationResult normalize_algebraic(const Hamiltonian& H);
ClassificationResult identify(const Hamiltonian& H);

/// The Hamiltonian of a canonical id under parameter bindings.
Hamiltonian canonical_form(const std::string& id, const std::map<std::string, Expr>& bindings);

}  // namespace hamclass
