#pragma once

// Point transformations, the special admissible transforms, reciprocal,
// potential and hodograph transformations, and replayable trails of them.
//
// New variables reuse the old symbols: y is written x, v is written u and
// v_y, v_yy, ... are u1, u2, ...

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hamclass/densities.hpp"
#include "hamclass/hamiltonian.hpp"

namespace hamclass {

/// x = phi(y, v), u = psi(y, v).
class PointTransform {
 public:
  /// Throws PreconditionError if phi or psi depends on a jet variable beyond v.
  PointTransform(Expr phi, Expr psi);

  const Expr& phi() const { return phi_; }
  const Expr& psi() const { return psi_; }
  /// psi_v phi_y - phi_v psi_y.
  const Expr& delta() const { return delta_; }
  bool canonical() const;

  static PointTransform identity();
  /// x = f(y), u = v / f'(y) + g(y).
  static PointTransform linear(const Expr& f, const Expr& g);
  /// x = f(v) + y, u = v.
  static PointTransform shear(const Expr& f);
  /// x = beta y, u = gamma v.
  static PointTransform scaling(const Expr& beta, const Expr& gamma);
  /// x = y, u = v + s(y).
  static PointTransform translation(const Expr& s);

 private:
  Expr phi_;
  Expr psi_;
  Expr delta_;
};

/// Applies `first`, then `second` to the new variables.
PointTransform compose(const PointTransform& first, const PointTransform& second);

/// H(phi, psi, D_y psi / D_y phi) * D_y phi.  Refuses non-canonical transforms.
Hamiltonian transform_hamiltonian(const Hamiltonian& H, const PointTransform& T);

/// v_t = D_y(phi) F / Delta with u_{n+1} = D_y(u_n) / D_y(phi).  Refuses non-canonical transforms.
FlowEquation push_flow(const FlowEquation& F, const PointTransform& T);

/// alpha / (beta gamma^2) * H(beta y, gamma v, gamma v_y / beta).
Hamiltonian dilatation(const Hamiltonian& H, const Expr& alpha, const Expr& beta, const Expr& gamma);
/// H - c v^2 / 2; the flow of H must not depend on x.
Hamiltonian galilean(const Hamiltonian& H, const Expr& c);
/// H - c x u; H - c x u must be equivalent to some h(u1).
Hamiltonian shift_ct(const Hamiltonian& H, const Expr& c);

/// Flow counterparts of the special transforms; dilatation gives alpha / gamma * F(beta y, gamma beta^-n v_n).
FlowEquation dilatation(const FlowEquation& F, const Expr& alpha, const Expr& beta, const Expr& gamma);
/// F - c u1.
FlowEquation galilean(const FlowEquation& F, const Expr& c);
/// F - c.
FlowEquation shift_ct(const FlowEquation& F, const Expr& c);

/// dy = rho dx + theta dt, v(t, y) = u(t, x).  rho = rho(u), F free of x, (rho, theta) conserved.
FlowEquation reciprocal(const FlowEquation& F, const Expr& rho, const Expr& theta);

/// v = f(w), with f written in u.
FlowEquation point_substitute(const FlowEquation& F, const Expr& f);

/// u_t = Phi with u -> u_x, where F = D_x Phi.
FlowEquation potential_form(const FlowEquation& F);

/// y = u(t, x), v(t, y) = x.
FlowEquation hodograph(const FlowEquation& F);

/// tanh(z) -> (exp(2z) - 1) / (exp(2z) + 1) throughout e.
Expr tanh_to_exp(const Expr& e);

/// Scalar s with F = target - s u1, if one exists.
std::optional<Expr> galilean_parameter(const FlowEquation& F, const FlowEquation& target);

enum class StepKind { Point, Dilatation, Galilean, ShiftCt, Reciprocal, Substitute, Potential, Hodograph };
const char* to_string(StepKind k);

struct TrailStep {
  StepKind kind;
  /// Named arguments: phi, psi; alpha, beta, gamma; c; rho, theta; f.
  std::map<std::string, Expr> args;

  const Expr& arg(const std::string& name) const;
};

class TransformTrail {
 public:
  const std::vector<TrailStep>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }
  void push(TrailStep step) { steps_.push_back(std::move(step)); }
  void push_point(const PointTransform& T);
  void append(const TransformTrail& other);

  /// Throws PreconditionError on a step that acts on flows only.
  Hamiltonian replay(const Hamiltonian& H) const;
  FlowEquation replay(const FlowEquation& F) const;

  std::string to_json() const;
  /// Throws ParseError on malformed input.
  static TransformTrail from_json(std::string_view text);

 private:
  std::vector<TrailStep> steps_;
};

}  // namespace hamclass
