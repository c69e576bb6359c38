#include <gtest/gtest.h>

#include <random>

#include <hamclass/jet.hpp>
#include <hamclass/text.hpp>
#include <hamclass/transform.hpp>

using namespace hamclass;

namespace {

Expr u(int n = 0) { return jet(n); }
Expr x() { return var_x(); }
Expr c(const char* name) { return param(name); }

bool eq(const Expr& a, const Expr& b) { return equivalent(a, b).verdict == Equivalence::Equal; }

Expr kdv_h() { return -u(1) * u(1) / 2 + pow(u(), Ratio(3)) / 3; }

FlowEquation reciprocal_of(const FlowEquation& F) {
  const DensitySequence seq = check_integrability(F, -1);
  return reciprocal(F, seq.rho(-1), seq.theta(-1));
}

}  // namespace

TEST(PointTransform, Delta) {
  EXPECT_EQ(PointTransform::identity().delta(), Expr(1));
  EXPECT_TRUE(PointTransform::linear(x() * x() + x(), x()).canonical());
  EXPECT_TRUE(PointTransform::shear(u() * u()).canonical());
  EXPECT_TRUE(PointTransform::scaling(Expr(3), rational(1, 3)).canonical());
  EXPECT_FALSE(PointTransform::scaling(Expr(2), Expr(2)).canonical());
  EXPECT_TRUE(eq(PointTransform::scaling(Expr(2), Expr(5)).delta(), Expr(10)));
  EXPECT_TRUE(eq(PointTransform(x() + u(), u() * x()).delta(), x() - u()));
  EXPECT_THROW(PointTransform(x() + u(1), u()), PreconditionError);
}

TEST(PointTransform, CompositionMultipliesDelta) {
  const PointTransform a = PointTransform::scaling(Expr(2), Expr(3));
  const PointTransform b(x() + u() * u(), u());
  const PointTransform ab = compose(a, b);
  EXPECT_TRUE(eq(ab.delta(), Expr(6)));
  const PointTransform s = compose(PointTransform::linear(x() * x() * x() + x(), x()), PointTransform::shear(u() * u()));
  EXPECT_TRUE(s.canonical());
}

TEST(TransformHamiltonian, Identity) {
  const Hamiltonian H(kdv_h());
  EXPECT_EQ(transform_hamiltonian(H, PointTransform::identity()).expr(), H.expr());
}

TEST(TransformHamiltonian, LinearChangeOfX) {
  const Expr f = 3 * x() + 1;
  const Hamiltonian H(kdv_h());
  const Expr expected = 3 * (-u(1) * u(1) / 162 + pow(u() / 3, Ratio(3)) / 3);
  EXPECT_TRUE(eq(transform_hamiltonian(H, PointTransform::linear(f, Expr())).expr(), expected));
}

TEST(TransformHamiltonian, Shear) {
  const Expr f = u() * u();
  const Hamiltonian H(kdv_h());
  const Expr phi_y = diff(f, jet_id(0)) * u(1) + 1;
  const Expr Hs = -pow(u(1) / phi_y, Ratio(2)) / 2 + pow(u(), Ratio(3)) / 3;
  EXPECT_TRUE(eq(transform_hamiltonian(H, PointTransform::shear(f)).expr(), Hs * phi_y));
}

TEST(TransformHamiltonian, RefusesNonCanonical) {
  const Hamiltonian H(kdv_h());
  const PointTransform T = PointTransform::scaling(Expr(2), Expr(2));
  EXPECT_THROW(transform_hamiltonian(H, T), PreconditionError);
  EXPECT_THROW(push_flow(flow(H), T), PreconditionError);
}

TEST(SpecialTransforms, GalileanOnKdv) {
  const Hamiltonian H = galilean(Hamiltonian(kdv_h()), c("c"));
  EXPECT_TRUE(eq(flow(H).rhs(), u(3) + 2 * u() * u(1) - c("c") * u(1)));
  EXPECT_TRUE(eq(galilean(flow(Hamiltonian(kdv_h())), c("c")).rhs(), flow(H).rhs()));
  EXPECT_THROW(galilean(Hamiltonian(kdv_h() + x() * u()), Expr(1)), PreconditionError);
}

TEST(SpecialTransforms, DilatationIdentity) {
  const Hamiltonian H(kdv_h());
  EXPECT_EQ(dilatation(H, Expr(1), Expr(1), Expr(1)).expr(), H.expr());
  EXPECT_EQ(dilatation(flow(H), Expr(1), Expr(1), Expr(1)).rhs(), flow(H).rhs());
}

TEST(SpecialTransforms, DilatationCommutes) {
  const Hamiltonian H(kdv_h());
  for (const auto& [a, b, g] : {std::tuple{2, 3, 5}, {-1, 2, 1}, {3, -1, 2}}) {
    const Expr A(a), B(b), G(g);
    EXPECT_TRUE(eq(flow(dilatation(H, A, B, G)).rhs(), dilatation(flow(H), A, B, G).rhs())) << a << b << g;
  }
}

TEST(SpecialTransforms, ShiftCt) {
  const Expr s = 4 * sqrt(u(1));
  const Hamiltonian H(c("c") * x() * u() + s);
  EXPECT_TRUE(eq(shift_ct(H, c("c")).expr(), s));
  EXPECT_TRUE(eq(flow(shift_ct(H, c("c"))).rhs(), shift_ct(flow(H), c("c")).rhs()));
  EXPECT_THROW(shift_ct(Hamiltonian(kdv_h()), Expr(1)), PreconditionError);
}

TEST(Reciprocal, UnitDensity) {
  const FlowEquation F(u(3) + 2 * u() * u(1));
  const FlowEquation G = reciprocal(F, Expr(1), Expr());
  EXPECT_EQ(G.rhs(), F.rhs());
  const FlowEquation K = reciprocal(F, Expr(1), c("k"));
  EXPECT_TRUE(eq(K.rhs(), F.rhs() - c("k") * u(1)));
}

TEST(Reciprocal, PreconditionsAndConsistency) {
  EXPECT_THROW(reciprocal(FlowEquation(u(3) + x() * u(1)), Expr(1), Expr()), PreconditionError);
  const FlowEquation G = reciprocal_of(catalog_get("2.1c").flow);
  EXPECT_EQ(check_integrability(G, 3).status, DensityStatus::Ok);
}

TEST(Chains, ReciprocalToExponential) {
  const FlowEquation w = point_substitute(reciprocal_of(catalog_get("2.1c").flow), func("exp", u()));
  EXPECT_TRUE(eq(w.rhs(), catalog_get("cd-exp").flow.rhs()));
}

TEST(Chains, ReciprocalToModifiedKdv) {
  const CatalogEntry e = specialize(catalog_get("2.1d"), {{"c", Expr()}});
  const FlowEquation w = point_substitute(reciprocal_of(e.flow), inverse(u()));
  EXPECT_TRUE(eq(w.rhs(), catalog_get("mkdv-w").flow.rhs()));
}

TEST(Chains, ReciprocalToTanh) {
  const Expr k = c("k");
  const CatalogEntry e = specialize(catalog_get("2.1d"), {{"c", -k * k / 4}});
  const FlowEquation w = point_substitute(reciprocal_of(e.flow), k / 2 * func("tanh", u() / 2));
  const std::optional<Expr> s = galilean_parameter(FlowEquation(tanh_to_exp(w.rhs())), catalog_get("cd-tanh").flow);
  ASSERT_TRUE(s);
  EXPECT_TRUE(eq(*s, Expr()));
}

TEST(Chains, PotentialHodograph) {
  const FlowEquation p = potential_form(catalog_get("2.2").flow);
  const FlowEquation h = hodograph(p);
  EXPECT_TRUE(eq(h.rhs(), catalog_get("kn").flow.rhs()));
  EXPECT_TRUE(eq(hodograph(h).rhs(), p.rhs()));
}

TEST(Hodograph, Involution) {
  for (const Expr& F : {u(3) + u(1) * u(1) * u(1), u(3) - rational(3, 2) * u(2) * u(2) / u(1) + x() * u(1),
                        u(3) + u() * u(1) + x()}) {
    const FlowEquation G(F);
    EXPECT_TRUE(eq(hodograph(hodograph(G)).rhs(), F)) << to_text(F);
  }
}

TEST(Potential, RejectsNonExact) {
  EXPECT_THROW(potential_form(FlowEquation(u(3) + u() * u() * u(2))), PreconditionError);
  EXPECT_TRUE(eq(potential_form(FlowEquation(u(3) + 2 * u() * u(1))).rhs(), u(3) + u(1) * u(1)));
}

TEST(GalileanParameter, FindsShift) {
  const FlowEquation target(u(3) + 2 * u() * u(1));
  const auto s = galilean_parameter(FlowEquation(target.rhs() - 5 * u(1)), target);
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, Expr(5));
  EXPECT_FALSE(galilean_parameter(FlowEquation(target.rhs() + u()), target));
  EXPECT_FALSE(galilean_parameter(FlowEquation(target.rhs() + x() * u(1)), target));
}

TEST(TanhToExp, Rewrites) {
  const Expr t = tanh_to_exp(func("tanh", u()));
  const Expr e = func("exp", u());
  EXPECT_TRUE(eq(t, (e * e - 1) / (e * e + 1)));
  EXPECT_EQ(tanh_to_exp(u() * u()), u() * u());
}

TEST(Trail, JsonRoundTripAndReplay) {
  TransformTrail trail;
  trail.push_point(PointTransform::shear(u() * u()));
  trail.push({StepKind::Dilatation, {{"alpha", Expr(2)}, {"beta", Expr(3)}, {"gamma", rational(1, 2)}}});
  trail.push({StepKind::Galilean, {{"c", c("c")}}});
  const TransformTrail back = TransformTrail::from_json(trail.to_json());
  ASSERT_EQ(back.steps().size(), 3u);
  EXPECT_EQ(back.to_json(), trail.to_json());
  const Hamiltonian H(kdv_h());
  EXPECT_TRUE(eq(flow(trail.replay(H)).rhs(), back.replay(flow(H)).rhs()));
  const TransformTrail wrapped = TransformTrail::from_json("{\"trail\": " + trail.to_json() + "}");
  EXPECT_EQ(wrapped.steps().size(), 3u);
}

TEST(Trail, FlowOnlySteps) {
  TransformTrail trail;
  trail.push({StepKind::Potential, {}});
  EXPECT_THROW(trail.replay(Hamiltonian(kdv_h())), PreconditionError);
  EXPECT_TRUE(eq(trail.replay(FlowEquation(u(3) + 2 * u() * u(1))).rhs(), u(3) + u(1) * u(1)));
}

TEST(Trail, RejectsMalformed) {
  EXPECT_THROW(TransformTrail::from_json("not json"), ParseError);
  EXPECT_THROW(TransformTrail::from_json("[{\"kind\": \"warp\"}]"), ParseError);
  EXPECT_THROW(TransformTrail::from_json("{\"steps\": 3}"), ParseError);
  EXPECT_EQ(std::string(to_string(StepKind::Substitute)), "point_substitute");
}

class CommutingSquare : public ::testing::TestWithParam<int> {};

TEST_P(CommutingSquare, FlowOfTransformedHamiltonian) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) * 2654435761u + 1);
  auto rint = [&](int lo, int hi) { return Expr(std::uniform_int_distribution<int>(lo, hi)(rng)); };
  auto nonzero = [&] {
    Expr v;
    while (v.is_zero()) v = rint(-3, 3);
    return v;
  };
  const int family = GetParam() % 3;
  PointTransform T = PointTransform::identity();
  if (family == 0)
    T = PointTransform::linear(nonzero() * x() + rint(-2, 2) * x() * x() + rint(-2, 2),
                               rint(-2, 2) * x() + rint(-2, 2) * x() * x());
  else if (family == 1)
    T = PointTransform::shear(rint(-2, 2) * u() * u() + nonzero() * u());
  else {
    const Expr b = nonzero() / std::uniform_int_distribution<int>(1, 3)(rng);
    T = PointTransform::scaling(b, inverse(b));
  }
  for (const char* id : {"2.1b", "2.1c"}) {
    const Hamiltonian& H = *catalog_get(id).hamiltonian;
    const Expr lhs = flow(transform_hamiltonian(H, T)).rhs();
    const Expr rhs = push_flow(flow(H), T).rhs();
    EXPECT_TRUE(eq(lhs, rhs)) << id << " " << to_text(T.phi()) << " " << to_text(T.psi());
  }
}

INSTANTIATE_TEST_SUITE_P(Random, CommutingSquare, ::testing::Range(0, 24));
