#include <gtest/gtest.h>

#include <random>

#include <condition_samples.hpp>
#include <hamclass/classify.hpp>
#include <hamclass/densities.hpp>
#include <hamclass/text.hpp>
#include <json.hpp>

using namespace hamclass;

namespace {

Expr u(int n = 0) { return jet(n); }
Expr x() { return var_x(); }
Expr c(const char* name) { return param(name); }

bool eq(const Expr& a, const Expr& b) { return equivalent(a, b).verdict == Equivalence::Equal; }

Expr coeff(const Ansatz& a, const std::string& name) {
  const auto it = a.coeffs.find(name);
  return it == a.coeffs.end() ? Expr() : it->second;
}

const Hamiltonian& catalog_h(const std::string& id) { return *catalog_get(id).hamiltonian; }

Ansatz a1(Expr q1, Expr q2, Expr q3, Expr q4) {
  return {Subcase::A1, {{"q1", q1}, {"q2", q2}, {"q3", q3}, {"q4", q4}}};
}

/// Trail replayed on the input reaches the canonical form under the bindings.
void expect_sound(const Hamiltonian& H, const ClassificationResult& r) {
  ASSERT_TRUE(r.classified());
  ASSERT_TRUE(r.obstructions.empty());
  const Hamiltonian out = r.trail.replay(H);
  EXPECT_EQ(hamiltonians_equivalent(out.expr(), canonical_form(r.canonical_id, r.bindings).expr()).verdict,
            Equivalence::Equal)
      << to_text(out.expr());
  EXPECT_TRUE(r.verified);
}

}  // namespace

TEST(DetectClass, Kdv) {
  const SeparantClass s = detect_class(Hamiltonian(-u(1) * u(1) / 2 + pow(u(), Ratio(3)) / 3));
  EXPECT_EQ(s.tag, SeparantTag::A);
  EXPECT_EQ(s.a, Expr(1));
}

TEST(DetectClass, SquareRoot) {
  const Expr P = func("P", u());
  const SeparantClass s = detect_class(Hamiltonian(4 * sqrt(u(1) + P)));
  EXPECT_EQ(s.tag, SeparantTag::B);
  EXPECT_EQ(s.lead, Expr(1));
  EXPECT_TRUE(eq(s.data, P));
}

TEST(DetectClass, SeparantU) {
  const SeparantClass s = detect_class(catalog_h("2.1c"));
  EXPECT_EQ(s.tag, SeparantTag::A);
  EXPECT_TRUE(eq(s.data, u()));
}

TEST(DetectClass, UnnormalizedLead) {
  const SeparantClass s = detect_class(Hamiltonian(sqrt(u(1) + u() * u())));
  EXPECT_EQ(s.tag, SeparantTag::B);
  EXPECT_NE(s.lead, Expr(1));
  EXPECT_TRUE(eq(s.data, u() * u()));
}

TEST(DetectClass, OutOfClass) {
  const SeparantClass s = detect_class(Hamiltonian(pow(u(1), Ratio(4)) + u() * u(1) * u(1)));
  EXPECT_EQ(s.tag, SeparantTag::OutOfClass);
  EXPECT_FALSE(s.diagnostic.empty());
}

TEST(ExtractAnsatz, QuarticA1) {
  const Hamiltonian H(-u(1) * u(1) / 2 + pow(u(), Ratio(4)) / 4);
  const Ansatz a = extract_ansatz(H, detect_class(H));
  EXPECT_EQ(a.subcase, Subcase::A1);
  EXPECT_EQ(coeff(a, "q1"), Expr(1));
  EXPECT_TRUE(coeff(a, "q2").is_zero());
  EXPECT_TRUE(coeff(a, "q3").is_zero());
  EXPECT_TRUE(coeff(a, "q4").is_zero());
}

TEST(ExtractAnsatz, CatalogA2) {
  const Hamiltonian& H = catalog_h("2.1c");
  const Ansatz a = extract_ansatz(H, detect_class(H));
  EXPECT_EQ(a.subcase, Subcase::A2);
  EXPECT_TRUE(eq(coeff(a, "q1"), c("c1")));
  EXPECT_TRUE(eq(coeff(a, "q3"), c("c2")));
  EXPECT_TRUE(coeff(a, "q2").is_zero());
  EXPECT_TRUE(coeff(a, "q4").is_zero());
}

TEST(ExtractAnsatz, CaseB) {
  const Expr q = func("q", u());
  const Hamiltonian H(u() * u() / 2 + 4 * sqrt(u(1) + pow(u(), Ratio(3)) - x() * u()));
  const Ansatz a = extract_ansatz(H, detect_class(H));
  EXPECT_EQ(a.subcase, Subcase::B);
  EXPECT_EQ(coeff(a, "h1"), Expr(1));
  EXPECT_TRUE(coeff(a, "h2").is_zero());
  EXPECT_TRUE(coeff(a, "h3").is_zero());
  EXPECT_EQ(coeff(a, "q2"), Expr(1));
  EXPECT_TRUE(eq(coeff(a, "q4"), -x()));
}

TEST(ExtractAnsatz, DropsTotalDerivatives) {
  // x u1 = D_x(x u) - u
  const Hamiltonian H(-u(1) * u(1) / 2 + x() * u(1) + pow(u(), Ratio(3)));
  const Ansatz a = extract_ansatz(H, detect_class(H));
  EXPECT_EQ(coeff(a, "q2"), Expr(3));
  EXPECT_TRUE(coeff(a, "q4").is_zero());
}

TEST(ExtractAnsatz, A3) {
  const Hamiltonian& H = catalog_h("2.1d");
  const Ansatz a = extract_ansatz(H, detect_class(H));
  EXPECT_EQ(a.subcase, Subcase::A3);
  EXPECT_EQ(coeff(a, "c"), c("c"));
  EXPECT_TRUE(eq(coeff(a, "r4"), c("c1")));
  EXPECT_TRUE(eq(coeff(a, "r5"), c("c2")));
}

TEST(ExtractAnsatz, RejectsUnnormalizedSeparant) {
  const Hamiltonian H(-u(1) * u(1) / (2 * pow(2 * u() + 1, Ratio(3))));
  EXPECT_THROW(extract_ansatz(H, detect_class(H)), PreconditionError);
  const Hamiltonian B(sqrt(u(1) + u()));
  EXPECT_THROW(extract_ansatz(B, detect_class(B)), PreconditionError);
}

TEST(ExtractAnsatz, ShapeMismatchNamesTerm) {
  const Hamiltonian H(-u(1) * u(1) / 2 + pow(u(), Ratio(5)));
  try {
    extract_ansatz(H, detect_class(H));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("u^5"), std::string::npos) << e.what();
  }
}

TEST(ConditionSystem, Shapes) {
  EXPECT_EQ(condition_system(Subcase::A1).relations.size(), 3u);
  EXPECT_EQ(condition_system(Subcase::A2).relations.size(), 3u);
  EXPECT_EQ(condition_system(Subcase::A3).relations.size(), 5u);
  const ConditionSystem b = condition_system(Subcase::B);
  EXPECT_EQ(b.relations.size(), 5u);
  EXPECT_EQ(b.names.front(), "2 q1 h1' - q1' h1 = 0");
  for (int n : condition_system(Subcase::A1).condition_n) EXPECT_EQ(n, 1);
  for (int n : b.condition_n) EXPECT_EQ(n, -1);
}

TEST(CheckConditions, A1Constant) {
  const ConditionReport r = check_conditions(a1(Expr(1), Expr(), Expr(), Expr()));
  EXPECT_TRUE(r.holds());
  EXPECT_FALSE(r.violated());
}

TEST(CheckConditions, A1FirstRelationFails) {
  const ConditionReport r = check_conditions(a1(x(), Expr(), Expr(), Expr()));
  ASSERT_TRUE(r.violated());
  EXPECT_EQ(r.relations.front().status, RelationStatus::Violated);
  EXPECT_EQ(r.relations.front().residual, Expr(1));
  EXPECT_EQ(r.first_violated_n(), 1);
}

TEST(CheckConditions, A1FlowFailsAtOne) {
  const Ansatz a = a1(x(), Expr(), Expr(), Expr());
  const DensitySequence seq = check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(a))), 1);
  EXPECT_EQ(seq.status, DensityStatus::Violated);
  EXPECT_EQ(seq.failed_n, 1);
}

TEST(CheckConditions, BConstant) {
  Ansatz a{Subcase::B, {{"h1", Expr(1)}, {"h2", Expr()}, {"h3", Expr()}}};
  for (int i = 1; i <= 5; ++i) a.coeffs["q" + std::to_string(i)] = Expr(i);
  EXPECT_TRUE(check_conditions(a).holds());
}

TEST(CheckConditions, FormalCoefficientsUndecided) {
  const ConditionReport r = check_conditions(a1(Expr(1), func("g", x()), Expr(), Expr()));
  EXPECT_FALSE(r.violated());
  EXPECT_FALSE(r.holds());
  EXPECT_EQ(r.relations[1].status, RelationStatus::Undecided);
}

TEST(CheckConditions, FromHamiltonian) {
  const ConditionReport r = check_conditions(catalog_h("2.1c"));
  EXPECT_EQ(r.subcase, Subcase::A2);
  EXPECT_TRUE(r.holds());
}

TEST(CheckConditions, PrintedA1CoefficientDisagrees) {
  // 2 q2''' + 2 q2' q3 = 4 k1 q4' as printed; integrability needs 6 k1 q4'.
  const Expr q2 = x() * x();
  const Expr q3 = q2 * q2 / 3;
  const Expr printed_q4 = integrate(2 * total_x(q2) * q3, x_id()) / 4;
  const Ansatz printed = a1(Expr(1), q2, q3, printed_q4);
  EXPECT_TRUE(check_conditions(printed).violated());
  const DensitySequence bad = check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(printed))), 1);
  EXPECT_EQ(bad.status, DensityStatus::Violated);
  EXPECT_EQ(bad.failed_n, 1);
  const Ansatz fixed = a1(Expr(1), q2, q3, printed_q4 * 4 / 6);
  EXPECT_TRUE(check_conditions(fixed).holds());
  EXPECT_EQ(check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(fixed))), 1).status, DensityStatus::Ok);
}

TEST(CheckConditions, PrintedBRelationNeedsH2Prime) {
  // Relation 2 with h2 in place of h2' rejects h1 = 1, h2 = 1, q constant, which is integrable.
  Ansatz a{Subcase::B, {{"h1", Expr(1)}, {"h2", Expr(1)}, {"h3", Expr()}}};
  for (int i = 1; i <= 5; ++i) a.coeffs["q" + std::to_string(i)] = Expr(1);
  EXPECT_TRUE(check_conditions(a).holds());
  const Expr q1 = Expr(1), q2 = Expr(1), h1 = Expr(1), h2 = Expr(1);
  EXPECT_FALSE((q2 * total_x(h1) - total_x(q2) * h1 + 4 * q1 * h2).is_zero());
  EXPECT_EQ(check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(a))), 1).status, DensityStatus::Ok);
}

class SampledConditions : public ::testing::TestWithParam<int> {};

TEST_P(SampledConditions, AgreeWithChecker) {
  gen::ConditionSampler s(static_cast<std::uint64_t>(GetParam()) * 7919 + 3);
  for (Subcase sc : {Subcase::A1, Subcase::A2, Subcase::A3}) {
    const Ansatz ok = s.satisfying(sc);
    EXPECT_TRUE(check_conditions(ok).holds()) << to_string(sc);
    EXPECT_EQ(check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(ok))), 1).status, DensityStatus::Ok)
        << to_string(sc);
    const int which = static_cast<int>(s.integer(0, gen::ConditionSampler::relation_count(sc) - 1));
    const Ansatz bad = s.violating(sc, which);
    const ConditionReport r = check_conditions(bad);
    ASSERT_TRUE(r.violated()) << to_string(sc) << " relation " << which;
    const DensitySequence seq = check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(bad))), 1);
    EXPECT_EQ(seq.status, DensityStatus::Violated) << to_string(sc);
    EXPECT_EQ(seq.failed_n, r.first_violated_n()) << to_string(sc);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SampledConditions, ::testing::Range(0, 5));

TEST(SampledConditionsB, AgreeWithChecker) {
  gen::ConditionSampler s(11);
  const Ansatz ok = s.satisfying(Subcase::B);
  EXPECT_TRUE(check_conditions(ok).holds());
  EXPECT_EQ(check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(ok))), 1).status, DensityStatus::Ok);
  for (int which = 0; which < 5; ++which) {
    const Ansatz bad = s.violating(Subcase::B, which);
    const ConditionReport r = check_conditions(bad);
    ASSERT_TRUE(r.violated()) << which;
    EXPECT_EQ(r.relations[static_cast<std::size_t>(which)].status, RelationStatus::Violated) << which;
    const DensitySequence seq = check_integrability(flow(Hamiltonian(gen::ansatz_hamiltonian(bad))), 1);
    EXPECT_EQ(seq.status, DensityStatus::Violated) << which;
    EXPECT_EQ(seq.failed_n, -1) << which;
  }
}

TEST(Normalize, QuarticByDilatation) {
  const Hamiltonian H(-u(1) * u(1) / 2 + 2 * pow(u(), Ratio(4)));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.1a");
  ASSERT_FALSE(r.trail.empty());
  EXPECT_EQ(r.trail.steps().front().kind, StepKind::Dilatation);
  expect_sound(H, r);
}

TEST(Normalize, CubicWithQuadraticTerm) {
  const Hamiltonian H(-u(1) * u(1) / 2 + pow(u(), Ratio(3)) / 3 + u() * u() / 2);
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.1b");
  ASSERT_FALSE(r.trail.empty());
  EXPECT_EQ(r.trail.steps().front().kind, StepKind::Point);
  expect_sound(H, r);
}

TEST(Normalize, ShiftRemovesLinearTerm) {
  const Hamiltonian H(c("c") * x() * u() + 4 * sqrt(u(1)));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.3");
  ASSERT_EQ(r.trail.steps().size(), 1u);
  EXPECT_EQ(r.trail.steps().front().kind, StepKind::ShiftCt);
  for (const auto& [name, value] : r.bindings) EXPECT_TRUE(value.is_zero()) << name;
  expect_sound(H, r);
}

TEST(Normalize, CaseBGalilean) {
  const Hamiltonian H(u() * u() / 2 + 4 * sqrt(u(1) + pow(u(), Ratio(4))));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.3");
  EXPECT_TRUE(eq(r.bindings.at("p4"), Expr(1)));
  expect_sound(H, r);
}

TEST(Normalize, NegativeSquareRoot) {
  const Hamiltonian H(-4 * sqrt(u(1) + u()));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.3");
  expect_sound(H, r);
}

TEST(Normalize, A2Scaling) {
  const Hamiltonian H(-u(1) * u(1) / (2 * pow(2 * u(), Ratio(3))) + pow(u(), Ratio(3)));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.1c");
  expect_sound(H, r);
}

TEST(Normalize, DegreeFiveUnclassified) {
  const Hamiltonian H(-u(1) * u(1) / 2 + pow(u(), Ratio(5)) / 5);
  const ClassificationResult r = identify(H);
  EXPECT_EQ(r.canonical_id, "unclassified");
  ASSERT_TRUE(r.conditions.has_value());
  ASSERT_TRUE(r.conditions->violated());
  EXPECT_EQ(r.conditions->first_violated_n(), 1);
  EXPECT_EQ(r.conditions->relations.front().name, "a h_5 + 5 a' h_4 + 10 a'' h_3 = 0");
  const DensitySequence seq = check_integrability(flow(H), 1);
  EXPECT_EQ(seq.status, DensityStatus::Violated);
  EXPECT_EQ(seq.failed_n, 1);
}

TEST(Normalize, A2NeedsChangeOfX) {
  // q2 = x: bringing q2 to 1 needs f' q2 = 1.
  const Hamiltonian H(-u(1) * u(1) / (2 * pow(u(), Ratio(3))) + x() * x() * pow(u(), Ratio(3)) / 3 +
                      x() * u() * u() / 2 - 1 / (x() * x() * u()));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.1c");
  ASSERT_EQ(r.obstructions.size(), 1u);
  EXPECT_TRUE(depends_on_x(r.obstructions.front()));
  EXPECT_FALSE(r.verified);
}

TEST(Normalize, BNeedsChangeOfX) {
  const Hamiltonian H(x() * u() * u() / 2 + 4 * sqrt(u(1)));
  const ClassificationResult r = normalize_algebraic(H);
  EXPECT_EQ(r.canonical_id, "2.3");
  EXPECT_EQ(r.obstructions.size(), 1u);
  EXPECT_FALSE(r.verified);
}

TEST(Normalize, SeparantOutOfClass) {
  const ClassificationResult r = identify(Hamiltonian(pow(u(1), Ratio(4)) + u() * u(1) * u(1)));
  EXPECT_EQ(r.canonical_id, "unclassified");
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Identify, CatalogIdempotent) {
  for (const std::string& id : primary_catalog_ids()) {
    const Hamiltonian& H = catalog_h(id);
    const ClassificationResult r = identify(H);
    const std::string expect = id == "2.13" ? "linear-2.13" : id;
    EXPECT_EQ(r.canonical_id, expect) << id;
    EXPECT_TRUE(r.obstructions.empty()) << id;
    EXPECT_TRUE(r.trail.empty()) << id << " " << r.trail.to_json();
    EXPECT_TRUE(r.verified) << id;
    if (r.canonical_id == id) {
      EXPECT_EQ(hamiltonians_equivalent(H.expr(), canonical_form(id, r.bindings).expr()).verdict, Equivalence::Equal)
          << id;
    }
  }
}

TEST(Identify, LinearFlow) {
  const Hamiltonian H(-u(1) * u(1) / 2 + x() * x() * u() * u() / 2 + x() * u());
  const ClassificationResult r = identify(H);
  EXPECT_EQ(r.canonical_id, "linear-2.13");
  EXPECT_TRUE(eq(r.bindings.at("f"), x() * x()));
  expect_sound(H, r);
}

class InvarianceWords : public ::testing::TestWithParam<int> {};

TEST_P(InvarianceWords, SameIdAfterGeneratorWord) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 101);
  auto pick = [&](const std::vector<Expr>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  const std::vector<Expr> scales = {Expr(2), Expr(-1), rational(1, 2), Expr(3), Expr(-2)};
  const std::vector<Expr> small = {Expr(1), Expr(-1), Expr(2), rational(1, 2)};
  for (const std::string& id : primary_catalog_ids()) {
    Hamiltonian H = catalog_h(id);
    const int len = std::uniform_int_distribution<int>(1, 3)(rng);
    std::string word;
    for (int i = 0; i < len; ++i) {
      TransformTrail t;
      switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
        case 0:
          t.push({StepKind::Dilatation, {{"alpha", pick(scales)}, {"beta", pick(scales)}, {"gamma", pick(scales)}}});
          word += "D";
          break;
        case 1:
          t.push_point(PointTransform::translation(pick(small)));
          word += "T";
          break;
        case 2:
          t.push_point(PointTransform::translation(pick(small) * x() + pick(small) * x() * x()));
          word += "G";
          break;
        case 3:
          t.push_point(PointTransform::linear(pick(scales) * x() + pick(small), pick(small) * x()));
          word += "L";
          break;
        default:
          if (depends_on_x(variational_derivative(H.expr()))) continue;
          t.push({StepKind::Galilean, {{"c", pick(small)}}});
          word += "g";
      }
      H = t.replay(H);
    }
    const ClassificationResult r = identify(H);
    const std::string expect = id == "2.13" ? "linear-2.13" : id;
    EXPECT_EQ(r.canonical_id, expect) << id << " " << word << " " << r.to_json();
    if (r.canonical_id != "linear-2.13") expect_sound(H, r);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, InvarianceWords, ::testing::Range(0, 6));

TEST(ClassificationResult, Json) {
  const Hamiltonian H(-u(1) * u(1) / 2 + 2 * pow(u(), Ratio(4)));
  const ClassificationResult r = identify(H);
  const std::string text = r.to_json();
  EXPECT_EQ(text, identify(H).to_json());
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["id"], "2.1a");
  EXPECT_TRUE(j["verified"].get<bool>());
  EXPECT_EQ(j["trail"].size(), r.trail.steps().size());
  for (const char* key : {"bindings", "obstructions", "relations", "diagnostics"}) EXPECT_TRUE(j.contains(key)) << key;
  const TransformTrail back = TransformTrail::from_json(j["trail"].dump());
  EXPECT_EQ(hamiltonians_equivalent(back.replay(H).expr(), catalog_h("2.1a").expr()).verdict, Equivalence::Equal);
}

TEST(CanonicalForm, Linear) {
  EXPECT_TRUE(eq(canonical_form("linear-2.13", {}).expr(), catalog_h("2.13").expr()));
  EXPECT_THROW(canonical_form("cd-exp", {}), PreconditionError);
}
