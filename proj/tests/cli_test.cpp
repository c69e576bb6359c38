#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <hamclass/classify.hpp>
#include <hamclass/cli.hpp>
#include <hamclass/text.hpp>
#include <json.hpp>

using namespace hamclass;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

const char* kKdv = "-(1/2)*u1^2+(1/3)*u^3";

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, CheckKdvPasses) {
  const Result r = run({"check", "--order", "3", "--hamiltonian", kKdv});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pass"), std::string::npos);
}

TEST(Cli, CatalogVerifyJson) {
  const Result r = run({"catalog", "verify", "2.1c", "--order", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["schema"], "1");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["id"], "2.1c");
  EXPECT_EQ(j["conditions"].size(), 5u);
}

TEST(Cli, DegreeFiveViolated) {
  const Result r = run({"check", "--order", "1", "--hamiltonian", "-(1/2)*u1^2+(1/5)*u^5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("residual"), std::string::npos);
  const Result j = run({"check", "--order", "1", "--format", "json", "--hamiltonian", "-(1/2)*u1^2+(1/5)*u^5"});
  const auto doc = json_of(j);
  EXPECT_EQ(doc["status"], "violated");
  EXPECT_EQ(doc["failed_n"], 1);
  EXPECT_FALSE(doc["conditions"].back()["residual"].is_null());
}

TEST(Cli, ParseErrorHasCaret) {
  const Result r = run({"check", "--hamiltonian", "u^^2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("u^^2"), std::string::npos);
  EXPECT_NE(r.err.find("^\n"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"check", "--hamiltonian", kKdv, "--equation", "u3"}).code, 2);
  EXPECT_EQ(run({"check", "--format", "yaml", "--hamiltonian", kKdv}).code, 2);
  EXPECT_EQ(run({"check", "--assume", "c<0", "--hamiltonian", kKdv}).code, 2);
  EXPECT_EQ(run({"check"}).code, 2);
  EXPECT_EQ(run({"classify", "--hamiltonian", "@/nonexistent/h.txt"}).code, 2);
  EXPECT_EQ(run({"catalog", "verify", "9.9"}).code, 2);
  EXPECT_EQ(run({"flow", "--hamiltonian", "u^2"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("classify"), std::string::npos);
}

TEST(Cli, InputFromStdinAndFile) {
  const Result s = run({"flow", "--hamiltonian", "-"}, kKdv);
  ASSERT_EQ(s.code, 0) << s.err;
  const auto path = temp_file("hamclass_cli_kdv.txt", kKdv);
  const Result f = run({"flow", "--hamiltonian", "@" + path.string()});
  EXPECT_EQ(f.out, s.out);
  EXPECT_EQ(s.out, "u_t = u3 + 2*u*u1\n");
}

TEST(Cli, TextRoundTrips) {
  const Result r = run({"flow", "--hamiltonian", "4*(u1 + P(u))^(1/2)"});
  ASSERT_EQ(r.code, 0);
  const std::string rhs = r.out.substr(6, r.out.size() - 7);
  const Hamiltonian H(parse_expr("4*(u1 + P(u))^(1/2)"));
  EXPECT_EQ(parse_expr(rhs), flow(H).rhs());
}

TEST(Cli, JsonIsDeterministic) {
  const std::vector<std::string> args = {"densities", "--max-n", "2", "--format", "json", "--hamiltonian", kKdv};
  const Result a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  const auto j = json_of(a);
  for (const char* key : {"schema", "command", "status", "conditions", "trail", "id", "bindings"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["conditions"][0]["n"], -1);
  EXPECT_EQ(j["conditions"][0]["rho"], "1");
}

TEST(Cli, ExitCodeFollowsStatus) {
  const std::vector<std::vector<std::string>> cases = {
      {"check", "--order", "2", "--format", "json", "--hamiltonian", kKdv},
      {"check", "--order", "1", "--format", "json", "--hamiltonian", "-(1/2)*u1^2+u^5"},
      {"check", "--order", "3", "--format", "json", "--node-budget", "1", "--hamiltonian", kKdv},
      {"classify", "--format", "json", "--hamiltonian", "-(1/2)*u1^2+u^5"},
      {"classify", "--format", "json", "--hamiltonian", kKdv},
  };
  const std::map<std::string, int> expected = {{"ok", 0}, {"violated", 1}, {"undecided", 3}, {"resource", 3}};
  for (const auto& args : cases) {
    const Result r = run(args);
    const auto j = json_of(r);
    EXPECT_EQ(r.code, expected.at(j["status"].get<std::string>())) << r.out;
  }
}

TEST(Cli, NodeBudget) {
  const Result r = run({"check", "--node-budget", "1", "--format", "json", "--hamiltonian", kKdv});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json_of(r)["status"], "resource");
  ::setenv(cli::kNodeBudgetEnv, "1", 1);
  EXPECT_EQ(run({"check", "--hamiltonian", kKdv}).code, 3);
  ::setenv(cli::kNodeBudgetEnv, "many", 1);
  EXPECT_EQ(run({"check", "--hamiltonian", kKdv}).code, 2);
  ::unsetenv(cli::kNodeBudgetEnv);
  EXPECT_EQ(run({"check", "--hamiltonian", kKdv}).code, 0);
}

TEST(Cli, EquationInput) {
  const Result r = run({"check", "--order", "3", "--equation", "u3 + 6*u*u1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const Result v = run({"check", "--order", "1", "--equation", "u3 + u^2*u2"});
  EXPECT_EQ(v.code, 1);
}

TEST(Cli, Vder) {
  EXPECT_EQ(run({"vder", "u*u1^2"}).out, "-2*u*u2 - u1^2\n");
  EXPECT_EQ(run({"vder", "--hamiltonian", kKdv}).out, "u2 + u^2\n");
}

TEST(Cli, Transform) {
  TransformTrail t;
  t.push({StepKind::Dilatation, {{"alpha", Expr(2)}, {"beta", Expr(1)}, {"gamma", Expr(1)}}});
  const auto path = temp_file("hamclass_cli_trail.json", t.to_json());
  const Result r = run({"transform", "--spec", path.string(), "--format", "json", "--hamiltonian", kKdv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(parse_expr(j["hamiltonian"].get<std::string>()), t.replay(Hamiltonian(parse_expr(kKdv))).expr());
  EXPECT_EQ(j["trail"].size(), 1u);
  const auto bad = temp_file("hamclass_cli_bad.json", "[{\"kind\": \"warp\"}]");
  EXPECT_EQ(run({"transform", "--spec", bad.string(), "--hamiltonian", kKdv}).code, 2);
}

TEST(Cli, Reciprocal) {
  const std::string h21c = "-(1/2)*u^(-3)*u1^2 + (1/3)*c1*u^3 - c2/u";
  const Result r = run({"reciprocal", "--format", "json", "--hamiltonian", h21c});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["rho"], "u");
  const Expr G = parse_expr(j["flow"].get<std::string>());
  EXPECT_EQ(jet_order(G), 3);
}

TEST(Cli, Classify) {
  const Result r = run({"classify", "--format", "json", "--hamiltonian", "-(1/2)*u1^2 + 2*u^4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["id"], "2.1a");
  EXPECT_EQ(j["trail"].size(), 1u);
  EXPECT_TRUE(j["verified"].get<bool>());
  const Result u = run({"classify", "--format", "json", "--hamiltonian", "-(1/2)*u1^2 + u^5/5"});
  EXPECT_EQ(u.code, 1);
  EXPECT_TRUE(json_of(u)["id"].is_null());
  EXPECT_EQ(json_of(u)["relations"][0]["status"], "violated");
}

TEST(Cli, CatalogList) {
  const Result r = run({"catalog", "list", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r);
  EXPECT_EQ(j["entries"].size(), catalog_ids().size());
  EXPECT_NE(run({"catalog", "list"}).out.find("2.1a\tH = -(1/2)*u1^2 + (1/4)*u^4"), std::string::npos);
}

TEST(Cli, Latex) {
  const Result r = run({"densities", "--max-n", "1", "--format", "latex", "--hamiltonian", kKdv});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\\rho_{-1} &= 1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\\begin{aligned}"), std::string::npos);
}

TEST(Cli, AssumeAccepted) {
  EXPECT_EQ(run({"check", "--assume", "c>0", "--order", "1", "--hamiltonian", "-(1/2)*u1^2 + c*u^3"}).code, 0);
}
