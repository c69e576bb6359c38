#include "hamclass/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

#include "hamclass/classify.hpp"
#include "hamclass/text.hpp"
#include "hamclass/transform.hpp"

namespace hamclass::cli {

namespace {

using Json = nlohmann::ordered_json;

/// Bad flags, unreadable files or malformed input; exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string format = "text";
  std::string hamiltonian;
  std::string equation;
  double timeout = 0;
  std::size_t node_budget = 0;
  std::vector<std::string> assume;
  int order = 3;
  std::string spec;
  std::string rho;
  std::string theta;
  std::string expr;
  std::string catalog_id;
  bool all = false;
};

struct Source {
  std::string text;
  std::string origin;
};

struct Report {
  Json json;
  std::string text;
  std::string latex;
  int code = kPass;
};

Source read_source(const std::string& value, std::istream& in) {
  if (value == "-") {
    std::stringstream ss;
    ss << in.rdbuf();
    return {ss.str(), "stdin"};
  }
  if (!value.empty() && value.front() == '@') {
    const std::string path = value.substr(1);
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return {ss.str(), path};
  }
  return {value, "argument"};
}

Expr parse_source(const Source& src) {
  try {
    return parse_expr(src.text);
  } catch (const ParseError& e) {
    throw UsageError(src.origin + ": " + e.what());
  }
}

const char* status_name(DensityStatus s) {
  switch (s) {
    case DensityStatus::Ok: return "ok";
    case DensityStatus::Violated: return "violated";
    case DensityStatus::Undecided: return "undecided";
    case DensityStatus::Resource: return "resource";
  }
  return "undecided";
}

int exit_for(DensityStatus s) {
  switch (s) {
    case DensityStatus::Ok: return kPass;
    case DensityStatus::Violated: return kViolated;
    default: return kUndecided;
  }
}

/// Severity for combining several runs: a definite violation dominates.
int severity(DensityStatus s) {
  switch (s) {
    case DensityStatus::Ok: return 0;
    case DensityStatus::Undecided: return 1;
    case DensityStatus::Resource: return 2;
    case DensityStatus::Violated: return 3;
  }
  return 1;
}

Json document(const std::string& command, const char* status) {
  Json j;
  j["schema"] = "1";
  j["command"] = command;
  j["status"] = status;
  j["conditions"] = Json::array();
  j["trail"] = Json::array();
  j["id"] = nullptr;
  j["bindings"] = Json::object();
  return j;
}

std::string n_label(int n) { return std::to_string(n); }

Json conditions_json(const DensitySequence& seq) {
  Json out = Json::array();
  for (const DensityEntry& e : seq.entries) {
    const bool failed = seq.status != DensityStatus::Ok && e.n == seq.failed_n;
    Json c;
    c["n"] = e.n;
    c["rho"] = to_text(e.rho);
    c["theta"] = failed ? Json(nullptr) : Json(to_text(e.theta));
    c["residual"] = failed && seq.status == DensityStatus::Violated ? Json(to_text(seq.residual)) : Json(nullptr);
    out.push_back(std::move(c));
  }
  const bool stopped = seq.status == DensityStatus::Violated || seq.status == DensityStatus::Undecided;
  if (stopped && (seq.entries.empty() || seq.entries.back().n != seq.failed_n)) {
    Json c;
    c["n"] = seq.failed_n;
    c["rho"] = to_text(seq.failed_rho);
    c["theta"] = nullptr;
    c["residual"] = seq.status == DensityStatus::Violated ? Json(to_text(seq.residual)) : Json(nullptr);
    out.push_back(std::move(c));
  }
  return out;
}

std::string sequence_text(const DensitySequence& seq, int N, bool listing) {
  std::ostringstream os;
  if (listing) {
    for (const DensityEntry& e : seq.entries) {
      os << "rho_" << n_label(e.n) << " = " << to_text(e.rho) << "\n";
      if (!(seq.status != DensityStatus::Ok && e.n == seq.failed_n))
        os << "theta_" << n_label(e.n) << " = " << to_text(e.theta) << "\n";
    }
  }
  switch (seq.status) {
    case DensityStatus::Ok: os << "pass: conditions n = -1.." << N << " hold\n"; break;
    case DensityStatus::Violated:
      os << "violated at n = " << seq.failed_n << "\nresidual: " << to_text(seq.residual) << "\n";
      break;
    default: os << status_name(seq.status) << " at n = " << seq.failed_n << ": " << seq.diagnostic << "\n";
  }
  return os.str();
}

std::string sequence_latex(const DensitySequence& seq) {
  std::ostringstream os;
  os << "\\begin{aligned}\n";
  for (const DensityEntry& e : seq.entries) {
    os << "\\rho_{" << e.n << "} &= " << to_latex(e.rho) << " \\\\\n";
    if (!(seq.status != DensityStatus::Ok && e.n == seq.failed_n))
      os << "\\theta_{" << e.n << "} &= " << to_latex(e.theta) << " \\\\\n";
  }
  if (seq.status == DensityStatus::Violated)
    os << "\\mathcal{E}(D_t\\rho_{" << seq.failed_n << "}) &= " << to_latex(seq.residual) << "\n";
  os << "\\end{aligned}\n";
  return os.str();
}

class Runner {
 public:
  Runner(const Options& o, std::istream& in) : o_(o), in_(in) {}

  Budget budget() const {
    Budget b;
    if (o_.node_budget > 0) {
      b.max_nodes = o_.node_budget;
    } else if (const char* env = std::getenv(kNodeBudgetEnv)) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0' || v == 0) throw UsageError(std::string(kNodeBudgetEnv) + " is not a positive integer");
      b.max_nodes = static_cast<std::size_t>(v);
    }
    if (o_.timeout > 0) b.wall = std::chrono::milliseconds(static_cast<long long>(std::llround(o_.timeout * 1000)));
    return b;
  }

  std::vector<std::string> positives() const {
    static const std::regex form(R"(\s*([A-Za-z_][A-Za-z0-9_]*)\s*>\s*0\s*)");
    std::vector<std::string> out;
    for (const std::string& a : o_.assume) {
      std::smatch m;
      if (!std::regex_match(a, m, form)) throw UsageError("--assume expects name>0, got '" + a + "'");
      out.push_back(m[1]);
    }
    return out;
  }

  bool has_hamiltonian() const { return !o_.hamiltonian.empty(); }

  Hamiltonian hamiltonian() const {
    if (!has_hamiltonian()) throw UsageError("this command needs --hamiltonian");
    return Hamiltonian(parse_source(read_source(o_.hamiltonian, in_)), "", positives());
  }

  FlowEquation equation() const {
    if (has_hamiltonian()) return flow(hamiltonian());
    if (o_.equation.empty()) throw UsageError("one of --hamiltonian or --equation is required");
    positives();
    return FlowEquation(parse_source(read_source(o_.equation, in_)));
  }

  Report check(const std::string& command, bool listing) const {
    const DensitySequence seq = check_integrability(equation(), o_.order, budget());
    Report r;
    r.json = document(command, status_name(seq.status));
    r.json["conditions"] = conditions_json(seq);
    r.json["order"] = o_.order;
    r.json["failed_n"] = seq.status == DensityStatus::Ok ? Json(nullptr) : Json(seq.failed_n);
    r.json["diagnostic"] = seq.diagnostic;
    r.text = sequence_text(seq, o_.order, listing);
    r.latex = sequence_latex(seq);
    r.code = exit_for(seq.status);
    return r;
  }

  Report flow_cmd() const {
    const FlowEquation F = equation();
    Report r;
    r.json = document("flow", "ok");
    r.json["flow"] = to_text(F.rhs());
    r.text = "u_t = " + to_text(F.rhs()) + "\n";
    r.latex = "u_t = " + to_latex(F.rhs()) + "\n";
    return r;
  }

  Report vder() const {
    Expr e;
    if (!o_.expr.empty())
      e = parse_source(read_source(o_.expr, in_));
    else
      e = hamiltonian().expr();
    const Expr d = variational_derivative(e);
    Report r;
    r.json = document("vder", "ok");
    r.json["input"] = to_text(e);
    r.json["result"] = to_text(d);
    r.text = to_text(d) + "\n";
    r.latex = "\\frac{\\delta}{\\delta u}\\left(" + to_latex(e) + "\\right) = " + to_latex(d) + "\n";
    return r;
  }

  Report transform() const {
    const Source spec = read_source("@" + o_.spec, in_);
    TransformTrail trail;
    try {
      trail = TransformTrail::from_json(spec.text);
    } catch (const ParseError& e) {
      throw UsageError(o_.spec + ": " + e.what());
    }
    Report r;
    r.json = document("transform", "ok");
    r.json["trail"] = Json::parse(trail.to_json());
    if (has_hamiltonian()) {
      const Hamiltonian H = trail.replay(hamiltonian());
      const FlowEquation F = flow(H);
      r.json["hamiltonian"] = to_text(H.expr());
      r.json["flow"] = to_text(F.rhs());
      r.text = "H = " + to_text(H.expr()) + "\nu_t = " + to_text(F.rhs()) + "\n";
      r.latex = "H = " + to_latex(H.expr()) + "\n";
    } else {
      const FlowEquation F = trail.replay(equation());
      r.json["flow"] = to_text(F.rhs());
      r.text = "u_t = " + to_text(F.rhs()) + "\n";
      r.latex = "u_t = " + to_latex(F.rhs()) + "\n";
    }
    return r;
  }

  Report reciprocal_cmd() const {
    const FlowEquation F = equation();
    Expr rho, theta;
    if (!o_.rho.empty()) {
      if (o_.theta.empty()) throw UsageError("--rho needs --theta");
      rho = parse_source(read_source(o_.rho, in_));
      theta = parse_source(read_source(o_.theta, in_));
    } else {
      const DensitySequence seq = check_integrability(F, -1, budget());
      if (seq.status != DensityStatus::Ok) {
        Report r;
        r.json = document("reciprocal", status_name(seq.status));
        r.json["diagnostic"] = seq.diagnostic;
        r.text = std::string("no conserved separant density: ") + seq.diagnostic + "\n";
        r.latex = r.text;
        r.code = exit_for(seq.status);
        return r;
      }
      rho = seq.rho(-1);
      theta = seq.theta(-1);
    }
    const FlowEquation G = reciprocal(F, rho, theta);
    Report r;
    r.json = document("reciprocal", "ok");
    r.json["rho"] = to_text(rho);
    r.json["theta"] = to_text(theta);
    r.json["flow"] = to_text(G.rhs());
    r.text = "dy = (" + to_text(rho) + ") dx + (" + to_text(theta) + ") dt\nv_t = " + to_text(G.rhs()) + "\n";
    r.latex = "v_t = " + to_latex(G.rhs()) + "\n";
    return r;
  }

  Report classify() const {
    const ClassificationResult c = identify(hamiltonian());
    Report r;
    r.json = document("classify", c.classified() ? "ok" : "violated");
    const Json cj = Json::parse(c.to_json());
    r.json["trail"] = cj["trail"];
    r.json["id"] = c.classified() ? Json(c.canonical_id) : Json(nullptr);
    r.json["bindings"] = cj["bindings"];
    for (const char* key : {"obstructions", "relations", "diagnostics", "verified"}) r.json[key] = cj[key];
    std::ostringstream os;
    os << "id: " << c.canonical_id << "\n";
    for (const auto& [k, v] : c.bindings) os << "  " << k << " = " << to_text(v) << "\n";
    for (const TrailStep& s : c.trail.steps()) {
      os << "step " << to_string(s.kind);
      for (const auto& [k, v] : s.args) os << " " << k << "=" << to_text(v);
      os << "\n";
    }
    for (const Expr& e : c.obstructions) os << "obstruction: " << to_text(e) << " = 0\n";
    for (const std::string& d : c.diagnostics) os << "note: " << d << "\n";
    if (c.classified() && c.obstructions.empty()) os << "verified: " << (c.verified ? "yes" : "no") << "\n";
    r.text = os.str();
    std::ostringstream ls;
    ls << "\\text{" << c.canonical_id << "}";
    for (const auto& [k, v] : c.bindings) ls << ",\\ " << k << " = " << to_latex(v);
    ls << "\n";
    r.latex = ls.str();
    r.code = c.classified() ? kPass : kViolated;
    return r;
  }

  Report catalog_list() const {
    Report r;
    r.json = document("catalog list", "ok");
    Json entries = Json::array();
    std::ostringstream os, ls;
    for (const std::string& id : catalog_ids()) {
      const CatalogEntry& e = catalog_get(id);
      Json j;
      j["id"] = id;
      j["hamiltonian"] = e.hamiltonian ? Json(to_text(e.hamiltonian->expr())) : Json(nullptr);
      j["flow"] = to_text(e.flow.rhs());
      j["notes"] = e.notes;
      entries.push_back(std::move(j));
      os << id << "\t";
      if (e.hamiltonian)
        os << "H = " << to_text(e.hamiltonian->expr());
      else
        os << "u_t = " << to_text(e.flow.rhs());
      os << "\n";
      ls << "\\text{" << id << "}: "
         << (e.hamiltonian ? "H = " + to_latex(e.hamiltonian->expr()) : "u_t = " + to_latex(e.flow.rhs())) << " \\\\\n";
    }
    r.json["entries"] = entries;
    r.text = os.str();
    r.latex = ls.str();
    return r;
  }

  Report catalog_verify_cmd() const {
    std::vector<std::string> ids;
    if (o_.all) {
      if (!o_.catalog_id.empty()) throw UsageError("catalog verify takes an id or --all, not both");
      ids = catalog_ids();
    } else {
      if (o_.catalog_id.empty()) throw UsageError("catalog verify needs an id or --all");
      ids.push_back(catalog_get(o_.catalog_id).id);
    }
    const Budget b = budget();
    DensityStatus worst = DensityStatus::Ok;
    Json entries = Json::array();
    std::ostringstream os, ls;
    Json single;
    for (const std::string& id : ids) {
      const CatalogReport rep = catalog_verify(id, o_.order, b);
      const DensityStatus s = rep.status();
      if (severity(s) > severity(worst)) worst = s;
      Json j;
      j["id"] = id;
      j["status"] = status_name(s);
      j["conditions"] = conditions_json(rep.sequence);
      j["separant"] = to_string(rep.separant);
      j["printed_flow"] = to_string(rep.printed);
      Json even = Json::array();
      if (rep.even)
        for (const auto& item : rep.even->items) even.push_back({{"n", item.n}, {"status", to_string(item.status)}});
      j["even"] = even;
      j["problems"] = rep.problems;
      os << id << ": " << status_name(s) << "\n";
      if (ids.size() == 1) os << sequence_text(rep.sequence, o_.order, true);
      for (const auto& item : j["even"]) os << "  rho_" << item["n"].get<int>() << " trivial: " << item["status"].get<std::string>() << "\n";
      for (const std::string& p : rep.problems) os << "  problem: " << p << "\n";
      ls << "% " << id << ": " << status_name(s) << "\n" << sequence_latex(rep.sequence);
      if (ids.size() == 1) single = j;
      entries.push_back(std::move(j));
    }
    Report r;
    r.json = document("catalog verify", status_name(worst));
    if (ids.size() == 1) {
      r.json["conditions"] = single["conditions"];
      r.json["id"] = ids.front();
      for (const char* key : {"separant", "printed_flow", "even", "problems"}) r.json[key] = single[key];
    } else {
      r.json["entries"] = entries;
    }
    r.json["order"] = o_.order;
    r.text = os.str();
    r.latex = ls.str();
    r.code = exit_for(worst);
    return r;
  }

 private:
  const Options& o_;
  std::istream& in_;
};

void emit(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "json")
    out << r.json.dump() << "\n";
  else if (format == "latex")
    out << r.latex;
  else
    out << r.text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Integrability conditions, canonical transformations and classification of Hamiltonian "
               "third-order evolution equations u_t = D_x(dH/du).",
               "hamclass"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "latex", "json"}));
  auto* h_opt = app.add_option("--hamiltonian", o.hamiltonian, "H(x, u, u1); '-' reads stdin, '@path' a file");
  auto* e_opt = app.add_option("--equation", o.equation, "Right-hand side F of u_t = F; '-' or '@path' as above");
  h_opt->excludes(e_opt);
  app.add_option("--timeout", o.timeout, "Wall-clock budget in seconds")->check(CLI::PositiveNumber);
  app.add_option("--node-budget", o.node_budget,
                 std::string("Largest expression size; default from ") + kNodeBudgetEnv)
      ->check(CLI::PositiveNumber);
  app.add_option("--assume", o.assume, "Positivity assumption name>0 (repeatable)");

  auto* check = app.add_subcommand("check", "Check the integrability conditions up to --order");
  check->add_option("--order", o.order, "Last condition index N")->check(CLI::Range(-1, 40));
  auto* densities = app.add_subcommand("densities", "List canonical densities and fluxes up to --max-n");
  densities->add_option("--max-n", o.order, "Last density index")->check(CLI::Range(-1, 40));
  auto* flow_cmd = app.add_subcommand("flow", "Print the flow u_t = D_x(dH/du)");
  auto* vder = app.add_subcommand("vder", "Variational derivative of EXPR or of --hamiltonian");
  vder->add_option("expr", o.expr, "Expression in x, u, u1, ...");
  auto* transform = app.add_subcommand("transform", "Replay a transformation trail");
  transform->add_option("--spec", o.spec, "Trail JSON file")->required();
  auto* recip = app.add_subcommand("reciprocal", "Reciprocal transformation by a conservation law");
  recip->add_option("--rho", o.rho, "Density (default rho_-1)");
  recip->add_option("--theta", o.theta, "Flux (default theta_-1)");
  auto* classify = app.add_subcommand("classify", "Identify the canonical form of --hamiltonian");
  auto* catalog = app.add_subcommand("catalog", "The catalog of canonical forms");
  catalog->require_subcommand(1);
  auto* clist = catalog->add_subcommand("list", "List catalog entries");
  auto* cverify = catalog->add_subcommand("verify", "Verify catalog entries");
  cverify->add_option("id", o.catalog_id, "Catalog id");
  cverify->add_flag("--all", o.all, "Verify every entry");
  cverify->add_option("--order", o.order, "Last condition index N")->check(CLI::Range(-1, 40));
  for (CLI::App* sub : {check, densities, flow_cmd, vder, transform, recip, classify, catalog, clist, cverify})
    sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  const std::string command = *catalog ? std::string("catalog ") + (*clist ? "list" : "verify")
                                       : app.get_subcommands().front()->get_name();
  try {
    const Runner r(o, in);
    Report report;
    if (*check)
      report = r.check("check", false);
    else if (*densities)
      report = r.check("densities", true);
    else if (*flow_cmd)
      report = r.flow_cmd();
    else if (*vder)
      report = r.vder();
    else if (*transform)
      report = r.transform();
    else if (*recip)
      report = r.reciprocal_cmd();
    else if (*classify)
      report = r.classify();
    else if (*clist)
      report = r.catalog_list();
    else
      report = r.catalog_verify_cmd();
    emit(report, o.format, out);
    return report.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    if (o.format == "json") out << document(command, "resource").dump() << "\n";
    err << "resource limit: " << e.what() << "\n";
    return kUndecided;
  } catch (const IntegrationError& e) {
    if (o.format == "json") out << document(command, "undecided").dump() << "\n";
    err << "undecided: " << e.what() << "\n";
    return kUndecided;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace hamclass::cli
