#include <algorithm>
#include <cctype>
#include <ostream>

#include "hamclass/text.hpp"
#include "internal.hpp"

namespace hamclass {
namespace {

std::vector<const Term*> display_order(const Expr& e) {
  std::vector<const Term*> terms;
  terms.reserve(e.size());
  for (const Term& t : e.terms()) terms.push_back(&t);
  std::stable_sort(terms.begin(), terms.end(), [](const Term* a, const Term* b) {
    return mono_structural_compare(a->mono, b->mono) > 0;
  });
  return terms;
}

std::vector<Factor> factor_order(const Monomial& m) {
  std::vector<Factor> f(m.begin(), m.end());
  std::sort(f.begin(), f.end(), [](const Factor& a, const Factor& b) { return symbol_less(a.sym, b.sym); });
  return f;
}

// --- text --------------------------------------------------------------------

std::string text_symbol(SymId s) {
  const SymbolInfo& info = symbol_info(s);
  switch (info.kind) {
    case SymKind::NumRoot: return info.prime.get_str();
    case SymKind::X: return "x";
    case SymKind::Jet: return info.order == 0 ? "u" : "u" + std::to_string(info.order);
    case SymKind::Param: return info.name;
    case SymKind::Func: return info.name + std::string(static_cast<std::size_t>(info.deriv), '\'') + "(" + to_text(*info.arg) + ")";
    case SymKind::Base: return "(" + to_text(*info.poly) + ")";
  }
  return "?";
}

std::string text_exponent(Ratio r) {
  if (r == Ratio(1)) return "";
  if (r.is_integer() && !r.is_negative()) return "^" + r.str();
  return "^(" + r.str() + ")";
}

std::string text_scalar(const Scalar& c) {
  if (c.get_den() == 1) return c.get_num().get_str();
  return "(" + c.get_str() + ")";
}

// --- LaTeX -----------------------------------------------------------------------

std::string latex_name(const std::string& name) {
  static const char* greek[] = {"alpha", "beta",  "gamma", "delta", "epsilon", "zeta",  "eta",   "theta",
                                "iota",  "kappa", "lambda", "mu",   "nu",      "xi",    "pi",    "rho",
                                "sigma", "tau",   "phi",   "chi",   "psi",     "omega", "Gamma", "Delta",
                                "Theta", "Lambda", "Xi",   "Pi",    "Sigma",   "Phi",   "Psi",   "Omega"};
  std::size_t split = name.size();
  while (split > 0 && std::isdigit(static_cast<unsigned char>(name[split - 1])) != 0) --split;
  std::string head = name.substr(0, split);
  const std::string digits = name.substr(split);
  for (const char* g : greek)
    if (head == g) head = std::string("\\") + g;
  if (head.size() > 1 && head[0] != '\\') head = "\\mathrm{" + head + "}";
  if (head.empty()) head = digits;
  else if (!digits.empty()) head += "_{" + digits + "}";
  return head;
}

std::string latex_jet(int n) {
  if (n == 0) return "u";
  if (n <= 4) return "u_{" + std::string(static_cast<std::size_t>(n), 'x') + "}";
  return "u_{" + std::to_string(n) + "}";
}

std::string latex_symbol(SymId s) {
  const SymbolInfo& info = symbol_info(s);
  switch (info.kind) {
    case SymKind::NumRoot: return info.prime.get_str();
    case SymKind::X: return "x";
    case SymKind::Jet: return latex_jet(info.order);
    case SymKind::Param: return latex_name(info.name);
    case SymKind::Func: {
      if (info.name == "exp") return "e^{" + to_latex(*info.arg) + "}";
      if (info.name == "tanh") return "\\tanh\\left(" + to_latex(*info.arg) + "\\right)";
      std::string head = latex_name(info.name);
      if (info.deriv > 0 && info.deriv <= 3) head += std::string(static_cast<std::size_t>(info.deriv), '\'');
      if (info.deriv > 3) head += "^{(" + std::to_string(info.deriv) + ")}";
      return head + "\\left(" + to_latex(*info.arg) + "\\right)";
    }
    case SymKind::Base: return "\\left(" + to_latex(*info.poly) + "\\right)";
  }
  return "?";
}

std::string latex_power(SymId s, Ratio r) {
  const SymbolInfo& info = symbol_info(s);
  if (r == Ratio(1)) return latex_symbol(s);
  if (r == Ratio(1, 2)) {
    const std::string inner = info.kind == SymKind::Base ? to_latex(*info.poly) : latex_symbol(s);
    return "\\sqrt{" + inner + "}";
  }
  if (r.den() > 1 && r.num() == 1) {
    const std::string inner = info.kind == SymKind::Base ? to_latex(*info.poly) : latex_symbol(s);
    return "\\sqrt[" + std::to_string(r.den()) + "]{" + inner + "}";
  }
  std::string base = latex_symbol(s);
  if (info.kind == SymKind::Func && info.name == "exp") {
    return "e^{" + to_latex(Expr(Scalar(r.num(), r.den())) * *info.arg) + "}";
  }
  if (info.kind == SymKind::Func || (info.kind == SymKind::Jet && info.order > 0) ||
      (info.kind == SymKind::Param && base.find('_') != std::string::npos))
    base = "{" + base + "}";
  return base + "^{" + (r.is_integer() ? r.str() : "\\frac{" + std::to_string(r.num()) + "}{" + std::to_string(r.den()) + "}") + "}";
}

}  // namespace

std::string to_text(const Expr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term* t : display_order(e)) {
    Scalar c = t->coef;
    const bool negative = c < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string body;
    if (t->mono.empty() || c != 1) body = text_scalar(c);
    for (const Factor& f : factor_order(t->mono)) {
      if (!body.empty()) body += "*";
      body += text_symbol(f.sym) + text_exponent(f.exp);
    }
    out += body;
  }
  return out;
}

std::string to_latex(const Expr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term* t : display_order(e)) {
    Scalar c = t->coef;
    const bool negative = c < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::vector<std::string> num;
    std::vector<std::string> den;
    for (const Factor& f : factor_order(t->mono)) {
      if (f.exp.is_negative()) {
        den.push_back(latex_power(f.sym, -f.exp));
      } else {
        num.push_back(latex_power(f.sym, f.exp));
      }
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const std::string& p : v) {
        if (!s.empty()) s += " ";
        s += p;
      }
      return s;
    };
    const std::string cn = c.get_num().get_str();
    const std::string cd = c.get_den().get_str();
    if (den.empty() && c.get_den() == 1) {
      if (num.empty()) out += cn;
      else out += (c == 1 ? "" : cn + " ") + join(num);
    } else {
      std::string top = join(num);
      if (c.get_num() != 1 || top.empty()) top = top.empty() ? cn : cn + " " + top;
      std::string bottom = join(den);
      if (c.get_den() != 1) bottom = bottom.empty() ? cd : cd + " " + bottom;
      out += "\\frac{" + top + "}{" + bottom + "}";
    }
  }
  return out;
}

}  // namespace hamclass
