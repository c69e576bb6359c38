#pragma once

// Concrete coefficient sets for the subcase normal forms: solutions of the
// condition systems, and perturbations that break a chosen relation.

#include <hamclass/classify.hpp>
#include <hamclass/jet.hpp>
#include <random>
#include <string>

namespace hamclass::gen {

inline Expr ansatz_hamiltonian(const Ansatz& a) {
  const Expr u = jet(0), u1 = jet(1);
  auto q = [&](const std::string& n) {
    const auto it = a.coeffs.find(n);
    return it == a.coeffs.end() ? Expr() : it->second;
  };
  switch (a.subcase) {
    case Subcase::A1:
      return -u1 * u1 / 2 + q("q1") * pow(u, Ratio(4)) / 4 + q("q2") * pow(u, Ratio(3)) / 3 + q("q3") * u * u / 2 +
             q("q4") * u;
    case Subcase::A2:
      return -u1 * u1 / (2 * pow(u, Ratio(3))) + q("q1") * pow(u, Ratio(3)) / 3 + q("q2") * u * u / 2 - q("q3") / u +
             q("q4") * u;
    case Subcase::A3: {
      const Expr a3 = u * u + q("c");
      Expr r;
      for (int i = 1; i <= 5; ++i) r += q("r" + std::to_string(i)) * pow(u, Ratio(5 - i));
      return -u1 * u1 / (2 * pow(a3, Ratio(3))) + r / a3;
    }
    case Subcase::B: {
      Expr s = u1;
      for (int i = 1; i <= 5; ++i) s += q("q" + std::to_string(i)) * pow(u, Ratio(5 - i));
      return q("h1") * u * u / 2 + q("h2") * u + 4 * sqrt(s);
    }
  }
  return Expr();
}

class ConditionSampler {
 public:
  explicit ConditionSampler(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }

  Expr nonzero() {
    std::int64_t n = 0;
    while (n == 0) n = integer(-3, 3);
    return rational(n, integer(1, 2));
  }

  Expr poly(int max_deg, bool force_x = false) {
    const Expr x = var_x();
    Expr p;
    const int d = static_cast<int>(integer(force_x ? 1 : 0, max_deg));
    for (int k = 0; k <= d; ++k)
      if (k == d || integer(0, 1) == 1) p += nonzero() * pow(x, Ratio(k));
    return p;
  }

  /// A coefficient set satisfying the printed system of the subcase (A.1 with 6 k1 q4').
  Ansatz satisfying(Subcase s) {
    const Expr x = var_x();
    const SymId X = x_id();
    auto D = [](const Expr& e, int k = 1) {
      Expr out = e;
      for (int i = 0; i < k; ++i) out = total_x(out);
      return out;
    };
    Ansatz a;
    a.subcase = s;
    switch (s) {
      case Subcase::A1: {
        const Expr k1 = nonzero();
        const Expr q2 = poly(2, true);
        const Expr q3 = q2 * q2 / (3 * k1) + nonzero();
        const Expr q4 = integrate(2 * D(q2, 3) + 2 * D(q2) * q3, X) / (6 * k1) + nonzero();
        a.coeffs = {{"q1", k1}, {"q2", q2}, {"q3", q3}, {"q4", q4}};
        break;
      }
      case Subcase::A2: {
        const Expr q2 = poly(3, true);
        const Expr q1 = nonzero() * q2 * q2;
        const Expr q3 = (integrate(q2 * D(q2, 3), X) + nonzero()) / (q2 * q2);
        a.coeffs = {{"q1", q1}, {"q2", q2}, {"q3", q3}, {"q4", nonzero()}};
        break;
      }
      case Subcase::A3: {
        a.coeffs = {{"c", nonzero()}};
        for (int i = 1; i <= 5; ++i) a.coeffs["r" + std::to_string(i)] = integer(0, 1) ? nonzero() : Expr();
        break;
      }
      case Subcase::B: {
        const Expr h1 = nonzero();
        const Expr h2 = poly(2);
        const Expr c = nonzero(), d = nonzero();
        const Expr q1 = c * h1 * h1;
        const Expr q2 = h1 * (4 * c * h2 + d);
        const Expr q3 = 6 * c * h2 * h2 + 3 * d * h2 + nonzero();
        const Expr h1q4 = D(h1) + integrate(2 * q3 * D(h2), X) + nonzero();
        const Expr q5 = (integrate(h1 * D(h2, 2) + h1q4 * D(h2), X) + nonzero()) / (h1 * h1);
        a.coeffs = {{"h1", h1}, {"h2", h2}, {"h3", Expr()}, {"q1", q1}, {"q2", q2},
                    {"q3", q3}, {"q4", h1q4 / h1}, {"q5", q5}};
        break;
      }
    }
    return a;
  }

  /// A satisfying set with one coefficient perturbed so that relation `which` fails.
  Ansatz violating(Subcase s, int which) {
    Ansatz a = satisfying(s);
    const Expr x = var_x();
    switch (s) {
      case Subcase::A1: {
        static const char* target[] = {"q1", "q3", "q4"};
        a.coeffs[target[which]] += x;
        break;
      }
      case Subcase::A2: {
        static const char* target[] = {"q1", "q3", "q4"};
        static const Expr bump[] = {pow(x, Ratio(3)), 1 + x, x};
        a.coeffs[target[which]] += bump[which];
        break;
      }
      case Subcase::A3:
        a.coeffs["r" + std::to_string(which + 1)] += x;
        break;
      case Subcase::B:
        a.coeffs["q" + std::to_string(which + 1)] += x;
        break;
    }
    return a;
  }

  static int relation_count(Subcase s) { return s == Subcase::A1 || s == Subcase::A2 ? 3 : 5; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace hamclass::gen
