// Symbol interning.  Storage is chunked so readers never take a lock; writers
// serialise on a mutex and publish a slot before handing out its id.

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <unordered_map>

#include "hamclass/expr.hpp"
#include "internal.hpp"

namespace hamclass {
namespace {

constexpr std::size_t kChunkBits = 12;
constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
constexpr std::size_t kMaxChunks = 4096;

struct Registry {
  std::mutex mu;
  std::array<std::atomic<SymbolInfo*>, kMaxChunks> chunks{};
  std::uint32_t count = 0;
  std::unordered_map<std::string, SymId> index;
  std::array<std::atomic<std::uint32_t>, 64> jet_cache{};  // id + 1, 0 = unset
  std::atomic<std::uint32_t> x_cache{0};
};

Registry& registry() {
  static Registry r;
  return r;
}

std::atomic<int> g_jet_bound{24};

SymId intern(const std::string& key, const std::function<SymbolInfo()>& make) {
  Registry& r = registry();
  {
    std::lock_guard<std::mutex> lock(r.mu);
    auto it = r.index.find(key);
    if (it != r.index.end()) return it->second;
  }
  // Built outside the lock: making a symbol may read (never create) other symbols.
  SymbolInfo info = make();
  std::lock_guard<std::mutex> lock(r.mu);
  auto it = r.index.find(key);
  if (it != r.index.end()) return it->second;
  const SymId id = r.count;
  const std::size_t chunk = id >> kChunkBits;
  if (chunk >= kMaxChunks) throw ResourceError("symbol table exhausted");
  SymbolInfo* block = r.chunks[chunk].load(std::memory_order_acquire);
  if (block == nullptr) {
    block = new SymbolInfo[kChunkSize];
    r.chunks[chunk].store(block, std::memory_order_release);
  }
  block[id & (kChunkSize - 1)] = std::move(info);
  ++r.count;
  r.index.emplace(key, id);
  return id;
}

void merge_atoms(std::vector<SymId>& into, const std::vector<SymId>& more) {
  std::vector<SymId> out;
  out.reserve(into.size() + more.size());
  std::set_union(into.begin(), into.end(), more.begin(), more.end(), std::back_inserter(out));
  into.swap(out);
}

/// Dependency data of a composite built from an expression.
void absorb(SymbolInfo& info, const Expr& e) {
  for (const Term& t : e.terms()) {
    for (const Factor& f : t.mono) {
      const SymbolInfo& s = symbol_info(f.sym);
      info.order = std::max(info.order, s.order);
      info.depends_x = info.depends_x || s.depends_x;
      merge_atoms(info.atoms, s.atoms);
      if (is_atom(f.sym)) merge_atoms(info.atoms, {f.sym});
    }
  }
}

/// Rank used to pick the main variable of a base polynomial: highest jet first.
long elimination_rank(SymId id) {
  const SymbolInfo& s = symbol_info(id);
  switch (s.kind) {
    case SymKind::Jet: return 100000 + s.order;
    case SymKind::X: return 50000;
    case SymKind::Func: return 20000 + s.deriv;
    case SymKind::Param: return 10000;
    default: return -1;
  }
}

void build_rule(SymbolInfo& info) {
  const Expr& poly = *info.poly;
  // Candidate main variables: atoms appearing directly with integer exponents.
  std::map<SymId, bool> candidates;
  for (const Term& t : poly.terms()) {
    for (const Factor& f : t.mono) {
      if (!is_atom(f.sym)) continue;
      const bool ok = f.exp.is_integer() && f.exp.num() > 0;
      auto [it, inserted] = candidates.emplace(f.sym, ok);
      if (!inserted) it->second = it->second && ok;
    }
  }
  SymId best = 0;
  long best_rank = -1;
  for (const auto& [id, ok] : candidates) {
    if (!ok) continue;
    const long rank = elimination_rank(id);
    if (rank > best_rank || (rank == best_rank && symbol_less(best, id))) {
      best = id;
      best_rank = rank;
    }
  }
  if (best_rank < 0) return;
  // The main variable must not hide inside another kernel of the polynomial.
  for (const Term& t : poly.terms()) {
    for (const Factor& f : t.mono) {
      if (f.sym == best) continue;
      const auto& atoms = symbol_info(f.sym).atoms;
      if (std::binary_search(atoms.begin(), atoms.end(), best)) return;
    }
  }
  std::int64_t degree = 0;
  for (const Term& t : poly.terms())
    for (const Factor& f : t.mono)
      if (f.sym == best) degree = std::max(degree, f.exp.num());
  const Term* lead = nullptr;
  for (const Term& t : poly.terms()) {
    for (const Factor& f : t.mono) {
      if (f.sym == best && f.exp.num() == degree) {
        if (lead != nullptr) return;  // non-monomial leading coefficient
        lead = &t;
      }
    }
  }
  if (lead == nullptr) return;
  info.has_rule = true;
  info.main_var = best;
  info.main_deg = static_cast<int>(degree);
  info.lc_coef = lead->coef;
  info.laurent_lc = true;
  for (const Factor& f : lead->mono) {
    if (f.sym == best) continue;
    info.lc_mono.push_back(f);
    const SymKind k = symbol_info(f.sym).kind;
    if (!is_atom(f.sym) && k != SymKind::Func) info.laurent_lc = false;
  }
  std::vector<Term> tail;
  for (const Term& t : poly.terms())
    if (&t != lead) tail.push_back(t);
  info.tail = std::make_shared<const Expr>(Expr::from_terms(std::move(tail)));
}

}  // namespace

const SymbolInfo& symbol_info(SymId id) {
  const SymbolInfo* block = registry().chunks[id >> kChunkBits].load(std::memory_order_acquire);
  return block[id & (kChunkSize - 1)];
}

bool is_atom(SymId id) {
  const SymKind k = symbol_info(id).kind;
  return k == SymKind::X || k == SymKind::Jet || k == SymKind::Param || k == SymKind::Func;
}

void set_jet_order_bound(int bound) { g_jet_bound.store(bound); }
int jet_order_bound() { return g_jet_bound.load(); }

SymId x_id() {
  Registry& r = registry();
  if (std::uint32_t c = r.x_cache.load(std::memory_order_acquire); c != 0) return c - 1;
  const SymId id = intern("x", [] {
    SymbolInfo s;
    s.kind = SymKind::X;
    s.depends_x = true;
    return s;
  });
  r.x_cache.store(id + 1, std::memory_order_release);
  return id;
}

SymId jet_id(int n) {
  if (n < 0) throw PreconditionError("negative jet order");
  if (n > jet_order_bound())
    throw JetOrderError("jet order " + std::to_string(n) + " exceeds bound " + std::to_string(jet_order_bound()));
  Registry& r = registry();
  if (n < 64) {
    if (std::uint32_t c = r.jet_cache[n].load(std::memory_order_acquire); c != 0) return c - 1;
  }
  const SymId id = intern("u:" + std::to_string(n), [n] {
    SymbolInfo s;
    s.kind = SymKind::Jet;
    s.order = n;
    return s;
  });
  if (n < 64) r.jet_cache[n].store(id + 1, std::memory_order_release);
  return id;
}

bool is_reserved_name(std::string_view name) {
  if (name == "x" || name == "u") return true;
  if (name.size() >= 2 && name[0] == 'u') {
    const bool digits = std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; });
    const bool xs = std::all_of(name.begin() + 1, name.end(), [](char c) { return c == 'x'; });
    return digits || xs;
  }
  return false;
}

bool is_builtin_function(std::string_view name) { return name == "exp" || name == "tanh"; }

SymId param_id(std::string_view name) {
  if (is_reserved_name(name)) throw PreconditionError("reserved name used as parameter: " + std::string(name));
  const std::string n(name);
  const SymId id = intern("p:" + n, [&n] {
    SymbolInfo s;
    s.kind = SymKind::Param;
    s.name = n;
    return s;
  });
  return id;
}

SymId func_id(std::string_view name, const Expr& arg, int deriv) {
  // An argument may mention functions of function-free arguments (P(u - q(x)/3)),
  // never deeper.
  for (const Term& t : arg.terms())
    for (const Factor& f : t.mono)
      if (symbol_info(f.sym).nested) throw PreconditionError("formal functions nest at most two levels deep");
  if (is_builtin_function(name)) deriv = 0;
  const std::string n(name);
  const SymId id = intern("f:" + n + ":" + std::to_string(deriv) + ":" + arg.key(), [&] {
    SymbolInfo s;
    s.kind = SymKind::Func;
    s.name = n;
    s.deriv = deriv;
    s.arg = std::make_shared<const Expr>(arg);
    absorb(s, arg);
    for (const Term& t : arg.terms())
      for (const Factor& f : t.mono) {
        const SymbolInfo& inner = symbol_info(f.sym);
        if (inner.kind == SymKind::Func || (inner.kind == SymKind::Base && inner.has_func)) s.nested = true;
      }
    s.has_func = true;
    return s;
  });
  return id;
}

namespace detail {

SymId base_id(const Expr& primitive_poly) {
  return intern("b:" + primitive_poly.key(), [&] {
    SymbolInfo s;
    s.kind = SymKind::Base;
    s.poly = std::make_shared<const Expr>(primitive_poly);
    absorb(s, primitive_poly);
    for (const Term& t : primitive_poly.terms())
      for (const Factor& f : t.mono) {
        const SymbolInfo& inner = symbol_info(f.sym);
        s.has_func = s.has_func || inner.kind == SymKind::Func || inner.has_func;
        s.nested = s.nested || inner.nested;
      }
    build_rule(s);
    if (auto root = perfect_power(primitive_poly)) {
      Expr q;
      const Scalar c = primitive_part(root->first, q);
      // c^k is +-1 because the polynomial is primitive.
      s.root_k = root->second;
      s.root_sign = (c < 0 && root->second % 2 == 1) ? -1 : 1;
      s.root_base = base_id(q);
    }
    return s;
  });
}

SymId numroot_id(const mpz_class& prime) {
  return intern("r:" + prime.get_str(), [&] {
    SymbolInfo s;
    s.kind = SymKind::NumRoot;
    s.prime = prime;
    return s;
  });
}

}  // namespace detail

// Structural total order: constants < x < jets < parameters < functions < bases.
bool symbol_less(SymId a, SymId b) {
  if (a == b) return false;
  const SymbolInfo& sa = symbol_info(a);
  const SymbolInfo& sb = symbol_info(b);
  auto rank = [](SymKind k) {
    switch (k) {
      case SymKind::NumRoot: return 0;
      case SymKind::X: return 1;
      case SymKind::Jet: return 2;
      case SymKind::Param: return 3;
      case SymKind::Func: return 4;
      case SymKind::Base: return 5;
    }
    return 6;
  };
  if (rank(sa.kind) != rank(sb.kind)) return rank(sa.kind) < rank(sb.kind);
  switch (sa.kind) {
    case SymKind::NumRoot: return sa.prime < sb.prime;
    case SymKind::X: return false;
    case SymKind::Jet: return sa.order < sb.order;
    case SymKind::Param: return sa.name < sb.name;
    case SymKind::Func:
      if (sa.name != sb.name) return sa.name < sb.name;
      if (sa.deriv != sb.deriv) return sa.deriv < sb.deriv;
      return expr_structural_compare(*sa.arg, *sb.arg) < 0;
    case SymKind::Base: return expr_structural_compare(*sa.poly, *sb.poly) < 0;
  }
  return false;
}

}  // namespace hamclass
