#pragma once

// Formal integration: Euler operator, canonical reduction modulo total
// derivatives, antiderivatives with J symbols, and substitution.

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "diffexpr.hpp"

namespace kpcalc {

/// δ(∫density)/δg = Σ_k (-∂)^k ∂density/∂g^(k). Density must be J- and E-free.
inline DiffExpr euler_derivative(const DiffExpr& density, GenId g) {
  if (!is_plain(density)) throw std::domain_error("euler_derivative: density contains J or E symbols");
  DiffExpr r;
  const int top = max_order(density, g);
  for (int k = 0; k <= top; ++k) {
    DiffExpr p = partial(density, Atom::jet(g, static_cast<std::uint32_t>(k)));
    if (p.is_zero()) continue;
    p = differentiate(p, static_cast<unsigned>(k));
    if (k % 2) p *= Rational(-1);
    r += p;
  }
  return r;
}

/// True when every variational derivative of a plain density vanishes.
inline bool euler_annihilates(const DiffExpr& density) {
  std::set<GenId> gens;
  collect_generators(density, gens);
  for (GenId g : gens)
    if (!euler_derivative(density, g).is_zero()) return false;
  return true;
}

namespace detail {

// Grade of a plain monomial: per-generator degree, total derivative count,
// and invertible generators present with degree zero (like u'/u). ∂ preserves it.
struct GradeKey {
  std::vector<std::tuple<GenId, int, bool>> degrees;  // (gen, total exponent, invertible)
  std::vector<GenId> zero_inverse;                     // invertible gens with total 0
  int derivatives = 0;

  bool operator<(const GradeKey& o) const {
    return std::tie(derivatives, degrees, zero_inverse) <
           std::tie(o.derivatives, o.degrees, o.zero_inverse);
  }
};

inline GradeKey grade_of(const Monomial& m, const Context& ctx) {
  std::map<GenId, int> deg;
  GradeKey key;
  for (const auto& f : m.factors) {
    deg[f.atom.gen] += f.exponent;
    key.derivatives += static_cast<int>(f.atom.order) * f.exponent;
  }
  for (const auto& [g, d] : deg) {
    if (d == 0) {
      key.zero_inverse.push_back(g);
    } else {
      key.degrees.emplace_back(g, d, ctx[g].invertible);
    }
  }
  return key;
}

// Partitions of n into at most max_parts parts (max_parts < 0: unbounded), as counts per order.
inline void partitions(int n, int max_part, int max_parts, std::vector<int>& parts,
                       const std::function<void(const std::vector<int>&)>& emit) {
  if (n == 0) {
    emit(parts);
    return;
  }
  if (max_parts == 0) return;
  for (int p = std::min(n, max_part); p >= 1; --p) {
    parts.push_back(p);
    partitions(n - p, p, max_parts < 0 ? -1 : max_parts - 1, parts, emit);
    parts.pop_back();
  }
}

// All plain monomials with the given per-generator degrees (and zero-degree
// invertible generators) carrying exactly `derivatives` derivatives.
inline std::vector<Monomial> enumerate_grade(const GradeKey& key, int derivatives) {
  struct Slot {
    GenId gen;
    int total;
    bool invertible;
    bool needs_jet;
  };
  std::vector<Slot> slots;
  for (const auto& [g, d, inv] : key.degrees) slots.push_back({g, d, inv, false});
  for (GenId g : key.zero_inverse) slots.push_back({g, 0, true, true});
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.gen < b.gen; });

  std::vector<Monomial> out;
  std::vector<std::vector<Factor>> chosen(slots.size());
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int budget) {
    if (i == slots.size()) {
      if (budget != 0) return;
      Monomial m;
      for (const auto& fs : chosen) m.factors.insert(m.factors.end(), fs.begin(), fs.end());
      out.push_back(std::move(m));
      return;
    }
    const Slot& s = slots[i];
    const int lo = s.needs_jet ? 1 : 0;
    const int hi = (i + 1 == slots.size()) ? budget : budget;
    for (int b = (i + 1 == slots.size()) ? budget : lo; b <= hi; ++b) {
      if (b < lo) continue;
      std::vector<int> parts;
      const int max_parts = s.invertible ? -1 : s.total;
      partitions(b, b, max_parts, parts, [&](const std::vector<int>& ps) {
        if (s.needs_jet && ps.empty()) return;
        std::map<int, int> counts;
        for (int p : ps) counts[p] += 1;
        const int used = static_cast<int>(ps.size());
        std::vector<Factor> fs;
        const int e0 = s.total - used;
        if (e0 != 0) fs.push_back({Atom::jet(s.gen, 0), e0});
        for (const auto& [ord, cnt] : counts)
          fs.push_back({Atom::jet(s.gen, static_cast<std::uint32_t>(ord)), cnt});
        chosen[i] = std::move(fs);
        rec(i + 1, budget - b);
      });
    }
  };
  if (derivatives >= 0) rec(0, derivatives);
  return out;
}

// Fully reduced echelon basis of ∂(W) inside a grade, pivots on the largest monomial.
struct Echelon {
  struct Row {
    DiffExpr image;   // ∂(source), normalized to pivot coefficient 1
    DiffExpr source;
  };
  std::map<Monomial, Row, MonomialLess> rows;
};

inline Echelon build_echelon(const GradeKey& key) {
  Echelon ech;
  for (Monomial& w : enumerate_grade(key, key.derivatives - 1)) {
    Echelon::Row row{differentiate(w), DiffExpr::monomial(w)};
    for (const auto& [pm, pr] : ech.rows) {
      auto it = row.image.terms().find(pm);
      if (it == row.image.terms().end()) continue;
      const Rational c = it->second;
      row.image -= pr.image * c;
      row.source -= pr.source * c;
    }
    if (row.image.is_zero()) continue;
    const Monomial pivot = row.image.terms().rbegin()->first;
    const Rational inv = Rational(1) / row.image.terms().rbegin()->second;
    row.image *= inv;
    row.source *= inv;
    for (auto& [pm, pr] : ech.rows) {
      auto it = pr.image.terms().find(pivot);
      if (it == pr.image.terms().end()) continue;
      const Rational c = it->second;
      pr.image -= row.image * c;
      pr.source -= row.source * c;
    }
    ech.rows.emplace(pivot, std::move(row));
  }
  return ech;
}

// Echelon bases depend only on the grade, so they are memoized process-wide.
inline const Echelon& echelon_for(const GradeKey& key) {
  static std::mutex mu;
  static std::map<GradeKey, std::unique_ptr<Echelon>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto built = std::make_unique<Echelon>(build_echelon(key));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return *it->second;
}

}  // namespace detail

/// Splits a plain expression as e = ∂P + r with r the canonical representative
/// of e modulo total derivatives.
struct PlainSplit {
  DiffExpr primitive;
  DiffExpr remainder;
};

inline PlainSplit split_plain(const Context& ctx, const DiffExpr& e) {
  std::map<detail::GradeKey, DiffExpr> pieces;
  for (const auto& [m, c] : e.terms()) pieces[detail::grade_of(m, ctx)].add_term(m, c);
  PlainSplit out;
  for (auto& [key, piece] : pieces) {
    if (key.derivatives == 0) {
      out.remainder += piece;
      continue;
    }
    const auto& ech = detail::echelon_for(key);
    DiffExpr rem = piece;
    for (const auto& [m, c] : piece.terms()) {
      auto it = ech.rows.find(m);
      if (it == ech.rows.end()) continue;
      rem -= it->second.image * c;
      out.primitive += it->second.source * c;
    }
    out.remainder += rem;
  }
  return out;
}

/// e as a sum of coefficient * I(word); word atoms are expanded by shuffles.
inline std::map<Word, DiffExpr, WordLess> word_expansion(const DiffExpr& e) {
  std::map<Word, DiffExpr, WordLess> out;
  for (const auto& [m, c] : e.terms()) {
    Monomial coeff;
    coeff.exp_arg = m.exp_arg;
    WordSum sh{{Word{}, Rational(1)}};
    for (const auto& f : m.factors) {
      std::optional<Word> w;
      if (!f.atom.is_jet() && f.exponent > 0) w = word_of(*f.atom.arg);
      if (!w) {
        coeff.factors.push_back(f);
        continue;
      }
      for (int k = 0; k < f.exponent; ++k) sh = shuffle(sh, *w);
    }
    for (const auto& [u, k] : sh) out[u].add_term(coeff, c * k);
  }
  return out;
}

namespace detail {

// ∫ a I(v) for plain a, by parts: a = P' + Σ c_j w_j gives
// P I(v) - ∫ P v_1 I(v_2...) + Σ c_j I(w_j v).
inline void integrate_word(const Context& ctx, const DiffExpr& a, const Word& v, DiffExpr& out) {
  if (a.is_zero()) return;
  const auto s = split_plain(ctx, a);
  for (const auto& [m, c] : s.remainder.terms()) {
    Word w{m};
    w.insert(w.end(), v.begin(), v.end());
    out += word_integral(w) * c;
  }
  if (s.primitive.is_zero()) return;
  out += s.primitive * word_integral(v);
  if (!v.empty()) integrate_word(ctx, -(s.primitive * DiffExpr::monomial(v[0])), Word(v.begin() + 1, v.end()), out);
}

inline void collect_integrals(const DiffExpr& e, std::set<Monomial, MonomialLess>& out) {
  for (const auto& [m, c] : e.terms())
    for (const auto& f : m.factors)
      if (!f.atom.is_jet()) out.insert(*f.atom.arg);
}

}  // namespace detail

/// Result of integration: e = ∂primitive + ∂(formal symbols for unresolved).
struct IntegrationResult {
  DiffExpr primitive;
  DiffExpr unresolved;  // monomials with E factors or formal integrals
};

/// Linear in e; the primitive is canonical modulo constants.
inline IntegrationResult integrate_parts(const Context& ctx, const DiffExpr& e) {
  IntegrationResult out;
  DiffExpr words;
  for (const auto& [m, c] : e.terms()) {
    bool ok = !m.exp_arg;
    for (const auto& f : m.factors)
      if (!f.atom.is_jet() && (f.exponent < 0 || !word_of(*f.atom.arg))) ok = false;
    if (ok)
      words.add_term(m, c);
    else
      out.unresolved.add_term(m, c);
  }
  for (const auto& [v, a] : word_expansion(words)) detail::integrate_word(ctx, a, v, out.primitive);
  return out;
}

/// J(m) for a monomial outside the word calculus: a formal symbol, scalar pulled out.
inline DiffExpr formal_integral(const Monomial& m, const Rational& c) {
  Monomial j;
  j.factors.push_back({Atom::integral(m), 1});
  return DiffExpr::monomial(std::move(j), c);
}

/// The antiderivative ∫e; differentiate(antiderivative(e)) == e always.
inline DiffExpr antiderivative(const Context& ctx, const DiffExpr& e) {
  auto parts = integrate_parts(ctx, e);
  DiffExpr r = parts.primitive;
  for (const auto& [m, c] : parts.unresolved.terms()) r += formal_integral(m, c);
  return r;
}

/// p with p' = e when e is a total derivative inside its own symbol ring.
inline std::optional<DiffExpr> integrate_total_derivative(const Context& ctx, const DiffExpr& e) {
  if (is_plain(e) && !euler_annihilates(e)) return std::nullopt;
  auto parts = integrate_parts(ctx, e);
  if (!parts.unresolved.is_zero()) return std::nullopt;
  std::set<Monomial, MonomialLess> have, need;
  detail::collect_integrals(e, have);
  detail::collect_integrals(parts.primitive, need);
  for (const auto& m : need)
    if (!have.count(m)) return std::nullopt;
  return parts.primitive;
}

inline bool is_total_derivative(const Context& ctx, const DiffExpr& e) {
  return integrate_total_derivative(ctx, e).has_value();
}

/// Simultaneous substitution of generators by expressions (jets map to derivatives).
class Substitution {
 public:
  Substitution(const Context& ctx, std::map<GenId, DiffExpr> rules) : ctx_(ctx), rules_(std::move(rules)) {}

  DiffExpr operator()(const DiffExpr& e) {
    DiffExpr r;
    for (const auto& [m, c] : e.terms()) {
      DiffExpr t = apply(m);
      t *= c;
      r += t;
    }
    return r;
  }

  const std::map<GenId, DiffExpr>& rules() const { return rules_; }

 private:
  DiffExpr jet(GenId g, std::uint32_t k) {
    auto it = rules_.find(g);
    if (it == rules_.end()) return DiffExpr::jet(g, k);
    auto key = std::make_pair(g, k);
    if (auto c = cache_.find(key); c != cache_.end()) return c->second;
    DiffExpr v = k == 0 ? it->second : differentiate(jet(g, k - 1));
    cache_.emplace(key, v);
    return v;
  }

  DiffExpr apply(const Monomial& m) {
    DiffExpr r(1);
    for (const auto& f : m.factors) {
      DiffExpr base = f.atom.is_jet() ? jet(f.atom.gen, f.atom.order)
                                      : antiderivative(ctx_, (*this)(DiffExpr::monomial(*f.atom.arg)));
      if (f.exponent < 0) base = unit_inverse(base, ctx_);
      r *= pow(base, static_cast<unsigned>(std::abs(f.exponent)));
    }
    if (m.exp_arg) r *= DiffExpr::exp_integral((*this)(*m.exp_arg));
    return r;
  }

  const Context& ctx_;
  std::map<GenId, DiffExpr> rules_;
  std::map<std::pair<GenId, std::uint32_t>, DiffExpr> cache_;
};

inline DiffExpr substitute(const Context& ctx, const DiffExpr& e, std::map<GenId, DiffExpr> rules) {
  return Substitution(ctx, std::move(rules))(e);
}

}  // namespace kpcalc
