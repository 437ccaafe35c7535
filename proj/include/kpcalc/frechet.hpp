#pragma once

// Fréchet derivatives: the linearization of an expression as a row of operators.

#include <map>
#include <vector>

#include "psido.hpp"

namespace kpcalc {

/// Field → operator D_f with δe = Σ_f D_f(δf). Zero entries are omitted.
using LocalOperatorRow = std::map<GenId, PsiDO>;

namespace detail {

inline void add_row(LocalOperatorRow& row, const LocalOperatorRow& part, const PsiDO& left) {
  for (const auto& [g, op] : part) {
    PsiDO t = left * op;
    auto [it, inserted] = row.try_emplace(g, t);
    if (!inserted) it->second += t;
  }
}

inline LocalOperatorRow frechet_monomial(const ContextPtr& ctx, const Monomial& m, const std::set<GenId>& fields);

inline LocalOperatorRow frechet_expr(const ContextPtr& ctx, const DiffExpr& e, const std::set<GenId>& fields) {
  LocalOperatorRow row;
  for (const auto& [m, c] : e.terms()) {
    if (m.is_one()) continue;
    add_row(row, frechet_monomial(ctx, m, fields), PsiDO::constant(ctx, c));
  }
  return row;
}

inline LocalOperatorRow frechet_monomial(const ContextPtr& ctx, const Monomial& m, const std::set<GenId>& fields) {
  LocalOperatorRow row;
  const PsiDO dinv = PsiDO::dyad(ctx, DiffExpr(1), DiffExpr(1));
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const auto& f = m.factors[i];
    const DiffExpr rest = DiffExpr::monomial(drop_one(m, i), Rational(f.exponent));
    if (f.atom.is_jet()) {
      if (!fields.count(f.atom.gen)) continue;
      add_row(row, {{f.atom.gen, PsiDO::del(ctx, static_cast<int>(f.atom.order))}}, PsiDO::function(ctx, rest));
    } else {
      // δJ(p) = ∂⁻¹ δp
      add_row(row, frechet_monomial(ctx, *f.atom.arg, fields), PsiDO::function(ctx, rest) * dinv);
    }
  }
  if (m.exp_arg) {
    // δE(g) = E(g) ∂⁻¹ δg
    add_row(row, frechet_expr(ctx, *m.exp_arg, fields), PsiDO::function(ctx, DiffExpr::monomial(m)) * dinv);
  }
  for (auto it = row.begin(); it != row.end();) it = it->second.is_zero() ? row.erase(it) : std::next(it);
  return row;
}

}  // namespace detail

inline LocalOperatorRow frechet(const ContextPtr& ctx, const DiffExpr& e, const std::vector<GenId>& fields) {
  auto row = detail::frechet_expr(ctx, e, std::set<GenId>(fields.begin(), fields.end()));
  for (auto it = row.begin(); it != row.end();) it = it->second.is_zero() ? row.erase(it) : std::next(it);
  return row;
}

/// Σ_f D_f(δf): the directional derivative of e along the variations delta.
inline DiffExpr directional(const ContextPtr& ctx, const DiffExpr& e, const std::map<GenId, DiffExpr>& delta) {
  std::vector<GenId> fields;
  for (const auto& [g, d] : delta) fields.push_back(g);
  DiffExpr r;
  for (const auto& [g, op] : frechet(ctx, e, fields)) r += apply(op, delta.at(g));
  return r;
}

}  // namespace kpcalc
