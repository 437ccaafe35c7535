#pragma once

// Generic covectors δH/δL and the pairing ∫res(X δL) = Σ ∫ x_f δf.
//
// X is assembled from fresh slot generators: a nonlocal part ∂^{-k} x carrying
// the gradients of the differential coefficients, and a differential part with
// free coefficients whose actions on the dyad legs give the remaining gradients.

#include <string>

#include "family.hpp"
#include "integration.hpp"

namespace kpcalc {

struct Covector {
  PsiDO X;
  std::map<GenId, DiffExpr> gradient;  // x_f for each coordinate field f
  PsiDO differential;                   // the free differential part (A, resp. B)
};

namespace detail {

inline PsiDO dinv_power(const ContextPtr& ctx, int k) {
  return power(PsiDO::dyad(ctx, DiffExpr(1), DiffExpr(1)), static_cast<unsigned>(k));
}

class SlotSupply {
 public:
  SlotSupply(ContextPtr ctx, char prefix) : ctx_(std::move(ctx)), prefix_(prefix) {}
  DiffExpr next() {
    const std::string name = std::string(1, prefix_) + std::to_string(count_++);
    auto g = ctx_->find(name);
    if (!g) throw std::out_of_range("covector: context lacks slot generator " + name);
    return DiffExpr::jet(*g);
  }

 private:
  ContextPtr ctx_;
  char prefix_;
  int count_ = 0;
};

}  // namespace detail

/// The generic covector of a family. prefix selects the slot generators
/// (x0, x1, ... or y0, y1, ...); two prefixes give independent covectors.
inline Covector generic_covector(const LaxFamily& fam, char prefix = 'x') {
  const auto& ctx = fam.ctx;
  detail::SlotSupply slot(ctx, prefix);
  Covector cv{PsiDO::constant(ctx, 0), {}, PsiDO::constant(ctx, 0)};

  // Differential coefficients: the slot for the ∂^k coefficient sits at ∂^{-(k+1)}.
  std::vector<std::pair<GenId, int>> local;  // (field, k) with coefficient at ∂^k
  for (const auto& [k, c] : fam.shape.diff) {
    if (c.terms().size() != 1 || c.is_constant()) continue;
    const auto& m = c.terms().begin()->first;
    if (m.factors.size() != 1 || !m.factors[0].atom.is_jet()) continue;
    local.push_back({m.factors[0].atom.gen, k});
  }
  for (const auto& [g, k] : local) {
    DiffExpr x = slot.next();
    cv.gradient[g] = x;
    cv.X += detail::dinv_power(ctx, k + 1) * PsiDO::function(ctx, x);
  }

  std::vector<Dyad> legs;  // field dyads (both legs are fields)
  DiffExpr order0;         // nonstandard: gradient of v_{N+1}
  for (const auto& d : fam.shape.dyads) {
    if (d.left == DiffExpr(1)) {
      const GenId g = d.right.terms().begin()->first.factors[0].atom.gen;
      order0 = slot.next();
      cv.gradient[g] = order0;
      cv.X += PsiDO::function(ctx, order0);
    } else {
      legs.push_back(d);
    }
  }

  // Differential part: (A)_0 = 0 when an order-zero slot is present.
  const int lowest = fam.kind == LaxFamily::Kind::nonstandard ? 1 : 0;
  const int count = std::max<int>(2 * static_cast<int>(legs.size()), 1);
  PsiDO A = PsiDO::constant(ctx, 0);
  for (int k = lowest; k < lowest + count; ++k) A += PsiDO::function(ctx, slot.next()) * PsiDO::del(ctx, k);
  cv.differential = A;
  cv.X += A;
  const PsiDO As = adjoint(A);
  for (const auto& d : legs) {
    const GenId left = d.left.terms().begin()->first.factors[0].atom.gen;
    const GenId right = d.right.terms().begin()->first.factors[0].atom.gen;
    cv.gradient[right] = apply(A, d.left) + order0 * d.left;
    cv.gradient[left] = apply(As, d.right) + order0 * d.right;
  }
  return cv;
}

/// ∫res(X δL) - Σ x_f δf for fresh variations (d0, d1, ...); zero modulo ∂ iff the pairing holds.
inline DiffExpr pairing_defect(const LaxFamily& fam, const Covector& cv) {
  detail::SlotSupply dslot(fam.ctx, 'd');
  std::map<GenId, DiffExpr> delta;
  for (GenId g : fam.fields) delta[g] = dslot.next();
  DiffExpr defect = residue(cv.X * fam.tangent(delta));
  for (GenId g : fam.fields) defect -= cv.gradient.at(g) * delta.at(g);
  return defect;
}

inline bool pairing_holds(const LaxFamily& fam, const Covector& cv) {
  const DiffExpr d = pairing_defect(fam, cv);
  return d.is_zero() || is_total_derivative(*fam.ctx, d);
}

}  // namespace kpcalc
