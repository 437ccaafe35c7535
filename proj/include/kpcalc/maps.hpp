#pragma once

// Hamiltonian maps X ↦ δL acting on covectors.

#include <string>

#include "integration.hpp"
#include "psido.hpp"

namespace kpcalc {

enum class HamiltonianMap { gd2, gd2_dirac, ns, omega, gd3 };

inline std::string to_string(HamiltonianMap m) {
  switch (m) {
    case HamiltonianMap::gd2: return "GD2";
    case HamiltonianMap::gd2_dirac: return "GD2+Dirac";
    case HamiltonianMap::ns: return "NS";
    case HamiltonianMap::omega: return "GD2+GD3";
    case HamiltonianMap::gd3: return "GD3";
  }
  return "?";
}

/// (LX)_+ L - L (XL)_+
inline PsiDO gd2_map(const PsiDO& L, const PsiDO& X) {
  return project(L * X, Part::plus) * L - L * project(X * L, Part::plus);
}

/// [L, ∫res[L, X]]
inline PsiDO gd3_map(const PsiDO& L, const PsiDO& X) {
  const DiffExpr w = antiderivative(L.ctx(), residue(commutator(L, X)));
  return commutator(L, PsiDO::function(L.context(), w));
}

/// GD2 with the Dirac term (1/N)[L, ∫res[L, X]] enforcing u_1 = 0.
inline PsiDO gd2_dirac_map(const PsiDO& L, const PsiDO& X, int N) {
  PsiDO t = gd3_map(L, X);
  t *= Rational(1, N);
  return gd2_map(L, X) + t;
}

/// Ω = GD2 + GD3.
inline PsiDO omega_map(const PsiDO& L, const PsiDO& X) { return gd2_map(L, X) + gd3_map(L, X); }

/// Nonstandard map: (KX)_+K - K(XK)_+ + [K, (KX)_0] + ∂⁻¹res[K,X] K + [K, ∫res[K,X]].
inline PsiDO ns_map(const PsiDO& K, const PsiDO& X) {
  const auto& ctx = K.context();
  const DiffExpr res = residue(commutator(K, X));
  PsiDO r = gd2_map(K, X);
  r += commutator(K, PsiDO::function(ctx, order0(K * X)));
  r += PsiDO::dyad(ctx, DiffExpr(1), res) * K;
  r += commutator(K, PsiDO::function(ctx, antiderivative(K.ctx(), res)));
  return r;
}

inline PsiDO apply_map(HamiltonianMap m, const PsiDO& L, const PsiDO& X, int N) {
  switch (m) {
    case HamiltonianMap::gd2: return gd2_map(L, X);
    case HamiltonianMap::gd2_dirac: return gd2_dirac_map(L, X, N);
    case HamiltonianMap::ns: return ns_map(L, X);
    case HamiltonianMap::omega: return omega_map(L, X);
    case HamiltonianMap::gd3: return gd3_map(L, X);
  }
  throw std::invalid_argument("unknown map");
}

}  // namespace kpcalc
