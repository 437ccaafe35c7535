#pragma once

// Bracket tables: the printed ones, and derived goldens for entries that are
// not printed. Each derived golden names the oracle that produced it; the test
// suite re-derives them independently.

#include <string>
#include <vector>

#include "bracket.hpp"
#include "family.hpp"

namespace kpcalc::tables {

/// A printed table entry {f,g} = expr.
struct Entry {
  std::string f, g, expr;
};

inline BracketMatrix from_entries(const LaxFamily& fam, const std::vector<Entry>& entries) {
  BracketMatrix t(fam.ctx, fam.fields);
  for (const auto& e : entries) t.set(e.f, e.g, e.expr);
  return t;
}

/// L_(1,M) under GD2+Dirac:
///   {φ_i,φ_j} = -(φ_i∂⁻¹φ_j + φ_j∂⁻¹φ_i), {ψ_i,ψ_j} likewise,
///   {φ_i,ψ_j} = δ_ij L + φ_i∂⁻¹ψ_j.
inline BracketMatrix standard_table(int M) {
  const LaxFamily fam = lax_standard(1, M);
  BracketMatrix t(fam.ctx, fam.fields);
  std::string lax = "del";
  for (int i = 1; i <= M; ++i) lax += " + dinv(phi" + std::to_string(i) + ", psi" + std::to_string(i) + ")";
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j) {
      const std::string pi = "phi" + std::to_string(i), pj = "phi" + std::to_string(j);
      const std::string si = "psi" + std::to_string(i), sj = "psi" + std::to_string(j);
      if (i <= j) {
        t.set(pi, pj, "-(dinv(" + pi + ", " + pj + ") + dinv(" + pj + ", " + pi + "))");
        t.set(si, sj, "-(dinv(" + si + ", " + sj + ") + dinv(" + sj + ", " + si + "))");
      }
      t.set(pi, sj, (i == j ? lax + " + " : std::string()) + "dinv(" + pi + ", " + sj + ")");
    }
  return t;
}

/// K_(1,2) under the nonstandard map, as printed.
inline std::vector<Entry> nonstandard_entries() {
  return {
      {"v1", "v1", "2*del"},
      {"v1", "v2", "del^2 + del*v1 + del*dinv(q, r)"},
      {"v1", "q", "-dinv(q', 1)"},
      {"v1", "r", "-r"},
      {"v2", "v2", "del*v2 + v2*del + dinv(v2*q, r) + dinv(r, q*v2)"},
      {"v2", "q", "-del*q + v1*q - dinv(v2*q, 1) - dinv(r, q^2)"},
      {"v2", "r", "del*r - v1*r + dinv(r, q*r) - dinv(r, v2)"},
      {"q", "q", "-2*dinv(q, q) + dinv(1, q^2) + dinv(q^2, 1)"},
      {"q", "r", "del + v1 + 2*dinv(q, r) + dinv(1, v2) - dinv(1, q*r)"},
      {"r", "r", "-2*dinv(r, r)"},
  };
}

inline BracketMatrix nonstandard_table() { return from_entries(lax_nonstandard(1, 2), nonstandard_entries()); }

/// L_(2,1) = ∂K_(1,2) under Ω: the printed entries.
inline std::vector<Entry> omega_printed() {
  return {
      {"u1", "u1", "2*del"}, {"u1", "u2", "-del^2 + del*u1"}, {"u1", "phi", "phi"},
      {"u1", "psi", "-psi"}, {"phi", "phi", "-2*dinv(phi, phi)"},
  };
}

/// Full Ω table of L_(2,1). Derived golden; oracle: transfer of the K_(1,2)
/// table through u1 = v1, u2 = v2 + v1' + qr, φ = q', ψ = r, rewritten with q = J(φ).
inline BracketMatrix omega_table() {
  return BracketMatrix::parse(standard_context(),
                              "{u1,u1} = 2*del\n"
                              "{u1,u2} = -del^2 + u1*del + u1'\n"
                              "{u1,phi} = phi\n"
                              "{u1,psi} = -psi\n"
                              "{u2,u2} = 2*u2*del + u2'\n"
                              "{u2,phi} = 2*phi*del + phi'\n"
                              "{u2,psi} = psi*del\n"
                              "{phi,phi} = dinv(-2*phi, phi)\n"
                              "{phi,psi} = del^2 + u1*del + u2 + dinv(2*phi, psi)\n"
                              "{psi,psi} = dinv(-2*psi, psi)\n");
}

/// The 1-constraint comparison entries (second GD structure of L_(2,1)), as printed.
inline std::vector<Entry> gd2_printed() {
  return {
      {"u1", "u1", "-2*del"}, {"u1", "u2", "del^2 - del*u1"}, {"u1", "phi", "-phi"},
      {"u1", "psi", "psi"},   {"phi", "phi", "-dinv(phi, phi)"},
  };
}

/// Full GD3 table of L_(2,1). Derived golden; oracle: [L, w] for scalar w gives
/// δ(u1,u2,φ,ψ) = V(w) with V = (2∂, ∂²+u1∂, -φ, ψ), hence P = -V ∂⁻¹ V*.
inline BracketMatrix gd3_table() {
  return BracketMatrix::parse(standard_context(),
                              "{u1,u1} = 4*del\n"
                              "{u1,u2} = -2*del^2 + 2*u1*del + 2*u1'\n"
                              "{u1,phi} = 2*phi\n"
                              "{u1,psi} = -2*psi\n"
                              "{u2,u2} = -del^3 + (2*u1' + u1^2)*del + (u1'' + u1*u1')\n"
                              "{u2,phi} = phi*del + (phi' + u1*phi)\n"
                              "{u2,psi} = -psi*del + (-psi' - u1*psi)\n"
                              "{phi,phi} = dinv(-phi, phi)\n"
                              "{phi,psi} = dinv(phi, psi)\n"
                              "{psi,psi} = dinv(-psi, psi)\n");
}

/// Full GD2 table of L_(2,1). Derived golden; oracle: Ω table minus GD3 table.
inline BracketMatrix gd2_table() {
  return BracketMatrix::parse(standard_context(),
                              "{u1,u1} = -2*del\n"
                              "{u1,u2} = del^2 - u1*del - u1'\n"
                              "{u1,phi} = -phi\n"
                              "{u1,psi} = psi\n"
                              "{u2,u2} = del^3 + (-2*u1' + 2*u2 - u1^2)*del + (-u1'' + u2' - u1*u1')\n"
                              "{u2,phi} = phi*del - u1*phi\n"
                              "{u2,psi} = 2*psi*del + (psi' + u1*psi)\n"
                              "{phi,phi} = dinv(-phi, phi)\n"
                              "{phi,psi} = del^2 + u1*del + u2 + dinv(phi, psi)\n"
                              "{psi,psi} = dinv(-psi, psi)\n");
}

/// K_(1,3) under the nonstandard map. Derived golden; oracle: transfer of
/// standard_table(3) through the gauge change v1 = φ1'/φ1, v2 = φ1ψ1,
/// q_i = φ_{i+1}/φ1, r_i = φ1ψ_{i+1}, rewritten with φ1 = E(v1).
inline BracketMatrix nonstandard_table_13() {
  return BracketMatrix::parse(
      standard_context(),
      "{v1,v1} = 2*del\n"
      "{v1,v2} = del^2 + v1*del + (v1' + q1*r1 + q2*r2) + dinv(q1', r1) + dinv(q2', r2)\n"
      "{v1,q1} = dinv(-q1', 1)\n"
      "{v1,r1} = -r1\n"
      "{v1,q2} = dinv(-q2', 1)\n"
      "{v1,r2} = -r2\n"
      "{v2,v2} = 2*v2*del + v2' + dinv(v2*q1, r1) + dinv(v2*q2, r2) + dinv(r1, v2*q1) + dinv(r2, v2*q2)\n"
      "{v2,q1} = -q1*del + (-q1' + v1*q1) + dinv(-v2*q1, 1) + dinv(-r2, q1*q2) + dinv(-r1, q1^2)\n"
      "{v2,r1} = r1*del + (r1' - v1*r1) + dinv(r1, -v2 + q1*r1) + dinv(r2, r1*q2)\n"
      "{v2,q2} = -q2*del + (-q2' + v1*q2) + dinv(-v2*q2, 1) + dinv(-r1, q1*q2) + dinv(-r2, q2^2)\n"
      "{v2,r2} = r2*del + (r2' - v1*r2) + dinv(r2, -v2 + q2*r2) + dinv(r1, q1*r2)\n"
      "{q1,q1} = dinv(q1^2, 1) + dinv(-2*q1, q1) + dinv(1, q1^2)\n"
      "{q1,r1} = del + v1 + dinv(-1, -v2 + q1*r1) + dinv(2*q1, r1) + dinv(q2, r2)\n"
      "{q1,q2} = dinv(q1*q2, 1) + dinv(-q2, q1) + dinv(-q1, q2) + dinv(1, q1*q2)\n"
      "{q1,r2} = dinv(q1, r2) + dinv(-1, q1*r2)\n"
      "{r1,r1} = dinv(-2*r1, r1)\n"
      "{r1,q2} = dinv(-r1*q2, 1) + dinv(r1, q2)\n"
      "{r1,r2} = dinv(-r2, r1) + dinv(-r1, r2)\n"
      "{q2,q2} = dinv(q2^2, 1) + dinv(-2*q2, q2) + dinv(1, q2^2)\n"
      "{q2,r2} = del + v1 + dinv(-1, -v2 + q2*r2) + dinv(q1, r1) + dinv(2*q2, r2)\n"
      "{r2,r2} = dinv(-2*r2, r2)\n");
}

/// L_(2,2) = ∂K_(1,3) under Ω. Derived golden; oracle: transfer of
/// nonstandard_table_13() through u1 = v1, u2 = v2 + v1' + Σq_i r_i,
/// φ_i = q_i', ψ_i = r_i, rewritten with q_i = J(φ_i).
inline BracketMatrix shifted_table_22() {
  return BracketMatrix::parse(
      standard_context(),
      "{u1,u1} = 2*del\n"
      "{u1,u2} = -del^2 + u1*del + u1'\n"
      "{u1,phi_1} = phi_1\n"
      "{u1,psi_1} = -psi_1\n"
      "{u1,phi_2} = phi_2\n"
      "{u1,psi_2} = -psi_2\n"
      "{u2,u2} = 2*u2*del + u2'\n"
      "{u2,phi_1} = 2*phi_1*del + phi_1'\n"
      "{u2,psi_1} = psi_1*del\n"
      "{u2,phi_2} = 2*phi_2*del + phi_2'\n"
      "{u2,psi_2} = psi_2*del\n"
      "{phi_1,phi_1} = dinv(-2*phi_1, phi_1)\n"
      "{phi_1,psi_1} = del^2 + u1*del + u2 + dinv(2*phi_1, psi_1) + dinv(phi_2, psi_2)\n"
      "{phi_1,phi_2} = dinv(-phi_2, phi_1) + dinv(-phi_1, phi_2)\n"
      "{phi_1,psi_2} = dinv(phi_1, psi_2)\n"
      "{psi_1,psi_1} = dinv(-2*psi_1, psi_1)\n"
      "{psi_1,phi_2} = dinv(psi_1, phi_2)\n"
      "{psi_1,psi_2} = dinv(-psi_2, psi_1) + dinv(-psi_1, psi_2)\n"
      "{phi_2,phi_2} = dinv(-2*phi_2, phi_2)\n"
      "{phi_2,psi_2} = del^2 + u1*del + u2 + dinv(phi_1, psi_1) + dinv(2*phi_2, psi_2)\n"
      "{psi_2,psi_2} = dinv(-2*psi_2, psi_2)\n");
}

/// Constant brackets {f_i, f_j} = M_ij ∂ over the modified variables a_1..a_n, b_1..b_m.
struct ConstantPoissonMatrix {
  std::vector<std::string> fields;
  std::vector<std::vector<Rational>> M;
};

inline ConstantPoissonMatrix constant_matrix(int n, int m, Rational aa_diag, Rational aa_off, Rational bb_diag,
                                             Rational bb_off, Rational ab) {
  ConstantPoissonMatrix c;
  for (int i = 1; i <= n; ++i) c.fields.push_back("a" + std::to_string(i));
  for (int j = 1; j <= m; ++j) c.fields.push_back("b" + std::to_string(j));
  const int s = n + m;
  c.M.assign(s, std::vector<Rational>(s, 0));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      const bool ai = i < n, aj = j < n;
      if (ai && aj) c.M[i][j] = i == j ? aa_diag : aa_off;
      else if (!ai && !aj) c.M[i][j] = i == j ? bb_diag : bb_off;
      else c.M[i][j] = ab;
    }
  return c;
}

/// {a_i,a_j} = -δ_ij ∂, {b_i,b_j} = δ_ij ∂, {a_i,b_j} = 0.
inline ConstantPoissonMatrix second_modified(int n, int m) { return constant_matrix(n, m, -1, 0, 1, 0, 0); }
/// Every bracket equals ∂.
inline ConstantPoissonMatrix third_modified(int n, int m) { return constant_matrix(n, m, 1, 1, 1, 1, 1); }
/// {a_i,a_j} = (1-δ_ij)∂, {b_i,b_j} = (1+δ_ij)∂, {a_i,b_j} = ∂.
inline ConstantPoissonMatrix combined_modified(int n, int m) { return constant_matrix(n, m, 0, 1, 2, 1, 1); }

inline BracketMatrix to_bracket(const ConstantPoissonMatrix& c, const ContextPtr& ctx = standard_context()) {
  std::vector<GenId> ids;
  for (const auto& f : c.fields) ids.push_back(ctx->id(f));
  BracketMatrix t(ctx, ids);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i; j < ids.size(); ++j) t.set(i, j, PsiDO::del(ctx) * c.M[i][j]);
  return t;
}

}  // namespace kpcalc::tables
