#pragma once

// Coordinate changes between the families, table comparisons, and the
// covector identity relating K and ∂K.

#include <string>
#include <vector>

#include "parser.hpp"
#include "tables.hpp"
#include "verify.hpp"

namespace kpcalc {

/// A change together with the rules expressing the old fields in the new ones.
struct InvertibleChange {
  CoordinateChange forward;
  std::map<GenId, DiffExpr> inverse;
};

/// L_(1,M) → K_(1,M): v1 = φ1'/φ1, v2 = φ1ψ1, q_i = φ_{i+1}/φ1, r_i = φ1ψ_{i+1}.
inline InvertibleChange gauge_change(int M, const ContextPtr& ctx = standard_context()) {
  if (M < 1) throw std::invalid_argument("gauge_change: need M >= 1");
  const LaxFamily k = lax_nonstandard(1, M, ctx);
  auto f = [&](const std::string& s) { return parse_function(ctx, s); };
  InvertibleChange c;
  c.forward.new_fields = k.fields;
  c.forward.definitions = {f("phi1'/phi1"), f("phi1*psi1")};
  c.inverse[ctx->id("phi1")] = f("E(v1)");
  c.inverse[ctx->id("psi1")] = f("v2*E(-v1)");
  for (int i = 1; i < M; ++i) {
    const std::string p = "phi" + std::to_string(i + 1), s = "psi" + std::to_string(i + 1);
    const std::string q = detail::indexed("q", i, M - 1), r = detail::indexed("r", i, M - 1);
    c.forward.definitions.push_back(f(p + "/phi1"));
    c.forward.definitions.push_back(f("phi1*" + s));
    c.inverse[ctx->id(p)] = f(q + "*E(v1)");
    c.inverse[ctx->id(s)] = f(r + "*E(-v1)");
  }
  return c;
}

/// K_(1,M) → ∂K_(1,M) = L_(2,M-1): u1 = v1, u2 = v2 + v1' + Σ q_i r_i, φ_i = q_i', ψ_i = r_i.
/// The inverse rules use q_i = J(φ_i).
inline InvertibleChange shift_change(int M = 2, const ContextPtr& ctx = standard_context()) {
  if (M < 2) throw std::invalid_argument("shift_change: need M >= 2");
  const LaxFamily k = lax_nonstandard(1, M, ctx);
  const LaxFamily l = lax_shifted(1, M, ctx);
  auto f = [&](const std::string& s) { return parse_function(ctx, s); };
  InvertibleChange c;
  c.forward.new_fields = l.fields;
  std::string u2 = "v2 + v1'", v2 = "u2 - u1'";
  std::vector<DiffExpr> legs;
  for (int i = 1; i < M; ++i) {
    const std::string q = k.field_name(k.fields[2 * i]), r = k.field_name(k.fields[2 * i + 1]);
    const std::string p = l.field_name(l.fields[2 * i]), s = l.field_name(l.fields[2 * i + 1]);
    u2 += " + " + q + "*" + r;
    v2 += " - J(" + p + ")*" + s;
    legs.push_back(f(q + "'"));
    legs.push_back(f(r));
    c.inverse[ctx->id(q)] = f("J(" + p + ")");
    c.inverse[ctx->id(r)] = f(s);
  }
  c.forward.definitions = {f("v1"), f(u2)};
  c.forward.definitions.insert(c.forward.definitions.end(), legs.begin(), legs.end());
  c.inverse[ctx->id("v1")] = f("u1");
  c.inverse[ctx->id("v2")] = f(v2);
  return c;
}

/// Transfer through the change, then express the entries in the new fields.
inline BracketMatrix transfer_bracket(const BracketMatrix& old, const InvertibleChange& change) {
  return substitute(transfer_bracket(old, change.forward), change.inverse);
}

/// Entrywise operator comparison of two tables over the same fields.
inline VerificationReport compare_tables(const BracketMatrix& actual, const BracketMatrix& expected,
                                         const std::string& title, const std::string& anchor,
                                         EqualityPolicy policy = {}) {
  Stopwatch sw;
  VerificationReport rep;
  rep.title = title;
  const auto& ctx = *expected.context();
  for (std::size_t i = 0; i < expected.size(); ++i)
    for (std::size_t j = i; j < expected.size(); ++j) {
      const GenId f = expected.fields()[i], g = expected.fields()[j];
      const std::string name = "{" + ctx[f].name + "," + ctx[g].name + "}";
      rep.add(check_equal(name, anchor, actual.at(actual.index(f), actual.index(g)), expected.at(i, j), policy));
    }
  rep.seconds = sw.seconds();
  return rep;
}

/// Compares the listed entries of a table with printed values.
inline VerificationReport compare_entries(const BracketMatrix& table, const std::vector<tables::Entry>& printed,
                                          const std::string& title, const std::string& anchor) {
  Stopwatch sw;
  VerificationReport rep;
  rep.title = title;
  for (const auto& e : printed)
    rep.add(check_equal("{" + e.f + "," + e.g + "}", anchor, table.at(e.f, e.g),
                        parse_operator(table.context(), e.expr)));
  rep.seconds = sw.seconds();
  return rep;
}

/// ∫res(X map(L,Y)) + ∫res(Y map(L,X)) for generic covectors X (slots x) and Y (slots y).
inline DiffExpr antisymmetry_defect(const LaxFamily& fam, HamiltonianMap map) {
  const Covector x = generic_covector(fam, 'x'), y = generic_covector(fam, 'y');
  const PsiDO L = fam.op();
  return residue(x.X * apply_map(map, L, y.X, fam.N)) + residue(y.X * apply_map(map, L, x.X, fam.N));
}

inline CheckResult check_antisymmetry(const LaxFamily& fam, HamiltonianMap map) {
  const DiffExpr d = antisymmetry_defect(fam, map);
  const bool ok = d.is_zero() || is_total_derivative(*fam.ctx, d);
  CheckResult r = check_true(fam.name + " " + to_string(map) + " antisymmetry", "bilinear form", ok);
  if (!ok) r.residual = to_string(d, *fam.ctx);
  return r;
}

namespace detail {

/// The ∂K covector built from a K covector: ∂⁻² g_u1 + ∂⁻¹ g_u2 + A∂⁻¹, with
/// gradients from the chain rule of the shift change; everything in (u1,u2,φ,ψ).
struct ShiftedCovector {
  Covector K;  // in the new fields
  Covector L;
  PsiDO B;
};

inline ShiftedCovector shifted_covector(char prefix) {
  const auto ctx = standard_context();
  const LaxFamily kf = lax_nonstandard(1, 2, ctx);
  const Covector ck = generic_covector(kf, prefix);
  auto id = [&](const char* s) { return ctx->id(s); };
  const DiffExpr q = DiffExpr::jet(id("q")), r = DiffExpr::jet(id("r"));
  const DiffExpr gv1 = ck.gradient.at(id("v1")), gv2 = ck.gradient.at(id("v2"));
  const DiffExpr gq = ck.gradient.at(id("q")), gr = ck.gradient.at(id("r"));

  std::map<GenId, DiffExpr> gl;
  gl[id("u2")] = gv2;
  gl[id("u1")] = gv1 + differentiate(gv2);
  gl[id("psi")] = gr - q * gv2;
  gl[id("phi")] = -antiderivative(*ctx, gq - r * gv2);

  const PsiDO B = ck.differential * PsiDO::dyad(ctx, DiffExpr(1), DiffExpr(1));
  PsiDO XL = detail::dinv_power(ctx, 2) * PsiDO::function(ctx, gl.at(id("u1"))) +
             detail::dinv_power(ctx, 1) * PsiDO::function(ctx, gl.at(id("u2"))) + B;

  Substitution sub(*ctx, shift_change(2, ctx).inverse);
  ShiftedCovector out{Covector{substitute(ck.X, sub), {}, substitute(ck.differential, sub)},
                      Covector{substitute(XL, sub), {}, substitute(B, sub)}, substitute(B, sub)};
  for (const auto& [g, e] : ck.gradient) out.K.gradient[g] = sub(e);
  for (const auto& [g, e] : gl) out.L.gradient[g] = sub(e);
  return out;
}

}  // namespace detail

/// Checks the relation between the K_(1,2) and ∂K_(1,2) covectors and the
/// equality of the two bilinear forms (NS on K, Ω on ∂K) modulo ∂.
inline VerificationReport verify_appendix_identity() {
  Stopwatch sw;
  VerificationReport rep;
  rep.title = "K(1,2) and L(2,1) covectors";
  const auto ctx = standard_context();
  const LaxFamily kf = lax_nonstandard(1, 2, ctx);
  const LaxFamily lf = lax_shifted(1, 2, ctx);
  const Covector ck = generic_covector(kf);
  auto id = [&](const char* s) { return ctx->id(s); };

  const PsiDO& A = ck.differential;
  rep.add(check_true("(A)_0 = 0", "differential part", order0(A).is_zero()));
  rep.add(check_true("A pure differential", "differential part", A.dyads().empty() && A.diff().begin()->first >= 0));
  rep.add(check_true("K pairing", "covector gradients", pairing_holds(kf, ck)));

  const auto x = detail::shifted_covector('x');
  const DiffExpr phi = DiffExpr::jet(id("phi")), psi = DiffExpr::jet(id("psi"));
  rep.add(check_true("B pure differential", "B = A dinv", x.B.dyads().empty() && x.B.diff().begin()->first >= 0));
  rep.add(check_equal("(B phi)_0", "gradient of psi", apply(x.B, phi), x.L.gradient.at(id("psi")), *ctx));
  rep.add(check_equal("(B* psi)_0", "gradient of phi", apply(adjoint(x.B), psi), x.L.gradient.at(id("phi")), *ctx));
  rep.add(check_true("L pairing", "covector gradients", pairing_holds(lf, x.L)));

  const PsiDO diff = x.K.X * PsiDO::dyad(ctx, DiffExpr(1), DiffExpr(1)) - x.L.X;
  const OperatorView v = expand_tail(diff, 8);
  const int top = v.coeffs.empty() ? -100 : v.coeffs.rbegin()->first;
  CheckResult orders = check_true("X_K dinv - X_L order <= -3", "covector tails", top <= -3);
  if (top > -3) orders.residual = to_string(v, *ctx);
  rep.add(orders);

  // Bilinear forms: ∫res(X_K Θ(Y_K)) with K in the new fields versus ∫res(X_L Ω(Y_L)).
  const auto y = detail::shifted_covector('y');
  Substitution sub(*ctx, shift_change(2, ctx).inverse);
  const PsiDO K = substitute(kf.op(), sub);
  const DiffExpr lhs = residue(x.K.X * ns_map(K, y.K.X));
  const DiffExpr rhs = residue(x.L.X * omega_map(lf.op(), y.L.X));
  const DiffExpr d = lhs - rhs;
  CheckResult forms = check_true("bilinear forms agree", "NS on K versus GD2+GD3 on dK",
                                 d.is_zero() || is_total_derivative(*ctx, d));
  if (forms.status != Status::verified) forms.residual = to_string(d, *ctx);
  rep.add(forms);
  rep.seconds = sw.seconds();
  return rep;
}

}  // namespace kpcalc
