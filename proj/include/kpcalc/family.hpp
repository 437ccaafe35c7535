#pragma once

// Lax families: operator templates over coordinate fields, with their tangents.

#include <map>
#include <string>
#include <vector>

#include "frechet.hpp"

namespace kpcalc {

/// All field and slot generators used by the built-in families, declared once
/// so that families, substitutions and tables share a context.
inline ContextPtr standard_context() {
  static const ContextPtr ctx = [] {
    auto c = std::make_shared<Context>();
    c->add("phi1", true);
    for (const char* n : {"psi1", "phi2", "psi2", "phi3", "psi3", "v1", "v2", "v3", "q", "r", "q1", "r1", "q2", "r2",
                          "u1", "u2", "u3", "u4", "phi", "psi", "phi_1", "psi_1", "phi_2", "psi_2", "a1", "a2", "a3",
                          "a4", "a5", "b1", "b2", "b3"})
      c->add(n);
    for (char p : {'x', 'y', 'd'})
      for (int i = 0; i < 12; ++i) c->add(std::string(1, p) + std::to_string(i));
    return ContextPtr(c);
  }();
  return ctx;
}

/// Σ diff[k] ∂^k + Σ left ∂⁻¹ right, with coefficients in the coordinate fields.
struct OperatorTemplate {
  std::map<int, DiffExpr> diff;
  std::vector<Dyad> dyads;
};

struct LaxFamily {
  enum class Kind { standard, nonstandard, shifted };

  std::string name;
  Kind kind = Kind::standard;
  int N = 1;  // differential order
  int M = 0;  // constraint count (dyads for standard, dyads + 1 for nonstandard)
  ContextPtr ctx;
  std::vector<GenId> fields;
  OperatorTemplate shape;

  PsiDO op() const {
    PsiDO::DiffPart d;
    for (const auto& [k, c] : shape.diff)
      if (!c.is_zero()) d[k] = c;
    return PsiDO::from_parts(ctx, std::move(d), shape.dyads);
  }

  /// δL for field variations delta (missing fields do not vary).
  PsiDO tangent(const std::map<GenId, DiffExpr>& delta) const {
    auto dir = [&](const DiffExpr& e) { return directional(ctx, e, delta); };
    PsiDO r = PsiDO::constant(ctx, 0);
    for (const auto& [k, c] : shape.diff) r += PsiDO::function(ctx, dir(c)) * PsiDO::del(ctx, k);
    for (const auto& d : shape.dyads) {
      r += PsiDO::dyad(ctx, dir(d.left), d.right);
      r += PsiDO::dyad(ctx, d.left, dir(d.right));
    }
    return r;
  }

  std::string field_name(GenId g) const { return (*ctx)[g].name; }
  std::vector<std::string> field_names() const {
    std::vector<std::string> out;
    for (GenId g : fields) out.push_back(field_name(g));
    return out;
  }
};

namespace detail {

inline DiffExpr field(const ContextPtr& ctx, const std::string& name) { return DiffExpr::jet(ctx->id(name)); }

inline std::string indexed(const std::string& base, int i, int count) {
  return count == 1 ? base : base + std::to_string(i);
}

}  // namespace detail

/// L_(N,M) = ∂^N + u_2 ∂^{N-2} + ... + u_N + Σ φ_i ∂⁻¹ ψ_i.
inline LaxFamily lax_standard(int N, int M, ContextPtr ctx = standard_context()) {
  if (N < 1 || M < 0) throw std::invalid_argument("lax_standard: need N >= 1, M >= 0");
  LaxFamily f;
  f.name = "L(" + std::to_string(N) + "," + std::to_string(M) + ")";
  f.kind = LaxFamily::Kind::standard;
  f.N = N;
  f.M = M;
  f.ctx = ctx;
  f.shape.diff[N] = DiffExpr(1);
  for (int j = 2; j <= N; ++j) {
    const std::string u = "u" + std::to_string(j);
    f.fields.push_back(ctx->id(u));
    f.shape.diff[N - j] = detail::field(ctx, u);
  }
  for (int i = 1; i <= M; ++i) {
    const std::string p = "phi" + std::to_string(i), s = "psi" + std::to_string(i);
    f.fields.push_back(ctx->id(p));
    f.fields.push_back(ctx->id(s));
    f.shape.dyads.push_back({detail::field(ctx, p), detail::field(ctx, s)});
  }
  return f;
}

/// K_(N,M) = ∂^N + v_1 ∂^{N-1} + ... + v_N + ∂⁻¹ v_{N+1} + Σ_{i<M} q_i ∂⁻¹ r_i.
inline LaxFamily lax_nonstandard(int N, int M, ContextPtr ctx = standard_context()) {
  if (N < 1 || M < 1) throw std::invalid_argument("lax_nonstandard: need N >= 1, M >= 1");
  LaxFamily f;
  f.name = "K(" + std::to_string(N) + "," + std::to_string(M) + ")";
  f.kind = LaxFamily::Kind::nonstandard;
  f.N = N;
  f.M = M;
  f.ctx = ctx;
  f.shape.diff[N] = DiffExpr(1);
  for (int j = 1; j <= N; ++j) {
    const std::string v = "v" + std::to_string(j);
    f.fields.push_back(ctx->id(v));
    f.shape.diff[N - j] = detail::field(ctx, v);
  }
  const std::string last = "v" + std::to_string(N + 1);
  f.fields.push_back(ctx->id(last));
  f.shape.dyads.push_back({DiffExpr(1), detail::field(ctx, last)});
  for (int i = 1; i < M; ++i) {
    const std::string q = detail::indexed("q", i, M - 1), r = detail::indexed("r", i, M - 1);
    f.fields.push_back(ctx->id(q));
    f.fields.push_back(ctx->id(r));
    f.shape.dyads.push_back({detail::field(ctx, q), detail::field(ctx, r)});
  }
  return f;
}

/// ∂K_(N,M) = ∂^{N+1} + u_1 ∂^N + ... + u_{N+1} + Σ_{i<M} φ_i ∂⁻¹ ψ_i.
inline LaxFamily lax_shifted(int N, int M, ContextPtr ctx = standard_context()) {
  if (N < 1 || M < 1) throw std::invalid_argument("lax_shifted: need N >= 1, M >= 1");
  LaxFamily f;
  f.name = "L(" + std::to_string(N + 1) + "," + std::to_string(M - 1) + ")";
  f.kind = LaxFamily::Kind::shifted;
  f.N = N + 1;
  f.M = M - 1;
  f.ctx = ctx;
  f.shape.diff[N + 1] = DiffExpr(1);
  for (int j = 1; j <= N + 1; ++j) {
    const std::string u = "u" + std::to_string(j);
    f.fields.push_back(ctx->id(u));
    f.shape.diff[N + 1 - j] = detail::field(ctx, u);
  }
  for (int i = 1; i < M; ++i) {
    const std::string p = M - 1 == 1 ? "phi" : "phi_" + std::to_string(i);
    const std::string s = M - 1 == 1 ? "psi" : "psi_" + std::to_string(i);
    f.fields.push_back(ctx->id(p));
    f.fields.push_back(ctx->id(s));
    f.shape.dyads.push_back({detail::field(ctx, p), detail::field(ctx, s)});
  }
  return f;
}

}  // namespace kpcalc
