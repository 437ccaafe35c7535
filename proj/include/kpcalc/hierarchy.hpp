#pragma once

// Lax flows of the standard and nonstandard families, the gauge map between
// them, and the map K ↦ ∂K.

#include <string>
#include <vector>

#include "structures.hpp"

namespace kpcalc {

struct FlowResult {
  int k = 0;
  std::vector<GenId> fields;        // family order
  std::map<GenId, DiffExpr> rates;  // ∂_k f

  const DiffExpr& at(GenId g) const { return rates.at(g); }

  /// One `field: expression` line per field.
  std::string to_text(const Context& ctx) const {
    std::string s;
    for (GenId g : fields) s += ctx[g].name + ": " + to_string(rates.at(g), ctx) + "\n";
    return s;
  }
};

class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::optional<GenId> single_field(const DiffExpr& e) {
  if (e.terms().size() != 1) return std::nullopt;
  const auto& [m, c] = *e.terms().begin();
  if (c != 1 || m.exp_arg || m.factors.size() != 1 || !m.factors[0].atom.is_jet() || m.factors[0].atom.order != 0 ||
      m.factors[0].exponent != 1)
    return std::nullopt;
  return m.factors[0].atom.gen;
}

/// (L^{k/N})_+ exactly when N divides k, else through the N-th root.
inline PsiDO fractional_plus(const PsiDO& L, int N, int k) {
  if (k % N == 0) return project(power(L, static_cast<unsigned>(k / N)), Part::plus);
  const int depth = N + k + 2;
  const OperatorView root = nth_root(L, N, depth);
  OperatorView p;
  p.depth = depth;
  p.add(0, DiffExpr(1));
  for (int i = 0; i < k; ++i) p = mul(p, root, depth);
  return view_plus(L.context(), p);
}

/// Reads the coefficient fields off T = ∂_k L, moves left legs by P and right
/// legs by -R*, and checks T against the tangent template.
inline FlowResult decompose_flow(const LaxFamily& fam, const PsiDO& P, const PsiDO& R, const PsiDO& T, int k) {
  FlowResult out;
  out.k = k;
  out.fields = fam.fields;
  const PsiDO Ps = adjoint(R);
  for (const auto& [deg, c] : fam.shape.diff)
    if (auto g = single_field(c)) out.rates[*g] = T.coeff(deg);
  for (const auto& d : fam.shape.dyads) {
    if (auto g = single_field(d.left)) out.rates[*g] = apply(P, d.left);
    if (auto g = single_field(d.right)) out.rates[*g] = -apply(Ps, d.right);
  }
  for (GenId g : fam.fields)
    if (!out.rates.count(g)) throw DecompositionError(fam.name + ": no rule for field " + fam.field_name(g));
  if (compare_operators(fam.tangent(out.rates), T) != Equality::equal)
    throw DecompositionError(fam.name + ": flow " + std::to_string(k) + " leaves the tangent space");
  return out;
}

inline FlowResult zero_flow(const LaxFamily& fam) {
  FlowResult out;
  out.fields = fam.fields;
  for (GenId g : fam.fields) out.rates[g] = DiffExpr();
  return out;
}

}  // namespace detail

/// ∂_k L = [(L^{k/N})_+, L], ∂_k φ = ((L^{k/N})_+ φ)_0, ∂_k ψ = -((L^{k/N})_+^* ψ)_0.
/// A shifted family L = ∂K carries the flows of K = ∂⁻¹L: ∂_k L = ∂[Q, K] with
/// Q = (K^k)_{≥1}, φ moving by ∂Q∂⁻¹ and ψ by -Q*.
inline FlowResult standard_flow(const LaxFamily& fam, int k) {
  if (fam.kind == LaxFamily::Kind::nonstandard) throw std::invalid_argument("standard_flow: nonstandard family");
  if (k < 0) throw std::invalid_argument("standard_flow: k must be nonnegative");
  if (k == 0) return detail::zero_flow(fam);
  const PsiDO L = fam.op();
  if (fam.kind == LaxFamily::Kind::shifted) {
    const PsiDO dinv = PsiDO::dyad(fam.ctx, DiffExpr(1), DiffExpr(1));
    const PsiDO del = PsiDO::del(fam.ctx);
    const PsiDO K = dinv * L;
    const PsiDO Q = project(power(K, static_cast<unsigned>(k)), Part::geq1);
    return detail::decompose_flow(fam, del * Q * dinv, Q, del * commutator(Q, K), k);
  }
  const PsiDO P = detail::fractional_plus(L, fam.N, k);
  return detail::decompose_flow(fam, P, P, commutator(P, L), k);
}

/// ∂_k K = [(K^k)_{≥1}, K], ∂_k q = ((K^k)_{≥1} q)_0, ∂_k r = -((K^k)_{≥1}^* r)_0, likewise v_{N+1}.
inline FlowResult nonstandard_flow(const LaxFamily& fam, int k) {
  if (fam.kind != LaxFamily::Kind::nonstandard) throw std::invalid_argument("nonstandard_flow: standard family");
  if (k < 0) throw std::invalid_argument("nonstandard_flow: k must be nonnegative");
  if (k == 0) return detail::zero_flow(fam);
  const PsiDO K = fam.op();
  const PsiDO P = project(power(K, static_cast<unsigned>(k)), Part::geq1);
  return detail::decompose_flow(fam, P, P, commutator(P, K), k);
}

inline FlowResult flow(const LaxFamily& fam, int k) {
  return fam.kind == LaxFamily::Kind::nonstandard ? nonstandard_flow(fam, k) : standard_flow(fam, k);
}

/// Rules new field ↦ definition in the old fields.
inline std::map<GenId, DiffExpr> forward_rules(const CoordinateChange& c) {
  std::map<GenId, DiffExpr> r;
  for (std::size_t i = 0; i < c.new_fields.size(); ++i) r[c.new_fields[i]] = c.definitions[i];
  return r;
}

inline PsiDO substitute(const PsiDO& p, const std::map<GenId, DiffExpr>& rules) {
  Substitution sub(p.ctx(), rules);
  return substitute(p, sub);
}

/// K_(1,M) = φ1⁻¹ L_(1,M) φ1 with its coordinates.
struct GaugeTransform {
  LaxFamily L, K;
  InvertibleChange change;
  PsiDO conjugated;  // φ1⁻¹ L φ1 in the L fields

  /// The K template with the substitutions inserted equals the conjugated L.
  bool template_matches() const { return substitute(K.op(), forward_rules(change.forward)) == conjugated; }
  /// Conjugating back by φ1⁻¹ recovers L.
  bool round_trip() const {
    const DiffExpr phi1 = DiffExpr::jet(L.ctx->id("phi1"));
    return conjugate_by(conjugated, unit_inverse(phi1, *L.ctx)) == L.op();
  }
};

inline GaugeTransform gauge_transform(int M, const ContextPtr& ctx = standard_context()) {
  GaugeTransform g{lax_standard(1, M, ctx), lax_nonstandard(1, M, ctx), gauge_change(M, ctx),
                   PsiDO::constant(ctx, 0)};
  g.conjugated = conjugate_by(g.L.op(), DiffExpr::jet(ctx->id("phi1")));
  return g;
}

/// L_(N+1,M-1) = ∂ K_(N,M) with u_j read from the product and φ_i = q_i', ψ_i = r_i.
struct ShiftTransform {
  LaxFamily K, L;
  CoordinateChange change;  // L fields in the K fields
  PsiDO product;            // ∂ ∘ K in the K fields

  bool template_matches() const { return substitute(L.op(), forward_rules(change)) == product; }
};

inline ShiftTransform multiply_by_del(int N, int M, const ContextPtr& ctx = standard_context()) {
  ShiftTransform s{lax_nonstandard(N, M, ctx), lax_shifted(N, M, ctx), {}, PsiDO::constant(ctx, 0)};
  s.product = PsiDO::del(ctx) * s.K.op();
  s.change.new_fields = s.L.fields;
  for (int j = 1; j <= N + 1; ++j) s.change.definitions.push_back(s.product.coeff(N + 1 - j));
  for (const auto& d : s.K.shape.dyads) {
    if (d.left == DiffExpr(1)) continue;
    s.change.definitions.push_back(differentiate(d.left));
    s.change.definitions.push_back(d.right);
  }
  return s;
}

/// Pushes the L_(1,2)-type flow through the gauge change and compares it with
/// the nonstandard flow, with the (·)_{≥1} projection (which carries the ∂_k φ1
/// correction) and without it (plain (K^k)_+).
inline VerificationReport check_gauge_covariance(int k, int M = 2) {
  Stopwatch sw;
  VerificationReport rep;
  rep.title = "gauge covariance k=" + std::to_string(k);
  const auto g = gauge_transform(M);
  const auto rules = forward_rules(g.change.forward);
  Substitution to_l(*g.L.ctx, rules);

  const FlowResult sf = standard_flow(g.L, k);
  const FlowResult nf = nonstandard_flow(g.K, k);
  std::map<GenId, DiffExpr> pushed;
  for (std::size_t i = 0; i < g.K.fields.size(); ++i) {
    const GenId f = g.K.fields[i];
    pushed[f] = directional(g.L.ctx, g.change.forward.definitions[i], sf.rates);
    rep.add(check_equal("d" + std::to_string(k) + " " + g.K.field_name(f), "with correction", pushed[f],
                        to_l(nf.at(f)), *g.L.ctx));
  }
  if (k > 0) {
    // Without the correction: [(K^k)_+, K], compared as operators in the L fields.
    const PsiDO K = g.K.op();
    const PsiDO plain = commutator(project(power(K, static_cast<unsigned>(k)), Part::plus), K);
    const bool same = substitute(plain, to_l) == substitute(g.K.tangent(pushed), to_l);
    CheckResult c{"without correction", "plain (K^k)_+ projection", Status::skipped, "",
                  same ? "agrees" : "differs: the order-zero part of (K^k)_+ generates an extra gauge term"};
    rep.add(c);
  }
  rep.seconds = sw.seconds();
  return rep;
}

}  // namespace kpcalc
