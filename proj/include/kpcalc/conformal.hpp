#pragma once

// Brackets of composite fields through the chain rule, Virasoro generators
// and spin checks.

#include <optional>
#include <string>
#include <vector>

#include "tables.hpp"
#include "verify.hpp"

namespace kpcalc {

/// A named expression in the fields of a table.
struct CompositeField {
  std::string name;
  DiffExpr definition;
};

inline CompositeField field_of(const BracketMatrix& table, const std::string& name) {
  return {name, DiffExpr::jet(table.context()->id(name))};
}

/// {A,B} = J_A P J_B* with J the Fréchet rows over the table fields.
inline PsiDO composite_bracket(const CompositeField& a, const CompositeField& b, const BracketMatrix& table) {
  const auto& ctx = table.context();
  const auto ra = frechet(ctx, a.definition, table.fields());
  const auto rb = frechet(ctx, b.definition, table.fields());
  if (ra.empty() || rb.empty()) throw std::invalid_argument("composite_bracket: definition does not involve the table fields");
  PsiDO out = PsiDO::constant(ctx, 0);
  for (const auto& [f, da] : ra) {
    PsiDO left = PsiDO::constant(ctx, 0);
    for (const auto& [g, db] : rb) left += table.at(table.index(f), table.index(g)) * adjoint(db);
    out += da * left;
  }
  return out;
}

/// s f ∂ + f'.
inline PsiDO spin_form(const ContextPtr& ctx, const DiffExpr& f, const Rational& s) {
  return PsiDO::function(ctx, DiffExpr(s) * f) * PsiDO::del(ctx) + PsiDO::function(ctx, differentiate(f));
}

/// c ∂³ + 2t∂ + t'.
inline PsiDO virasoro_form(const ContextPtr& ctx, const DiffExpr& t, const Rational& c) {
  return PsiDO::function(ctx, DiffExpr(c)) * PsiDO::del(ctx, 3) + spin_form(ctx, t, 2);
}

/// r with a = r b, if any.
inline std::optional<Rational> rational_ratio(const DiffExpr& a, const DiffExpr& b) {
  if (b.is_zero()) return std::nullopt;
  const auto& [m, cb] = *b.terms().begin();
  Rational r = 0;
  for (const auto& [ma, ca] : a.terms())
    if (compare(ma, m) == 0) r = ca / cb;
  if (a != DiffExpr(r) * b) return std::nullopt;
  return r;
}

/// c ∂⁻¹ f ∂^k, kept unexpanded as the term shape of an anomaly.
struct InversePattern {
  Rational c;
  int k = 0;

  PsiDO op(const ContextPtr& ctx, const DiffExpr& f) const {
    return PsiDO::dyad(ctx, DiffExpr(c), f) * PsiDO::del(ctx, k);
  }
  std::string to_text(const std::string& f) const {
    const std::string head = c == 1 ? "" : c == -1 ? "-" : kpcalc::to_string(c) + "*";
    return head + "dinv(1, " + f + ")" + (k == 1 ? "*del" : "*del^" + std::to_string(k));
  }
};

/// Reads rest as c ∂⁻¹ f ∂^k for some k ≤ 4. The ∂⁻¹ coefficient of ∂⁻¹ f ∂^k is (-1)^k f^(k).
inline std::optional<InversePattern> inverse_pattern(const PsiDO& rest, const DiffExpr& f) {
  const DiffExpr r = residue(rest);
  DiffExpr fk = f;
  for (int k = 1; k <= 4; ++k) {
    fk = -differentiate(fk);
    if (auto c = rational_ratio(r, fk)) {
      InversePattern p{*c, k};
      if (*c != 0 && rest == p.op(rest.context(), f)) return p;
    }
  }
  return std::nullopt;
}

/// {f,t} = s f ∂ + f' + anomaly, the anomaly empty or of the form c ∂⁻¹ f ∂^k.
struct SpinDecomposition {
  Rational s;
  std::optional<InversePattern> anomaly;

  /// "s*f*del + f' + anomaly" with f given by name.
  std::string to_text(const std::string& f) const {
    const std::string g = f.find_first_of("+-*") == std::string::npos ? f : "(" + f + ")";
    std::string out = (s == 1 ? "" : kpcalc::to_string(s) + "*") + g + "*del + " + g + "'";
    if (anomaly) {
      const std::string a = anomaly->to_text(f);
      out += a.front() == '-' ? " - " + a.substr(1) : " + " + a;
    }
    return out;
  }
};

inline std::optional<SpinDecomposition> decompose_spin(const PsiDO& bracket, const DiffExpr& f) {
  const auto& ctx = bracket.context();
  const PsiDO local = bracket - PsiDO::function(ctx, differentiate(f));
  auto pure = [&](const PsiDO& rest) {
    auto s = rational_ratio(rest.coeff(1), f);
    return s && rest == PsiDO::function(ctx, DiffExpr(*s) * f) * PsiDO::del(ctx) ? s : std::nullopt;
  };
  if (bracket.dyads().empty()) {
    if (auto s = pure(local)) return SpinDecomposition{*s, std::nullopt};
    return std::nullopt;
  }
  DiffExpr fk = f;
  for (int k = 1; k <= 4; ++k) {
    fk = -differentiate(fk);
    auto c = rational_ratio(residue(bracket), fk);
    if (!c || *c == 0) continue;
    const InversePattern p{*c, k};
    if (auto s = pure(local - p.op(ctx, f))) return SpinDecomposition{*s, p};
  }
  return std::nullopt;
}

/// {f,t} = s f ∂ + f'; the residual is the anomaly {f,t} - (s f ∂ + f').
inline VerificationReport check_spin(const CompositeField& f, const Rational& s, const CompositeField& t,
                                     const BracketMatrix& table, const std::string& anchor = "") {
  Stopwatch sw;
  VerificationReport rep;
  rep.title = "spin of " + f.name;
  const PsiDO b = composite_bracket(f, t, table);
  CheckResult c = check_equal("{" + f.name + "," + t.name + "} spin " + to_string(s), anchor, b,
                              spin_form(table.context(), f.definition, s));
  if (c.status == Status::mismatch)
    if (auto p = inverse_pattern(b - spin_form(table.context(), f.definition, s), f.definition))
      c.residual = p->to_text(f.name);
  rep.add(c);
  rep.seconds = sw.seconds();
  return rep;
}

inline CheckResult check_virasoro(const CompositeField& t, const Rational& c, const BracketMatrix& table,
                                  const std::string& anchor = "") {
  return check_equal("{" + t.name + "," + t.name + "} central " + to_string(c), anchor,
                     composite_bracket(t, t, table), virasoro_form(table.context(), t.definition, c));
}

/// A base table with its Virasoro generator and the expected brackets {f,t}.
struct ConformalContext {
  std::string name;
  BracketMatrix table;
  CompositeField t;
  Rational central;
  std::vector<std::pair<CompositeField, Rational>> spins;   // pure spin fields
  std::vector<std::pair<CompositeField, PsiDO>> anomalous;  // fields with a printed non-spin bracket

  VerificationReport verify() const {
    Stopwatch sw;
    VerificationReport rep;
    rep.title = "Virasoro generator, " + name;
    rep.add(check_virasoro(t, central, table, name));
    for (const auto& [f, s] : spins) rep.merge(check_spin(f, s, t, table, name));
    for (const auto& [f, expected] : anomalous)
      rep.add(check_equal("{" + f.name + "," + t.name + "}", name, composite_bracket(f, t, table), expected));
    rep.seconds = sw.seconds();
    return rep;
  }
};

/// L_(1,M) with t = Σ φ_i ψ_i: no central term, every φ_i and ψ_i of spin 1.
inline ConformalContext virasoro_standard(int M) {
  ConformalContext c{"standard", tables::standard_table(M), {"t", DiffExpr()}, 0, {}, {}};
  if (M != 2) c.name += " M=" + std::to_string(M);
  const auto fam = lax_standard(1, M);
  for (int i = 0; i < M; ++i)
    c.t.definition += DiffExpr::jet(fam.fields[2 * i]) * DiffExpr::jet(fam.fields[2 * i + 1]);
  for (GenId g : fam.fields) c.spins.push_back({field_of(c.table, fam.field_name(g)), 1});
  return c;
}

/// K_(1,2) with t = v2 + v1'/2 + qr.
inline ConformalContext virasoro_nonstandard() {
  const auto ctx = standard_context();
  auto f = [&](const std::string& s) { return parse_function(ctx, s); };
  ConformalContext c{"nonstandard", tables::nonstandard_table(), {"t", f("v2 + 1/2*v1' + q*r")}, Rational(1, 2), {}, {}};
  c.spins = {{field_of(c.table, "v1"), 1}, {field_of(c.table, "r"), Rational(3, 2)}, {{"q'", f("q'")}, Rational(3, 2)}};
  c.anomalous = {{field_of(c.table, "q"), parse_operator(ctx, "1/2*q*del + q' - 1/2*dinv(1, q)*del^2")}};
  return c;
}

/// L_(2,1) = ∂K_(1,2) with t = u2 - u1'/2.
inline ConformalContext virasoro_shifted() {
  const auto ctx = standard_context();
  ConformalContext c{"shifted", tables::omega_table(), {"t", parse_function(ctx, "u2 - 1/2*u1'")}, Rational(1, 2), {}, {}};
  c.spins = {{field_of(c.table, "u1"), 1}, {field_of(c.table, "phi"), Rational(3, 2)},
             {field_of(c.table, "psi"), Rational(3, 2)}};
  return c;
}

inline std::vector<std::string> conformal_context_names() { return {"standard", "nonstandard", "shifted"}; }

inline ConformalContext conformal_context(const std::string& name) {
  if (name == "standard") return virasoro_standard(2);
  if (name == "nonstandard") return virasoro_nonstandard();
  if (name == "shifted") return virasoro_shifted();
  throw std::invalid_argument("unknown conformal context '" + name + "'");
}

/// Virasoro relations of L_(1,M) for t = Σ φ_i ψ_i and all 2M fields.
inline VerificationReport general_virasoro(int M) {
  if (M < 1) throw std::invalid_argument("general_virasoro: need M >= 1");
  return virasoro_standard(M).verify();
}

}  // namespace kpcalc
