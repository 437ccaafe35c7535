#pragma once

// Factorization of Lax operators into linear and inverse-linear factors, the
// induced Miura substitutions, the chain-rule transfer of constant brackets,
// and congruence diagonalization of those brackets.

#include <string>
#include <vector>

#include "hierarchy.hpp"

namespace kpcalc {

/// ∂⁻¹? (∂ - a_1)...(∂ - a_n) (∂ - b_1)⁻¹...(∂ - b_m)⁻¹ and the target fields it induces.
struct MiuraSpec {
  int n = 0, m = 0;
  bool prefix = false;
  LaxFamily target;
  std::vector<GenId> variables;                   // a_1..a_n, b_1..b_m
  std::map<GenId, DiffExpr> substitutions;        // target field ↦ expression in the variables
  PsiDO product;

  CoordinateChange change() const {
    CoordinateChange c{target.fields, {}};
    for (GenId g : target.fields) c.definitions.push_back(substitutions.at(g));
    return c;
  }
  bool template_matches() const { return substitute(target.op(), substitutions) == product; }

  std::string to_text() const {
    std::string s;
    for (GenId g : target.fields) s += target.field_name(g) + " = " + to_string(substitutions.at(g), *target.ctx) + "\n";
    return s;
  }
};

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Without prefix the product is ∂K_(N,M) with N = n-m-1, M = m+1; with the
/// ∂⁻¹ prefix it is K_(N,M) with N = n-m-1, M = m+1. Dyads are matched to the
/// template in normal-form order; under the prefix the dyad with constant left leg carries v_{N+1}.
inline MiuraSpec expand_factorization(int n, int m, bool prefix, const ContextPtr& ctx = standard_context()) {
  const int N = n - m - 1;
  if (m < 0 || N < 1) throw FactorizationError("factorization: need m >= 0 and n - m >= 2");
  MiuraSpec s;
  s.n = n;
  s.m = m;
  s.prefix = prefix;
  s.target = prefix ? lax_nonstandard(N, m + 1, ctx) : lax_shifted(N, m + 1, ctx);

  PsiDO p = prefix ? PsiDO::dyad(ctx, DiffExpr(1), DiffExpr(1)) : PsiDO::constant(ctx, 1);
  for (int i = 1; i <= n; ++i) {
    auto g = ctx->find("a" + std::to_string(i));
    if (!g) throw FactorizationError("factorization: context lacks a" + std::to_string(i));
    s.variables.push_back(*g);
    p = p * (PsiDO::del(ctx) - PsiDO::function(ctx, DiffExpr::jet(*g)));
  }
  for (int j = 1; j <= m; ++j) {
    auto g = ctx->find("b" + std::to_string(j));
    if (!g) throw FactorizationError("factorization: context lacks b" + std::to_string(j));
    s.variables.push_back(*g);
    p = p * invert_monic_linear(ctx, DiffExpr::jet(*g));
  }
  s.product = p;

  for (const auto& [k, c] : s.target.shape.diff) {
    if (auto g = detail::single_field(c)) s.substitutions[*g] = p.coeff(k);
    else if (p.coeff(k) != c) throw FactorizationError("factorization: leading coefficient mismatch");
  }
  if (p.order() > s.target.N) throw FactorizationError("factorization: order mismatch");
  std::vector<Dyad> legs;
  for (const auto& d : p.dyads()) {
    if (prefix && d.left.is_constant()) {
      s.substitutions[ctx->id("v" + std::to_string(N + 1))] = d.left * d.right;
    } else {
      legs.push_back(d);
    }
  }
  std::size_t next = 0;
  for (const auto& d : s.target.shape.dyads) {
    if (d.left == DiffExpr(1)) continue;
    if (next >= legs.size()) throw FactorizationError("factorization: too few dyads in the product");
    s.substitutions[*detail::single_field(d.left)] = legs[next].left;
    s.substitutions[*detail::single_field(d.right)] = legs[next].right;
    ++next;
  }
  if (next != legs.size()) throw FactorizationError("factorization: too many dyads in the product");
  for (GenId g : s.target.fields)
    if (!s.substitutions.count(g)) throw FactorizationError("factorization: no value for " + s.target.field_name(g));
  if (!s.template_matches()) throw FactorizationError("factorization: product does not match the template");
  return s;
}

/// J P_mod J* with J the Fréchet matrix of the substitutions, entries in the factor variables.
inline BracketMatrix miura_transfer(const tables::ConstantPoissonMatrix& modified, const MiuraSpec& spec) {
  const auto& ctx = spec.target.ctx;
  std::vector<GenId> ids;
  for (const auto& f : modified.fields) ids.push_back(ctx->id(f));
  if (ids != spec.variables) throw std::invalid_argument("miura_transfer: matrix not indexed by the factor variables");
  return transfer_bracket(tables::to_bracket(modified, ctx), spec.change());
}

/// Compares the transferred constant bracket with a target table in the factor variables.
inline VerificationReport kw_transfer(const tables::ConstantPoissonMatrix& modified, const MiuraSpec& spec,
                                      const BracketMatrix& target_table, const std::string& anchor = "") {
  Stopwatch sw;
  const BracketMatrix actual = miura_transfer(modified, spec);
  VerificationReport rep = compare_tables(actual, substitute(target_table, spec.substitutions),
                                          spec.target.name + " from constant bracket", anchor);
  rep.seconds = sw.seconds();
  return rep;
}

/// Entrywise sum of two tables over the same fields.
inline BracketMatrix add_tables(const BracketMatrix& a, const BracketMatrix& b) {
  BracketMatrix out(a.context(), a.fields());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) out.set(i, j, a.at(i, j) + b.at(b.index(a.fields()[i]), b.index(a.fields()[j])));
  return out;
}

/// The printed substitutions of the (3,1) factorization compared with the product.
/// Deviations are itemized as mismatches with the difference as residual.
inline VerificationReport compare_printed_miura(const MiuraSpec& spec) {
  if (spec.n != 3 || spec.m != 1 || spec.prefix) throw std::invalid_argument("compare_printed_miura: needs (3,1)");
  Stopwatch sw;
  VerificationReport rep;
  rep.title = "printed Miura substitutions";
  const auto& ctx = spec.target.ctx;
  auto f = [&](const std::string& s) { return parse_function(ctx, s); };
  const DiffExpr u1 = f("b1 - (a1 + a2 + a3)");
  const DiffExpr u2 = u1 * f("b1") + f("2*b1' + a1*a2 + a2*a3 + a1*a3 - a2' - 2*a3'");
  const DiffExpr phi =
      f("E(b1)") * (u2 * f("b1") + u1 * f("b1'") + f("b1'' - a1*a2*a3 + a1*a3' + a2'*a3 + a2*a3' - a3''"));
  const DiffExpr psi = f("E(-b1)");
  const std::vector<std::pair<std::string, DiffExpr>> printed = {{"u1", u1}, {"u2", u2}, {"phi", phi}, {"psi", psi}};
  for (const auto& [name, e] : printed)
    rep.add(check_equal(name, "printed substitution", e, spec.substitutions.at(ctx->id(name)), *ctx));
  rep.seconds = sw.seconds();
  return rep;
}

using RationalMatrix = std::vector<std::vector<Rational>>;

struct Congruence {
  RationalMatrix T, D;  // T M Tᵀ = D
  int positive = 0, negative = 0, zero = 0;
  bool singular() const { return zero > 0; }
};

inline RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  RationalMatrix r(n, std::vector<Rational>(p, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l] != 0)
        for (std::size_t j = 0; j < p; ++j) r[i][j] += a[i][l] * b[l][j];
  return r;
}

inline RationalMatrix transpose(const RationalMatrix& a) {
  RationalMatrix r(a.empty() ? 0 : a[0].size(), std::vector<Rational>(a.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
  return r;
}

/// Symmetric elimination over Q. A zero pivot is replaced by a later nonzero
/// diagonal entry (swap) or, failing that, by adding a row with a nonzero
/// off-diagonal entry, which makes the pivot 2M_kj.
inline Congruence diagonalize(const RationalMatrix& M) {
  const std::size_t n = M.size();
  for (const auto& row : M)
    if (row.size() != n) throw std::invalid_argument("diagonalize: matrix not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (M[i][j] != M[j][i]) throw std::invalid_argument("diagonalize: matrix not symmetric");

  RationalMatrix A = M, T(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) T[i][i] = 1;
  auto add_row = [&](std::size_t dst, std::size_t src, const Rational& c) {  // row/col dst += c * src
    for (std::size_t j = 0; j < n; ++j) A[dst][j] += c * A[src][j];
    for (std::size_t j = 0; j < n; ++j) A[j][dst] += c * A[j][src];
    for (std::size_t j = 0; j < n; ++j) T[dst][j] += c * T[src][j];
  };
  for (std::size_t k = 0; k < n; ++k) {
    if (A[k][k] == 0) {
      std::size_t j = k + 1;
      while (j < n && A[j][j] == 0) ++j;
      if (j < n) {
        std::swap(A[k], A[j]);
        for (auto& row : A) std::swap(row[k], row[j]);
        std::swap(T[k], T[j]);
      } else {
        j = k + 1;
        while (j < n && A[k][j] == 0) ++j;
        if (j == n) continue;
        add_row(k, j, 1);
      }
    }
    for (std::size_t i = k + 1; i < n; ++i)
      if (A[i][k] != 0) add_row(i, k, -A[i][k] / A[k][k]);
  }
  Congruence c{T, A};
  for (std::size_t i = 0; i < n; ++i) {
    if (A[i][i] > 0) ++c.positive;
    else if (A[i][i] < 0) ++c.negative;
    else ++c.zero;
  }
  return c;
}

inline std::string to_text(const RationalMatrix& a) {
  std::string s;
  for (const auto& row : a) {
    s += "[";
    for (std::size_t j = 0; j < row.size(); ++j) s += (j ? " " : "") + to_string(row[j]);
    s += "]\n";
  }
  return s;
}

}  // namespace kpcalc
