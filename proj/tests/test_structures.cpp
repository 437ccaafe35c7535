#include <catch_amalgamated.hpp>

#include "kpcalc/structures.hpp"

using namespace kpcalc;

namespace {

ContextPtr ctx() { return standard_context(); }
PsiDO op(const std::string& s) { return parse_operator(ctx(), s); }
DiffExpr fn(const std::string& s) { return parse_function(ctx(), s); }

void require_verified(const VerificationReport& rep) {
  INFO(rep.title);
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.residual);
    CHECK(c.status == Status::verified);
  }
  REQUIRE(rep.ok());
}

}  // namespace

TEST_CASE("eigenfunction tables verify against GD2 with the Dirac term", "[structures]") {
  for (int M : {1, 2, 3}) {
    const auto fam = lax_standard(1, M);
    const auto rep = verify_bracket_table(fam, HamiltonianMap::gd2_dirac, tables::standard_table(M), "L(1,M)");
    require_verified(rep);
    CHECK(rep.checks.size() == 1 + (2 * M) * (2 * M + 1) / 2);
  }
  const auto t = tables::standard_table(2);
  CHECK(t.at("phi1", "psi1") == op("del + dinv(phi1, psi1) + dinv(phi2, psi2) + dinv(phi1, psi1)"));
  CHECK(t.at("phi1", "psi2") == op("dinv(phi1, psi2)"));
}

TEST_CASE("a perturbed entry is reported with a residual", "[structures]") {
  auto t = tables::nonstandard_table();
  t.set("q", "q", "-2*dinv(q, q) + dinv(1, q^2)");
  const auto rep = verify_bracket_table(lax_nonstandard(1, 2), HamiltonianMap::ns, t, "perturbed");
  CHECK_FALSE(rep.ok());
  CHECK(rep.count(Status::mismatch) == 10);
  CHECK_FALSE(rep.checks[1].residual.empty());
}

TEST_CASE("the nonstandard table holds on two routes", "[structures]") {
  const auto direct = verify_bracket_table(lax_nonstandard(1, 2), HamiltonianMap::ns, tables::nonstandard_table(), "K");
  require_verified(direct);
  CHECK(direct.checks.size() == 11);
  const auto transferred = transfer_bracket(tables::standard_table(2), gauge_change(2));
  require_verified(compare_tables(transferred, tables::nonstandard_table(), "gauge route", "K"));
}

TEST_CASE("the shifted table under GD2+GD3", "[structures]") {
  const auto fam = lax_shifted(1, 2);
  REQUIRE(fam.field_names() == std::vector<std::string>{"u1", "u2", "phi", "psi"});
  // Printed entries sit inside the derived golden.
  require_verified(compare_entries(tables::omega_table(), tables::omega_printed(), "printed", "dK"));
  require_verified(verify_bracket_table(fam, HamiltonianMap::omega, tables::omega_table(), "dK"));
  // Oracle: chain rule through the shift change, rewritten with q = J(φ).
  const auto transferred = transfer_bracket(tables::nonstandard_table(), shift_change());
  require_verified(compare_tables(transferred, tables::omega_table(), "shift route", "dK"));
}

TEST_CASE("GD3 and GD2 parts of the shifted table", "[structures]") {
  const auto fam = lax_shifted(1, 2);
  // Oracle: [L, w] = 2w'∂ + (w'' + u1 w') - (φw)∂⁻¹ψ ... read as δ(u1,u2,φ,ψ) = V(w).
  const std::vector<PsiDO> V = {op("2*del"), op("del^2 + u1*del"), op("-phi"), op("psi")};
  {
    const DiffExpr w = fn("x0");
    std::map<GenId, DiffExpr> delta;
    for (std::size_t i = 0; i < fam.fields.size(); ++i) delta[fam.fields[i]] = apply(V[i], w);
    CHECK(commutator(fam.op(), PsiDO::function(ctx(), w)) == fam.tangent(delta));
  }
  const auto gd3 = tables::gd3_table();
  const PsiDO dinv = PsiDO::dyad(ctx(), DiffExpr(1), DiffExpr(1));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      INFO(i << "," << j);
      CHECK(gd3.at(i, j) == -(V[i] * dinv * adjoint(V[j])));
      CHECK(tables::gd2_table().at(i, j) == tables::omega_table().at(i, j) - gd3.at(i, j));
    }
  require_verified(verify_bracket_table(fam, HamiltonianMap::gd3, gd3, "GD3"));
  require_verified(verify_bracket_table(fam, HamiltonianMap::gd2, tables::gd2_table(), "GD2"));
  require_verified(compare_entries(tables::gd2_table(), tables::gd2_printed(), "comparison", "GD2"));
  // The Dirac term freezes u1, so the comparison entries cannot come from it.
  CHECK_FALSE(verify_bracket_table(fam, HamiltonianMap::gd2_dirac, tables::gd2_table(), "GD2+Dirac").ok());
  const Covector cv = generic_covector(fam);
  const PsiDO t = gd2_dirac_map(fam.op(), cv.X, fam.N);
  CHECK(t.coeff(1).is_zero());
}

TEST_CASE("three-constraint nonstandard table", "[structures]") {
  const auto fam = lax_nonstandard(1, 3);
  // Oracle: gauge transfer of the L(1,3) table.
  const auto transferred = transfer_bracket(tables::standard_table(3), gauge_change(3));
  require_verified(compare_tables(transferred, tables::nonstandard_table_13(), "gauge route", "K(1,3)"));
  require_verified(verify_bracket_table(fam, HamiltonianMap::ns, tables::nonstandard_table_13(), "K(1,3)"));
}

TEST_CASE("bracket table text round trip", "[structures][serialization]") {
  for (const auto& t : {tables::standard_table(2), tables::nonstandard_table(), tables::omega_table(),
                        tables::nonstandard_table_13(), tables::to_bracket(tables::combined_modified(3, 1))}) {
    const std::string text = t.to_text();
    const auto back = BracketMatrix::parse(t.context(), text);
    CHECK(back.to_text() == text);
    CHECK(back.fields() == t.fields());
    require_verified(compare_tables(back, t, "round trip", ""));
  }
  const auto t = BracketMatrix::parse(ctx(), "# constant\n\n{a1,b1} = del\n  {b1,b1} = 2*del\n");
  CHECK(t.size() == 2);
  CHECK(t.at("b1", "a1") == op("del"));
  CHECK(t.at("a1", "a1").is_zero());
}

TEST_CASE("bracket table parse errors carry line numbers", "[structures][serialization]") {
  auto line_of = [](const std::string& text) {
    try {
      BracketMatrix::parse(ctx(), text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("{u1,u1} = 2*del\n{u1 u2} = del\n") == 2);
  CHECK(line_of("{u1,u1} = 2*del\n\n{u1,zz} = del\n") == 3);
  CHECK(line_of("u1,u1 = del\n") == 1);
  CHECK(line_of("{u1,u1} = 2*del +\n") == 1);
}

TEST_CASE("missing entries follow from skew-adjointness", "[structures]") {
  const auto t = tables::nonstandard_table();
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) CHECK(t.at(j, i) == -adjoint(t.at(i, j)));
  CHECK(t.completed().skew_violations().empty());
  auto bad = t.completed();
  bad.set("r", "q", "del");
  CHECK(bad.skew_violations().size() == 1);
}

TEST_CASE("transfer along identity and inverse changes", "[structures]") {
  const auto t = tables::nonstandard_table();
  CoordinateChange id{t.fields(), {}};
  for (GenId g : t.fields()) id.definitions.push_back(DiffExpr::jet(g));
  require_verified(compare_tables(transfer_bracket(t, id), t, "identity", ""));

  // dK back to K: v1 = u1, v2 = u2 - u1' - J(φ)ψ, q = J(φ), r = ψ.
  CoordinateChange back{t.fields(), {fn("u1"), fn("u2 - u1' - J(phi)*psi"), fn("J(phi)"), fn("psi")}};
  const auto there = tables::omega_table();
  const auto round = substitute(transfer_bracket(there, back),
                                {{ctx()->id("u1"), fn("v1")},
                                 {ctx()->id("u2"), fn("v2 + v1' + q*r")},
                                 {ctx()->id("phi"), fn("q'")},
                                 {ctx()->id("psi"), fn("r")}});
  require_verified(compare_tables(round, t, "inverse", ""));
}

TEST_CASE("bilinear forms are antisymmetric", "[structures][property]") {
  const std::vector<std::pair<LaxFamily, HamiltonianMap>> cases = {
      {lax_standard(1, 2), HamiltonianMap::gd2_dirac}, {lax_nonstandard(1, 2), HamiltonianMap::ns},
      {lax_shifted(1, 2), HamiltonianMap::omega},      {lax_shifted(1, 2), HamiltonianMap::gd2},
      {lax_shifted(1, 2), HamiltonianMap::gd3},        {lax_nonstandard(1, 3), HamiltonianMap::ns},
  };
  for (const auto& [fam, map] : cases) {
    const auto r = check_antisymmetry(fam, map);
    INFO(r.name << " " << r.residual);
    CHECK(r.status == Status::verified);
  }
}

TEST_CASE("covector pairing for every family", "[structures]") {
  for (const auto& fam : {lax_standard(1, 1), lax_standard(1, 3), lax_standard(2, 1), lax_nonstandard(1, 2),
                          lax_nonstandard(1, 3), lax_shifted(1, 2)}) {
    INFO(fam.name);
    CHECK(pairing_holds(fam, generic_covector(fam)));
  }
}

TEST_CASE("K and dK covectors and bilinear forms", "[structures]") {
  const auto rep = verify_appendix_identity();
  require_verified(rep);
  std::vector<std::string> names;
  for (const auto& c : rep.checks) names.push_back(c.name);
  CHECK(std::find(names.begin(), names.end(), "(A)_0 = 0") != names.end());
  CHECK(std::find(names.begin(), names.end(), "bilinear forms agree") != names.end());

  // Zero slots give the zero covector and the zero form.
  const auto fam = lax_nonstandard(1, 2);
  CHECK(residue(PsiDO::constant(ctx(), 0) * ns_map(fam.op(), PsiDO::constant(ctx(), 0))).is_zero());
}
