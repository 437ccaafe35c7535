#include <catch_amalgamated.hpp>

#include "kpcalc/hierarchy.hpp"

using namespace kpcalc;

namespace {

ContextPtr ctx() { return standard_context(); }
DiffExpr fn(const std::string& s) { return parse_function(ctx(), s); }
GenId id(const std::string& s) { return ctx()->id(s); }

std::vector<LaxFamily> families() {
  return {lax_standard(1, 1), lax_standard(1, 2), lax_standard(2, 1), lax_standard(3, 0), lax_nonstandard(1, 2),
          lax_nonstandard(1, 3), lax_shifted(1, 2)};
}

}  // namespace

TEST_CASE("first flow is the x-translation", "[hierarchy]") {
  for (const auto& fam : families()) {
    INFO(fam.name);
    const auto f = flow(fam, 1);
    REQUIRE(f.fields == fam.fields);
    for (GenId g : fam.fields) CHECK(f.at(g) == differentiate(DiffExpr::jet(g)));
  }
}

TEST_CASE("zero flow", "[hierarchy]") {
  for (const auto& fam : families())
    for (GenId g : fam.fields) CHECK(flow(fam, 0).at(g).is_zero());
  CHECK_THROWS_AS(flow(lax_standard(1, 2), -1), std::invalid_argument);
  CHECK_THROWS_AS(standard_flow(lax_nonstandard(1, 2), 1), std::invalid_argument);
  CHECK_THROWS_AS(nonstandard_flow(lax_standard(1, 2), 1), std::invalid_argument);
}

TEST_CASE("second flow of the eigenfunction family", "[hierarchy]") {
  // Oracle: (L²)_+ = ∂² + 2Σφψ, since the dyad products sit at order ≤ -2 and
  // (∂φ∂⁻¹ψ)_+ = (φ∂⁻¹ψ∂)_+ = φψ.
  const auto f = standard_flow(lax_standard(1, 2), 2);
  const DiffExpr t = fn("phi1*psi1 + phi2*psi2");
  for (const char* p : {"phi1", "phi2"}) CHECK(f.at(id(p)) == differentiate(differentiate(fn(p))) + DiffExpr(2) * t * fn(p));
  for (const char* s : {"psi1", "psi2"})
    CHECK(f.at(id(s)) == -differentiate(differentiate(fn(s))) - DiffExpr(2) * t * fn(s));
}

TEST_CASE("second flow of the nonstandard family", "[hierarchy]") {
  // Oracle: (K²)_{≥1} = ∂² + 2v1∂; the order-zero coefficient of the commutator
  // collects v1'' + 2v1v1' from [∂², v1] + [2v1∂, v1], 2v2' from the ∂⁻¹v2 tail
  // and 2(qr)' from the q∂⁻¹r tail.
  const auto f = nonstandard_flow(lax_nonstandard(1, 2), 2);
  CHECK(f.at(id("q")) == fn("q'' + 2*v1*q'"));
  CHECK(f.at(id("r")) == fn("-r'' + 2*(v1*r)'"));
  CHECK(f.at(id("v2")) == fn("-v2'' + 2*(v1*v2)'"));
  CHECK(f.at(id("v1")) == fn("(v1' + v1^2 + 2*v2 + 2*q*r)'"));
}

TEST_CASE("dyad-free reduction gives the KdV-type flow", "[hierarchy]") {
  // L = ∂² + u2: (L^{3/2})_+ = ∂³ + (3/2)u2∂ + (3/4)u2', ∂_3 u2 = (1/4)u2''' + (3/2)u2 u2'.
  const auto f = standard_flow(lax_standard(2, 0), 3);
  CHECK(f.at(id("u2")) == fn("1/4*u2''' + 3/2*u2*u2'"));
}

TEST_CASE("flows commute with each other and with the x-derivative", "[hierarchy][property]") {
  for (const auto& fam : {lax_nonstandard(1, 2), lax_standard(1, 2), lax_shifted(1, 2)}) {
    INFO(fam.name);
    const auto f2 = flow(fam, 2), f3 = flow(fam, 3);
    for (GenId g : fam.fields) {
      CHECK(directional(fam.ctx, f2.at(g), f3.rates) == directional(fam.ctx, f3.at(g), f2.rates));
      CHECK(directional(fam.ctx, differentiate(DiffExpr::jet(g)), f2.rates) == differentiate(f2.at(g)));
    }
  }
}

TEST_CASE("shifted family inherits the nonstandard flows", "[hierarchy]") {
  const auto s = multiply_by_del(1, 2);
  const auto kf = nonstandard_flow(s.K, 2);
  const auto lf = standard_flow(s.L, 2);
  Substitution to_k(*ctx(), forward_rules(s.change));
  for (std::size_t i = 0; i < s.L.fields.size(); ++i) {
    INFO(s.L.field_name(s.L.fields[i]));
    CHECK(to_k(lf.at(s.L.fields[i])) == directional(ctx(), s.change.definitions[i], kf.rates));
  }
}

TEST_CASE("gauge transformation", "[hierarchy]") {
  const auto g = gauge_transform(2);
  CHECK(g.K.field_names() == std::vector<std::string>{"v1", "v2", "q", "r"});
  CHECK(g.change.forward.definitions[0] == fn("phi1'/phi1"));
  CHECK(g.change.forward.definitions[1] == fn("phi1*psi1"));
  CHECK(g.change.forward.definitions[2] == fn("phi2/phi1"));
  CHECK(g.change.forward.definitions[3] == fn("phi1*psi2"));
  CHECK(g.template_matches());
  CHECK(g.round_trip());
  // One constraint: K = ∂ + v1 + ∂⁻¹v2.
  const auto g1 = gauge_transform(1);
  CHECK(g1.template_matches());
  CHECK(g1.K.op() == parse_operator(ctx(), "del + v1 + dinv(1, v2)"));
  CHECK(gauge_transform(3).template_matches());
}

TEST_CASE("multiplication by del", "[hierarchy]") {
  const auto s = multiply_by_del(1, 2);
  CHECK(s.L.field_names() == std::vector<std::string>{"u1", "u2", "phi", "psi"});
  CHECK(s.change.definitions ==
        std::vector<DiffExpr>{fn("v1"), fn("v2 + v1' + q*r"), fn("q'"), fn("r")});
  CHECK(s.template_matches());
  for (auto [N, M] : {std::pair{1, 3}, std::pair{2, 2}, std::pair{1, 1}}) {
    INFO(N << "," << M);
    CHECK(multiply_by_del(N, M).template_matches());
  }
  // K = ∂ alone maps to ∂².
  CHECK(PsiDO::del(ctx()) * PsiDO::del(ctx()) == PsiDO::del(ctx(), 2));
  CHECK(multiply_by_del(1, 1).change.definitions == std::vector<DiffExpr>{fn("v1"), fn("v1' + v2")});
}

TEST_CASE("gauge covariance of the flows", "[hierarchy]") {
  for (int k : {0, 1, 2, 3}) {
    const auto rep = check_gauge_covariance(k);
    INFO(rep.title);
    for (const auto& c : rep.checks) {
      INFO(c.name << " " << c.residual);
      CHECK((c.status == Status::verified || c.status == Status::skipped));
    }
    CHECK(rep.ok());
    if (k > 0) CHECK(rep.checks.back().detail.rfind("differs", 0) == 0);
  }
  CHECK(check_gauge_covariance(2, 3).ok());
}

TEST_CASE("flow text output", "[hierarchy]") {
  const std::string text = flow(lax_nonstandard(1, 2), 1).to_text(*ctx());
  CHECK(text == "v1: v1'\nv2: v2'\nq: q'\nr: r'\n");
}
