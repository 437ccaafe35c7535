#include <array>

#include <catch_amalgamated.hpp>

#include "kpcalc/miura.hpp"

using namespace kpcalc;

namespace {

ContextPtr ctx() { return standard_context(); }
DiffExpr fn(const std::string& s) { return parse_function(ctx(), s); }

void require_verified(const VerificationReport& rep) {
  INFO(rep.title);
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.residual);
    CHECK(c.status == Status::verified);
  }
  REQUIRE(rep.ok());
}

// Characteristic polynomial by Faddeev-LeVerrier, coefficients from x^n down.
std::vector<Rational> charpoly(const RationalMatrix& A) {
  const std::size_t n = A.size();
  std::vector<Rational> c(n + 1, 0);
  c[0] = 1;
  RationalMatrix M(n, std::vector<Rational>(n, 0));
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < n; ++i) M[i][i] += c[k - 1];
    M = multiply(A, M);
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += M[i][i];
    c[k] = -tr / Rational(static_cast<long>(k));
  }
  return c;
}

int sign_changes(const std::vector<Rational>& c) {
  int n = 0, last = 0;
  for (const auto& x : c) {
    const int s = sgn(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++n;
    last = s;
  }
  return n;
}

// Signature of a symmetric matrix: all roots are real, so Descartes' rule is exact.
std::array<int, 3> signature(const RationalMatrix& A) {
  auto c = charpoly(A);
  int zero = 0;
  while (!c.empty() && c.back() == 0) {
    c.pop_back();
    ++zero;
  }
  std::vector<Rational> neg = c;
  for (std::size_t i = 0; i < neg.size(); ++i)
    if ((neg.size() - 1 - i) % 2) neg[i] = -neg[i];
  return {sign_changes(c), sign_changes(neg), zero};
}

}  // namespace

TEST_CASE("three-by-one factorization", "[miura]") {
  const auto s = expand_factorization(3, 1, false);
  CHECK(s.target.name == lax_shifted(1, 2).name);
  CHECK(s.template_matches());
  CHECK(s.substitutions.at(ctx()->id("u1")) == fn("b1 - a1 - a2 - a3"));
  CHECK(s.substitutions.at(ctx()->id("psi")) == fn("E(-b1)"));
  // Oracle: (∂ - b)⁻¹ = E(b)∂⁻¹E(-b), so the dyad is f ∂⁻¹ E(-b1) with f the
  // order-zero coefficient of (∂-a1)(∂-a2)(∂-a3) E(b1).
  const PsiDO prod = parse_operator(ctx(), "(del - a1)*(del - a2)*(del - a3)");
  CHECK(s.substitutions.at(ctx()->id("phi")) == apply(prod, fn("E(b1)")));
  require_verified(compare_printed_miura(s));
  CHECK(s.to_text().rfind("u1 = ", 0) == 0);
}

TEST_CASE("factorization shapes and errors", "[miura]") {
  CHECK_THROWS_AS(expand_factorization(1, 0, false), FactorizationError);
  CHECK_THROWS_AS(expand_factorization(2, 1, true), FactorizationError);
  CHECK_THROWS_AS(expand_factorization(3, -1, false), FactorizationError);
  for (auto [n, m, p] : {std::tuple{2, 0, false}, std::tuple{3, 0, true}, std::tuple{4, 2, false},
                         std::tuple{3, 1, true}, std::tuple{4, 1, false}}) {
    INFO(n << "," << m << "," << p);
    const auto s = expand_factorization(n, m, p);
    CHECK(s.template_matches());
    CHECK(s.variables.size() == static_cast<std::size_t>(n + m));
  }
  CHECK_THROWS_AS(compare_printed_miura(expand_factorization(3, 1, true)), std::invalid_argument);
  CHECK_THROWS_AS(miura_transfer(tables::combined_modified(4, 1), expand_factorization(3, 1, false)),
                  std::invalid_argument);
}

TEST_CASE("constant brackets map to the shifted structures", "[miura]") {
  const auto s = expand_factorization(3, 1, false);
  require_verified(kw_transfer(tables::combined_modified(3, 1), s, tables::omega_table(), "dK"));
  require_verified(kw_transfer(tables::second_modified(3, 1), s, tables::gd2_table(), "GD2"));
  require_verified(kw_transfer(tables::third_modified(3, 1), s, tables::gd3_table(), "GD3"));
  // The transfer is linear in the constant matrix.
  const auto sum = add_tables(miura_transfer(tables::second_modified(3, 1), s),
                              miura_transfer(tables::third_modified(3, 1), s));
  require_verified(compare_tables(sum, miura_transfer(tables::combined_modified(3, 1), s), "sum", ""));
  require_verified(compare_tables(add_tables(tables::gd2_table(), tables::gd3_table()), tables::omega_table(), "sum", ""));
}

TEST_CASE("the zero matrix transfers to zero", "[miura]") {
  const auto s = expand_factorization(3, 1, false);
  const auto t = miura_transfer(tables::constant_matrix(3, 1, 0, 0, 0, 0, 0), s);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) CHECK(t.at(i, j).is_zero());
}

TEST_CASE("prefixed factorization maps to the nonstandard table", "[miura]") {
  const auto s = expand_factorization(3, 1, true);
  CHECK(s.target.name == lax_nonstandard(1, 2).name);
  require_verified(kw_transfer(tables::combined_modified(3, 1), s, tables::nonstandard_table(), "K"));
}

TEST_CASE("four-by-two factorization", "[miura][slow]") {
  const auto s = expand_factorization(4, 2, false);
  REQUIRE(s.target.name == lax_shifted(1, 3).name);
  require_verified(verify_bracket_table(s.target, HamiltonianMap::omega, tables::shifted_table_22(), "dK(1,3)"));
  require_verified(kw_transfer(tables::combined_modified(4, 2), s, tables::shifted_table_22(), "dK(1,3)"));
}

TEST_CASE("congruence diagonalization", "[miura]") {
  std::vector<RationalMatrix> cases;
  for (auto [n, m] : {std::pair{3, 1}, std::pair{4, 2}, std::pair{2, 0}, std::pair{5, 3}}) {
    cases.push_back(tables::combined_modified(n, m).M);
    cases.push_back(tables::second_modified(n, m).M);
    cases.push_back(tables::third_modified(n, m).M);
  }
  cases.push_back({{0, 1}, {1, 0}});
  cases.push_back({{0, 0, 1}, {0, 0, 2}, {1, 2, 0}});
  cases.push_back({{1, 0}, {0, 1}});
  cases.push_back({{0, 0}, {0, 0}});
  for (const auto& M : cases) {
    INFO(to_text(M));
    const auto c = diagonalize(M);
    const auto D = multiply(multiply(c.T, M), transpose(c.T));
    CHECK(D == c.D);
    for (std::size_t i = 0; i < D.size(); ++i)
      for (std::size_t j = 0; j < D.size(); ++j)
        if (i != j) CHECK(D[i][j] == 0);
    CHECK(charpoly(c.T).back() != 0);  // det T up to sign
    const auto sig = signature(M);
    CHECK(c.positive == sig[0]);
    CHECK(c.negative == sig[1]);
    CHECK(c.zero == sig[2]);
    CHECK(c.singular() == (sig[2] > 0));
  }
  CHECK(diagonalize({{1, 0}, {0, 1}}).T == RationalMatrix{{1, 0}, {0, 1}});
  CHECK(diagonalize({}).D.empty());
  CHECK_THROWS_AS(diagonalize({{1, 2}, {3, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(diagonalize({{1, 2}}), std::invalid_argument);
  CHECK(to_text({{1, 0}, {0, Rational(-1, 2)}}) == "[1 0]\n[0 -1/2]\n");
}
