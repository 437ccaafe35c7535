#include <catch_amalgamated.hpp>

#include <random>

#include "kpcalc/integration.hpp"
#include "kpcalc/parser.hpp"

using namespace kpcalc;

namespace {

ContextPtr make_ctx() {
  auto c = std::make_shared<Context>();
  c->add("u");
  c->add("v");
  c->add("q");
  c->add("r");
  c->add("b1");
  c->add("phi1", true);
  return c;
}

DiffExpr f(const ContextPtr& c, const char* s) { return parse_function(c, s); }

}  // namespace

TEST_CASE("derivative of products and special atoms", "[diffring]") {
  auto c = make_ctx();
  CHECK(differentiate(f(c, "u*u'")) == f(c, "u'^2 + u*u''"));
  CHECK(differentiate(f(c, "J(q^2)")) == f(c, "q^2"));
  CHECK(differentiate(f(c, "E(b1)")) == f(c, "b1*E(b1)"));
  CHECK(differentiate(f(c, "phi1^-1")) == f(c, "-phi1'*phi1^-2"));
  CHECK(f(c, "E(b1)*E(-b1)") == DiffExpr(1));
  CHECK(f(c, "E(0)") == DiffExpr(1));
}

TEST_CASE("integration of total derivatives", "[diffring]") {
  auto c = make_ctx();
  auto a = integrate_total_derivative(*c, f(c, "u*u'"));
  REQUIRE(a);
  CHECK(*a == f(c, "u^2/2"));
  auto b = integrate_total_derivative(*c, f(c, "u'*v + u*v'"));
  REQUIRE(b);
  CHECK(*b == f(c, "u*v"));
  CHECK_FALSE(integrate_total_derivative(*c, f(c, "u^2")));
  CHECK_FALSE(is_total_derivative(*c, f(c, "u^2")));
  CHECK(is_total_derivative(*c, f(c, "u'''*u^3")) == false);
}

TEST_CASE("antiderivative introduces J only when needed", "[diffring]") {
  auto c = make_ctx();
  CHECK(antiderivative(*c, f(c, "q'*r + q*r'")) == f(c, "q*r"));
  auto j = antiderivative(*c, f(c, "q^2"));
  CHECK(contains_integral(j));
  CHECK(differentiate(j) == f(c, "q^2"));
  CHECK(to_string(j, *c) == "J(q^2)");
}

TEST_CASE("euler operator", "[diffring]") {
  auto c = make_ctx();
  auto u = *c->find("u");
  CHECK(euler_derivative(f(c, "u^3"), u) == f(c, "3*u^2"));
  CHECK(euler_derivative(f(c, "u'^2/2"), u) == f(c, "-u''"));
  CHECK(euler_annihilates(f(c, "u*u'")));
}

TEST_CASE("printing round trips through the parser", "[diffring]") {
  auto c = make_ctx();
  for (const char* s : {"u*u'' - 3/2*v'^2", "J(q^2)*r + E(b1)", "phi1^-2*q'", "0", "-7/3"}) {
    auto e = f(c, s);
    CHECK(f(c, to_string(e, *c).c_str()) == e);
  }
}

TEST_CASE("random polynomials: derivative of exact antiderivative", "[diffring][property]") {
  auto c = make_ctx();
  std::mt19937 rng(20261018);
  std::uniform_int_distribution<int> coef(-3, 3), gen(0, 3), ord(0, 2), len(1, 3);
  for (int trial = 0; trial < 60; ++trial) {
    DiffExpr p;
    for (int t = 0, n = len(rng); t < n; ++t) {
      DiffExpr m(coef(rng));
      for (int k = 0, d = len(rng); k < d; ++k) m *= DiffExpr::jet(gen(rng), ord(rng));
      p += m;
    }
    auto dp = differentiate(p);
    auto back = integrate_total_derivative(*c, dp);
    REQUIRE(back);
    CHECK(differentiate(*back) == dp);
    CHECK(differentiate(antiderivative(*c, p)) == p);
    CHECK(differentiate(p * p) == DiffExpr(2) * p * dp);
  }
}

TEST_CASE("iterated integrals obey the shuffle relations", "[diffring]") {
  auto c = make_ctx();
  auto a = f(c, "J(u*J(r)) + J(r*J(u))");
  CHECK(a == f(c, "J(u)*J(r)"));
  CHECK(f(c, "J(u*J(u))") == f(c, "J(u)^2/2"));
  CHECK(differentiate(f(c, "J(r*J(u))")) == f(c, "r*J(u)"));
  // three letters: the six orderings sum to the triple product
  auto s = f(c, "J(u*J(v*J(r))) + J(u*J(r*J(v))) + J(v*J(u*J(r))) + J(v*J(r*J(u))) + J(r*J(u*J(v))) + J(r*J(v*J(u)))");
  CHECK(s == f(c, "J(u)*J(v)*J(r)"));
}

TEST_CASE("lyndon factorization", "[diffring]") {
  auto c = make_ctx();
  auto letter = [&](const char* s) { return f(c, s).terms().begin()->first; };
  Monomial a = letter("u"), b = letter("v");
  REQUIRE(compare(a, b) != 0);
  if (compare(a, b) > 0) std::swap(a, b);
  CHECK(is_lyndon(Word{a, b}));
  CHECK_FALSE(is_lyndon(Word{b, a}));
  CHECK_FALSE(is_lyndon(Word{a, a}));
  auto fac = lyndon_factorization(Word{b, a, b, a, a});
  REQUIRE(fac.size() == 4);
  CHECK(compare(fac[0], Word{b}) == 0);
  CHECK(compare(fac[1], Word{a, b}) == 0);
  CHECK(compare(fac[2], Word{a}) == 0);
  CHECK(compare(fac[3], Word{a}) == 0);
  CHECK(shuffle(WordSum{{Word{a}, 1}}, Word{a}).at(Word{a, a}) == 2);
}

TEST_CASE("random expressions with integrals: antiderivative is linear and exact", "[diffring][property]") {
  auto c = make_ctx();
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coef(-3, 3), gen(0, 3), ord(0, 1), len(1, 2), pick(0, 2);
  auto rnd = [&] {
    DiffExpr p;
    for (int t = 0, n = len(rng) + 1; t < n; ++t) {
      DiffExpr m(coef(rng));
      for (int k = 0, d = len(rng); k < d; ++k) m *= DiffExpr::jet(gen(rng), ord(rng));
      if (pick(rng) == 0) m *= antiderivative(*c, DiffExpr::jet(gen(rng), 0) * DiffExpr::jet(gen(rng), 0));
      if (pick(rng) == 0) m *= antiderivative(*c, DiffExpr::jet(gen(rng), 0));
      p += m;
    }
    return p;
  };
  for (int trial = 0; trial < 40; ++trial) {
    auto a = rnd(), b = rnd();
    auto ia = antiderivative(*c, a), ib = antiderivative(*c, b);
    CHECK(differentiate(ia) == a);
    CHECK(antiderivative(*c, a + b) == ia + ib);
    CHECK(antiderivative(*c, differentiate(a)) == a - DiffExpr(a.constant_term()));
  }
}
