#include <catch_amalgamated.hpp>

#include <random>

#include "kpcalc/parser.hpp"

using namespace kpcalc;

namespace {

ContextPtr make_ctx() {
  auto c = std::make_shared<Context>();
  for (const char* n : {"u", "v", "q", "r", "b1", "b2"}) c->add(n);
  c->add("phi1", true);
  return c;
}

PsiDO op(const ContextPtr& c, const char* s) { return parse_operator(c, s); }
DiffExpr fn(const ContextPtr& c, const char* s) { return parse_function(c, s); }

// Oracle: multiply the Laurent expansions term by term with the general Leibniz rule.
OperatorView expanded_product(const PsiDO& a, const PsiDO& b, int depth) {
  const int extra = std::max(0, b.order()) + std::max(0, a.order()) + 2;
  auto p = mul(expand_tail(a, depth + extra), expand_tail(b, depth + extra), depth);
  return p;
}

PsiDO random_operator(const ContextPtr& c, std::mt19937& rng, int max_order, int max_dyads) {
  std::uniform_int_distribution<int> coef(-2, 2), gen(0, 3), ord(0, 1), deg(0, max_order), nd(0, max_dyads);
  auto rnd_fn = [&] {
    DiffExpr f(coef(rng));
    f += DiffExpr(coef(rng)) * DiffExpr::jet(gen(rng), ord(rng));
    f += DiffExpr(coef(rng)) * DiffExpr::jet(gen(rng), ord(rng)) * DiffExpr::jet(gen(rng), 0);
    return f;
  };
  PsiDO a = PsiDO::constant(c, 0);
  for (int k = deg(rng); k >= 0; --k) a += PsiDO::function(c, rnd_fn()) * PsiDO::del(c, k);
  for (int i = nd(rng); i > 0; --i) a += PsiDO::dyad(c, rnd_fn(), rnd_fn());
  return a;
}

}  // namespace

TEST_CASE("composition with functions and del", "[psido]") {
  auto c = make_ctx();
  CHECK(op(c, "del*q") == op(c, "q*del + q'"));
  CHECK(op(c, "del*dinv(q, r)") == op(c, "q*r + dinv(q', r)"));
  CHECK(op(c, "dinv(q, r)*del") == op(c, "q*r - dinv(q, r')"));
  CHECK(op(c, "dinv(1, 1)*del") == op(c, "1"));
  CHECK(op(c, "del*dinv(1,1)") == op(c, "1"));
  CHECK(op(c, "del^2*q") == op(c, "q*del^2 + 2*q'*del + q''"));
}

TEST_CASE("product of two dyads", "[psido]") {
  auto c = make_ctx();
  auto lhs = op(c, "dinv(q, r)*dinv(u, v)");
  auto rhs = op(c, "dinv(q*J(r*u), v) - dinv(q, J(r*u)*v)");
  CHECK(lhs == rhs);
  CHECK(expand_tail(lhs, 6) == expanded_product(op(c, "dinv(q, r)"), op(c, "dinv(u, v)"), 6));
}

TEST_CASE("normal form merges legs", "[psido]") {
  auto c = make_ctx();
  auto a = op(c, "dinv(q, r) + dinv(u, r)");
  CHECK(a.dyads().size() == 1);
  auto b = op(c, "dinv(q, r) + dinv(q, u)");
  CHECK(b.dyads().size() == 1);
  CHECK(op(c, "dinv(q, r) - dinv(q, r)").is_zero());
}

TEST_CASE("adjoint, projections, residue", "[psido]") {
  auto c = make_ctx();
  CHECK(adjoint(op(c, "q*del")) == op(c, "-q*del - q'"));
  CHECK(adjoint(op(c, "dinv(q, r)")) == op(c, "-dinv(r, q)"));
  auto a = op(c, "del^2 + u*del + v + dinv(q, r)");
  CHECK(project(a, Part::plus) == op(c, "del^2 + u*del + v"));
  CHECK(project(a, Part::geq1) == op(c, "del^2 + u*del"));
  CHECK(project(a, Part::minus) == op(c, "dinv(q, r)"));
  CHECK(order0(a) == fn(c, "v"));
  CHECK(residue(a) == fn(c, "q*r"));
}

TEST_CASE("tail expansion", "[psido]") {
  auto c = make_ctx();
  auto v = expand_tail(op(c, "dinv(q, r)"), 3);
  CHECK(v.coeff(-1) == fn(c, "q*r"));
  CHECK(v.coeff(-2) == fn(c, "-q*r'"));
  CHECK(v.coeff(-3) == fn(c, "q*r''"));
  CHECK(v.coeff(-4).is_zero());
}

TEST_CASE("gauge conjugation and inverse factors", "[psido]") {
  auto c = make_ctx();
  auto d = op(c, "del");
  CHECK(conjugate_by(d, fn(c, "phi1")) == op(c, "del + phi1'/phi1"));
  CHECK_THROWS_AS(conjugate_by(d, fn(c, "u")), std::domain_error);
  auto inv = invert_monic_linear(c, fn(c, "b1"));
  CHECK(inv * op(c, "del - b1") == op(c, "1"));
  CHECK(op(c, "del - b1") * inv == op(c, "1"));
  CHECK(op(c, "inv(del - b1)") == inv);
}

TEST_CASE("powers, roots and action on functions", "[psido]") {
  auto c = make_ctx();
  auto k = op(c, "del + dinv(q, r)");
  CHECK(power(k, 2) == k * k);
  CHECK(power(k, 2) == op(c, "del^2 + 2*q*r + dinv(q', r) - dinv(q, r') + dinv(q*J(q*r), r) - dinv(q, J(q*r)*r)"));
  auto root = nth_root(op(c, "del^2 + u"), 2, 4);
  CHECK(root.coeff(1) == DiffExpr(1));
  CHECK(root.coeff(0).is_zero());
  CHECK(root.coeff(-1) == fn(c, "u/2"));
  CHECK(root.coeff(-2) == fn(c, "-u'/4"));
  auto sq = mul(root, root, 3);
  CHECK(sq.coeff(2) == DiffExpr(1));
  CHECK(sq.coeff(1).is_zero());
  CHECK(sq.coeff(0) == fn(c, "u"));
  for (int j = -3; j < 0; ++j) CHECK(sq.coeff(j).is_zero());
  CHECK(apply(op(c, "del^2 + u"), fn(c, "q")) == fn(c, "q'' + u*q"));
  CHECK(apply(op(c, "dinv(q, r)"), fn(c, "r'")) == fn(c, "q*J(r*r')") - fn(c, "0"));
}

TEST_CASE("printing round trips", "[psido]") {
  auto c = make_ctx();
  for (const char* s : {"del^3 + (u + v)*del - dinv(q, r)", "dinv(E(b1), E(-b1))", "0", "-del"}) {
    auto a = op(c, s);
    auto back = op(c, to_string(a).c_str());
    CHECK(back == a);
    CHECK(to_string(back) == to_string(a));
  }
}

TEST_CASE("random operators: algebra laws", "[psido][property]") {
  auto c = make_ctx();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_operator(c, rng, 2, 2);
    auto b = random_operator(c, rng, 2, 2);
    auto x = random_operator(c, rng, 1, 1);
    INFO(to_string(a) << " | " << to_string(b));
    CHECK(expand_tail(a * b, 5) == expanded_product(a, b, 5));
    CHECK((a * b) * x == a * (b * x));
    CHECK(adjoint(a * b) == adjoint(b) * adjoint(a));
    CHECK(adjoint(adjoint(a)) == a);
    CHECK(project(a, Part::plus) + project(a, Part::minus) == a);
    CHECK(is_total_derivative(*c, residue(commutator(a, b))));
  }
}
