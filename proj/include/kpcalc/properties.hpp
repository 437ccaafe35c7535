#pragma once

// Randomized algebra laws: associativity, adjoint, residue of a commutator,
// and the Euler operator on total derivatives. Each case is an exact check.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "integration.hpp"
#include "verify.hpp"

namespace kpcalc {

struct PropertyConfig {
  int cases = 200;
  std::uint32_t seed = 20261018;
  int depth = 6;
};

namespace detail {

class RandomAlgebra {
 public:
  RandomAlgebra(ContextPtr ctx, std::uint32_t seed) : ctx_(std::move(ctx)), rng_(seed) {
    for (const char* n : {"u1", "u2", "q", "r"}) gens_.push_back(ctx_->id(n));
  }

  DiffExpr function() {
    std::uniform_int_distribution<int> coef(-2, 2), gen(0, static_cast<int>(gens_.size()) - 1), ord(0, 1);
    DiffExpr f(coef(rng_));
    f += DiffExpr(coef(rng_)) * DiffExpr::jet(gens_[gen(rng_)], ord(rng_));
    f += DiffExpr(coef(rng_)) * DiffExpr::jet(gens_[gen(rng_)], ord(rng_)) * DiffExpr::jet(gens_[gen(rng_)], 0);
    return f;
  }

  PsiDO op(int max_order, int max_dyads) {
    std::uniform_int_distribution<int> deg(0, max_order), nd(0, max_dyads);
    PsiDO a = PsiDO::constant(ctx_, 0);
    for (int k = deg(rng_); k >= 0; --k) a += PsiDO::function(ctx_, function()) * PsiDO::del(ctx_, k);
    for (int i = nd(rng_); i > 0; --i) a += PsiDO::dyad(ctx_, function(), function());
    return a;
  }

  DiffExpr density() {
    std::uniform_int_distribution<int> coef(-3, 3), gen(0, static_cast<int>(gens_.size()) - 1), ord(0, 2), len(1, 3);
    DiffExpr p;
    for (int t = 0, n = len(rng_); t < n; ++t) {
      DiffExpr m(coef(rng_));
      for (int k = 0, d = len(rng_); k < d; ++k) m *= DiffExpr::jet(gens_[gen(rng_)], ord(rng_));
      p += m;
    }
    return p;
  }

 private:
  ContextPtr ctx_;
  std::mt19937 rng_;
  std::vector<GenId> gens_;
};

struct LawTally {
  std::string name, anchor;
  int passed = 0, failed = 0, inconclusive = 0;
  std::string first_failure;

  void record(Status s, const std::string& what) {
    if (s == Status::verified) {
      ++passed;
      return;
    }
    (s == Status::inconclusive ? inconclusive : failed)++;
    if (first_failure.empty()) first_failure = what;
  }
  CheckResult result() const {
    CheckResult c{name, anchor, Status::verified, first_failure,
                  std::to_string(passed) + " passed, " + std::to_string(failed) + " failed, " +
                      std::to_string(inconclusive) + " inconclusive"};
    if (failed) c.status = Status::mismatch;
    else if (inconclusive) c.status = Status::inconclusive;
    return c;
  }
};

}  // namespace detail

/// Runs every law on cfg.cases random inputs; operator equalities expand tails to cfg.depth.
inline VerificationReport run_property_suite(const PropertyConfig& cfg = {}, const ContextPtr& ctx = standard_context()) {
  Stopwatch sw;
  detail::RandomAlgebra gen(ctx, cfg.seed);
  const EqualityPolicy policy{cfg.depth};
  detail::LawTally assoc{"associativity", "(ab)c = a(bc)"}, adj{"adjoint", "(ab)* = b*a*, a** = a"},
      res{"residue of commutator", "res[a,b] is a total derivative"},
      euler{"Euler operator", "E(p') = 0, E(p) != 0 for p not exact"};
  auto both = [](Status a, Status b) {
    if (a == Status::mismatch || b == Status::mismatch) return Status::mismatch;
    return a == Status::verified && b == Status::verified ? Status::verified : Status::inconclusive;
  };
  for (int i = 0; i < cfg.cases; ++i) {
    const PsiDO a = gen.op(2, 1), b = gen.op(2, 1), c = gen.op(1, 1);
    const std::string tag = "case " + std::to_string(i) + ": " + to_string(a) + " | " + to_string(b);
    assoc.record(status_of(compare_operators((a * b) * c, a * (b * c), policy)), tag);
    adj.record(both(status_of(compare_operators(adjoint(a * b), adjoint(b) * adjoint(a), policy)),
                    status_of(compare_operators(adjoint(adjoint(a)), a, policy))),
               tag);
    res.record(is_total_derivative(*ctx, residue(commutator(a, b))) ? Status::verified : Status::mismatch, tag);
    const DiffExpr p = gen.density();
    // u1^2 has variational derivative 2 u1, so p' + u1^2 is never exact.
    const DiffExpr u1sq = pow(DiffExpr::jet(ctx->id("u1")), 2);
    const bool exact_killed = euler_annihilates(differentiate(p * p + p));
    const bool nonexact_kept = !euler_annihilates(differentiate(p) + u1sq);
    euler.record(exact_killed && nonexact_kept ? Status::verified : Status::mismatch,
                 "case " + std::to_string(i) + ": " + to_string(p, *ctx));
  }
  VerificationReport rep;
  rep.title = "property suite: " + std::to_string(cfg.cases) + " cases, seed " + std::to_string(cfg.seed) +
              ", depth " + std::to_string(cfg.depth);
  for (const auto* t : {&assoc, &adj, &res, &euler}) rep.add(t->result());
  rep.seconds = sw.seconds();
  return rep;
}

}  // namespace kpcalc
