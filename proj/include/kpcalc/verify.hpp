#pragma once

// Verification reports and the bracket-table check T_actual = map(L, X) against
// the tangent template filled with δf_i = Σ_j P_ij(x_j).

#include <chrono>
#include <string>
#include <vector>

#include "bracket.hpp"
#include "covector.hpp"
#include "family.hpp"
#include "maps.hpp"

namespace kpcalc {

enum class Status { verified, mismatch, inconclusive, skipped };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::verified: return "verified";
    case Status::mismatch: return "mismatch";
    case Status::inconclusive: return "inconclusive";
    case Status::skipped: return "skipped";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  std::string anchor;  // what the check reproduces
  Status status = Status::skipped;
  std::string residual;  // normal form of the defect when not verified
  std::string detail;
};

struct VerificationReport {
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0;

  bool ok() const {
    for (const auto& c : checks)
      if (c.status != Status::verified && c.status != Status::skipped) return false;
    return !checks.empty();
  }
  std::size_t count(Status s) const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.status == s;
    return n;
  }
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void merge(const VerificationReport& o) {
    for (const auto& c : o.checks) checks.push_back(c);
    seconds += o.seconds;
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Status status_of(Equality e) {
  switch (e) {
    case Equality::equal: return Status::verified;
    case Equality::unequal: return Status::mismatch;
    case Equality::inconclusive: return Status::inconclusive;
  }
  return Status::mismatch;
}

/// Expansion depth for report comparisons whose policy leaves it at 0; 0 means 2r+2.
inline int& report_depth() {
  thread_local int depth = 0;
  return depth;
}

inline EqualityPolicy resolve(EqualityPolicy p) {
  if (p.depth == 0) p.depth = report_depth();
  return p;
}

/// Sets report_depth() for the lifetime of the guard.
class ReportDepth {
 public:
  explicit ReportDepth(int depth) : saved_(report_depth()) { report_depth() = depth; }
  ~ReportDepth() { report_depth() = saved_; }
  ReportDepth(const ReportDepth&) = delete;
  ReportDepth& operator=(const ReportDepth&) = delete;

 private:
  int saved_;
};

/// Operator equality as a check result; the residual is a - b.
inline CheckResult check_equal(std::string name, std::string anchor, const PsiDO& a, const PsiDO& b,
                               EqualityPolicy policy = {}) {
  CheckResult r{std::move(name), std::move(anchor), status_of(compare_operators(a, b, resolve(policy))), "", ""};
  if (r.status != Status::verified) r.residual = to_string(a - b);
  return r;
}

inline CheckResult check_equal(std::string name, std::string anchor, const DiffExpr& a, const DiffExpr& b,
                               const Context& ctx) {
  CheckResult r{std::move(name), std::move(anchor), a == b ? Status::verified : Status::mismatch, "", ""};
  if (r.status != Status::verified) r.residual = to_string(a - b, ctx);
  return r;
}

inline CheckResult check_true(std::string name, std::string anchor, bool ok, std::string detail = "") {
  return CheckResult{std::move(name), std::move(anchor), ok ? Status::verified : Status::mismatch, "",
                     std::move(detail)};
}

/// δf_i = Σ_j P_ij(x_j) for the gradients of a covector.
inline std::map<GenId, DiffExpr> bracket_flow(const BracketMatrix& table, const std::map<GenId, DiffExpr>& gradient) {
  std::map<GenId, DiffExpr> delta;
  for (std::size_t i = 0; i < table.size(); ++i) {
    DiffExpr d;
    for (std::size_t j = 0; j < table.size(); ++j) {
      const PsiDO p = table.at(i, j);
      if (!p.is_zero()) d += apply(p, gradient.at(table.fields()[j]));
    }
    delta[table.fields()[i]] = d;
  }
  return delta;
}

/// Checks that map(L, X) equals the tangent built from the table, for the
/// generic covector X. A pass certifies every entry of the table at once.
inline VerificationReport verify_bracket_table(const LaxFamily& fam, HamiltonianMap map, const BracketMatrix& table,
                                               const std::string& anchor, EqualityPolicy policy = {}) {
  Stopwatch sw;
  VerificationReport rep;
  rep.title = fam.name + " " + to_string(map);
  const Covector cv = generic_covector(fam);
  rep.add(check_true("pairing", "covector gradients", pairing_holds(fam, cv)));
  const PsiDO actual = apply_map(map, fam.op(), cv.X, fam.N);
  const PsiDO expected = fam.tangent(bracket_flow(table, cv.gradient));
  const Equality eq = compare_operators(actual, expected, resolve(policy));
  const std::string residual = eq == Equality::equal ? "" : to_string(actual - expected);
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = i; j < table.size(); ++j) {
      CheckResult c;
      c.name = "{" + fam.field_name(table.fields()[i]) + "," + fam.field_name(table.fields()[j]) + "}";
      c.anchor = anchor;
      c.status = status_of(eq);
      c.residual = residual;
      c.detail = to_string(table.at(i, j));
      rep.add(c);
    }
  rep.seconds = sw.seconds();
  return rep;
}

}  // namespace kpcalc
