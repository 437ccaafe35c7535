#pragma once

// Pseudo-differential operators Σ c_k ∂^k + Σ a_i ∂⁻¹ b_i, stored exactly.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "integration.hpp"

namespace kpcalc {

/// Rank-one Volterra tail left ∂⁻¹ right.
struct Dyad {
  DiffExpr left;
  DiffExpr right;
};

/// Truncated Laurent form Σ_{k ≥ -depth} c_k ∂^k.
struct OperatorView {
  int depth = 0;
  std::map<int, DiffExpr> coeffs;  // zero coefficients omitted

  DiffExpr coeff(int k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? DiffExpr{} : it->second;
  }
  void add(int k, const DiffExpr& c) {
    if (k < -depth || c.is_zero()) return;
    auto& slot = coeffs[k];
    slot += c;
    if (slot.is_zero()) coeffs.erase(k);
  }
  int order() const { return coeffs.empty() ? -depth - 1 : coeffs.rbegin()->first; }
  bool is_zero() const { return coeffs.empty(); }
  friend bool operator==(const OperatorView& a, const OperatorView& b) {
    return a.depth == b.depth && a.coeffs == b.coeffs;
  }
};

/// Product of truncated views, keeping degrees ≥ -depth.
inline OperatorView mul(const OperatorView& a, const OperatorView& b, int depth) {
  OperatorView r;
  r.depth = depth;
  for (const auto& [k, alpha] : a.coeffs) {
    for (const auto& [l, beta] : b.coeffs) {
      DiffExpr d = beta;
      for (int s = 0; k + l - s >= -depth; ++s) {
        const Rational c = binomial(k, s);
        if (c == 0 && k >= 0) break;
        if (c != 0) r.add(k + l - s, alpha * d * c);
        d = differentiate(d);
        if (d.is_zero()) break;
      }
    }
  }
  return r;
}

enum class Equality { equal, unequal, inconclusive };

/// Expansion depth for deciding dyad-sum equality; 0 selects 2r+2.
struct EqualityPolicy {
  int depth = 0;
};

class PsiDO {
 public:
  using DiffPart = std::map<int, DiffExpr>;

  PsiDO() = default;
  explicit PsiDO(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  static PsiDO function(ContextPtr ctx, const DiffExpr& f) {
    PsiDO r(std::move(ctx));
    r.add_diff(0, f);
    return r;
  }
  static PsiDO constant(ContextPtr ctx, const Rational& c) { return function(std::move(ctx), DiffExpr(c)); }
  static PsiDO del(ContextPtr ctx, int k = 1) {
    if (k < 0) throw std::invalid_argument("del: negative power; use dyads for ∂⁻¹");
    PsiDO r(std::move(ctx));
    r.add_diff(k, DiffExpr(1));
    return r;
  }
  /// left ∂⁻¹ right
  static PsiDO dyad(ContextPtr ctx, const DiffExpr& left, const DiffExpr& right) {
    PsiDO r(std::move(ctx));
    r.dyads_.push_back({left, right});
    r.normalize();
    return r;
  }
  static PsiDO from_parts(ContextPtr ctx, DiffPart diff, std::vector<Dyad> dyads) {
    PsiDO r(std::move(ctx));
    for (auto& [k, c] : diff) r.add_diff(k, c);
    r.dyads_ = std::move(dyads);
    r.normalize();
    return r;
  }

  const ContextPtr& context() const { return ctx_; }
  const Context& ctx() const {
    if (!ctx_) throw std::logic_error("operator without generator context");
    return *ctx_;
  }
  const DiffPart& diff() const { return diff_; }
  const std::vector<Dyad>& dyads() const { return dyads_; }

  DiffExpr coeff(int k) const {
    auto it = diff_.find(k);
    return it == diff_.end() ? DiffExpr{} : it->second;
  }
  bool is_zero() const { return diff_.empty() && dyads_.empty(); }
  bool is_differential() const { return dyads_.empty(); }
  /// Highest differential degree; -1 for a pure tail, INT_MIN-ish for zero.
  int order() const {
    if (!diff_.empty()) return diff_.rbegin()->first;
    return dyads_.empty() ? -1000000 : -1;
  }

  PsiDO& operator+=(const PsiDO& o) {
    adopt(o);
    for (const auto& [k, c] : o.diff_) add_diff(k, c);
    dyads_.insert(dyads_.end(), o.dyads_.begin(), o.dyads_.end());
    normalize();
    return *this;
  }
  PsiDO& operator-=(const PsiDO& o) { return *this += o * Rational(-1); }
  PsiDO& operator*=(const Rational& s) {
    if (s == 0) {
      diff_.clear();
      dyads_.clear();
      return *this;
    }
    for (auto& [k, c] : diff_) c *= s;
    for (auto& d : dyads_) d.left *= s;
    return *this;
  }

  friend PsiDO operator+(PsiDO a, const PsiDO& b) { return a += b; }
  friend PsiDO operator-(PsiDO a, const PsiDO& b) { return a -= b; }
  friend PsiDO operator-(PsiDO a) { return a *= Rational(-1); }
  friend PsiDO operator*(PsiDO a, const Rational& s) { return a *= s; }
  friend PsiDO operator*(const Rational& s, PsiDO a) { return a *= s; }
  friend PsiDO operator*(const PsiDO& a, const PsiDO& b);

  /// Structural identity of normal forms (no tail expansion).
  bool same_normal_form(const PsiDO& o) const {
    if (diff_ != o.diff_ || dyads_.size() != o.dyads_.size()) return false;
    for (std::size_t i = 0; i < dyads_.size(); ++i)
      if (dyads_[i].left != o.dyads_[i].left || dyads_[i].right != o.dyads_[i].right) return false;
    return true;
  }

  void adopt(const PsiDO& o) {
    if (!ctx_) {
      ctx_ = o.ctx_;
    } else if (o.ctx_ && o.ctx_ != ctx_) {
      throw std::invalid_argument("operators from different generator contexts");
    }
  }

  void add_diff(int k, const DiffExpr& c) {
    if (c.is_zero()) return;
    auto& slot = diff_[k];
    slot += c;
    if (slot.is_zero()) diff_.erase(k);
  }

 private:
  // Zero legs dropped, scalars on the left leg, dyads sharing a leg merged,
  // sorted by right leg.
  void normalize();

  ContextPtr ctx_;
  DiffPart diff_;
  std::vector<Dyad> dyads_;
};

namespace detail {

inline Rational leading_coeff(const DiffExpr& e) { return e.terms().rbegin()->second; }

// Σ_k α_k ∂^k ∘ f as a differential part.
inline PsiDO::DiffPart diff_times_function(const PsiDO::DiffPart& d, const DiffExpr& f) {
  PsiDO::DiffPart r;
  auto add = [&r](int k, const DiffExpr& c) {
    if (c.is_zero()) return;
    auto& slot = r[k];
    slot += c;
    if (slot.is_zero()) r.erase(k);
  };
  std::vector<DiffExpr> derivs{f};
  for (const auto& [k, alpha] : d) {
    while (static_cast<int>(derivs.size()) <= k) derivs.push_back(differentiate(derivs.back()));
    for (int s = 0; s <= k; ++s) {
      if (derivs[static_cast<std::size_t>(s)].is_zero()) continue;
      add(k - s, alpha * derivs[static_cast<std::size_t>(s)] * binomial(k, s));
    }
  }
  return r;
}

inline PsiDO::DiffPart compose_diff(const PsiDO::DiffPart& a, const PsiDO::DiffPart& b) {
  PsiDO::DiffPart r;
  for (const auto& [l, beta] : b) {
    for (const auto& [k, c] : diff_times_function(a, beta)) {
      auto& slot = r[k + l];
      slot += c;
      if (slot.is_zero()) r.erase(k + l);
    }
  }
  return r;
}

}  // namespace detail

inline void PsiDO::normalize() {
  std::vector<Dyad> ds;
  for (auto& d : dyads_)
    if (!d.left.is_zero() && !d.right.is_zero()) ds.push_back(std::move(d));

  bool changed = true;
  while (changed) {
    changed = false;
    // merge on right legs (right legs monic)
    std::map<DiffExpr, DiffExpr> by_right;
    for (auto& d : ds) {
      const Rational c = detail::leading_coeff(d.right);
      DiffExpr right = d.right * (Rational(1) / c);
      auto [it, inserted] = by_right.try_emplace(right, d.left * c);
      if (!inserted) {
        it->second += d.left * c;
        changed = true;
      }
    }
    // merge on left legs (left legs monic)
    std::map<DiffExpr, DiffExpr> by_left;
    for (auto& [right, left] : by_right) {
      if (left.is_zero()) continue;
      const Rational c = detail::leading_coeff(left);
      DiffExpr l = left * (Rational(1) / c);
      auto [it, inserted] = by_left.try_emplace(l, right * c);
      if (!inserted) {
        it->second += right * c;
        changed = true;
      }
    }
    ds.clear();
    for (auto& [left, right] : by_left)
      if (!right.is_zero()) ds.push_back({left, right});
  }
  for (auto& d : ds) {
    const Rational c = detail::leading_coeff(d.right);
    d.right *= Rational(1) / c;
    d.left *= c;
  }
  std::sort(ds.begin(), ds.end(), [](const Dyad& a, const Dyad& b) {
    if (int c = compare(a.right, b.right)) return c < 0;
    return compare(a.left, b.left) < 0;
  });
  dyads_ = std::move(ds);
}

inline PsiDO operator*(const PsiDO& a, const PsiDO& b) {
  PsiDO r(a.context());
  r.adopt(b);
  std::vector<Dyad> dyads;

  for (const auto& [k, c] : detail::compose_diff(a.diff(), b.diff())) r.add_diff(k, c);

  // differential ∘ (c ∂⁻¹ d) = (Σ_{m≥1} γ_m ∂^{m-1}) ∘ d + γ_0 ∂⁻¹ d, where a.diff ∘ c = Σ γ_m ∂^m
  for (const auto& dy : b.dyads()) {
    if (a.diff().empty()) break;
    const auto gamma = detail::diff_times_function(a.diff(), dy.left);
    PsiDO::DiffPart shifted;
    for (const auto& [m, g] : gamma) {
      if (m == 0)
        dyads.push_back({g, dy.right});
      else
        shifted[m - 1] = g;
    }
    for (const auto& [k, c] : detail::diff_times_function(shifted, dy.right)) r.add_diff(k, c);
  }

  // (a ∂⁻¹ b) ∘ Σ β_l ∂^l: ∂⁻¹∘η∂^l = Σ_{j<l} (-1)^j η^(j) ∂^{l-1-j} + (-1)^l ∂⁻¹ η^(l)
  for (const auto& dy : a.dyads()) {
    if (b.diff().empty()) break;
    DiffExpr tail;
    for (const auto& [l, beta] : b.diff()) {
      DiffExpr eta = dy.right * beta;
      for (int j = 0; j < l; ++j) {
        r.add_diff(l - 1 - j, dy.left * eta * Rational(j % 2 ? -1 : 1));
        eta = differentiate(eta);
      }
      tail += eta * Rational(l % 2 ? -1 : 1);
    }
    dyads.push_back({dy.left, tail});
  }

  // (a ∂⁻¹ b)(c ∂⁻¹ d) = a J(bc) ∂⁻¹ d - a ∂⁻¹ J(bc) d
  for (const auto& x : a.dyads()) {
    for (const auto& y : b.dyads()) {
      const DiffExpr h = antiderivative(r.ctx(), x.right * y.left);
      dyads.push_back({x.left * h, y.right});
      dyads.push_back({-x.left, h * y.right});
    }
  }
  return r + PsiDO::from_parts(r.context(), {}, std::move(dyads));
}

/// Formal adjoint: ∂* = -∂, f* = f, (a∂⁻¹b)* = -b∂⁻¹a.
inline PsiDO adjoint(const PsiDO& a) {
  PsiDO r(a.context());
  for (const auto& [k, alpha] : a.diff()) {
    PsiDO::DiffPart single{{k, DiffExpr(1)}};
    for (const auto& [m, c] : detail::diff_times_function(single, alpha))
      r.add_diff(m, c * Rational(k % 2 ? -1 : 1));
  }
  std::vector<Dyad> ds;
  for (const auto& d : a.dyads()) ds.push_back({-d.right, d.left});
  return r + PsiDO::from_parts(a.context(), {}, std::move(ds));
}

enum class Part { plus, minus, geq1, order0 };

/// (A)_+ , (A)_- , (A)_{≥1}; use order0() for the zeroth coefficient.
inline PsiDO project(const PsiDO& a, Part part) {
  PsiDO::DiffPart d;
  std::vector<Dyad> ds;
  switch (part) {
    case Part::plus:
      for (const auto& [k, c] : a.diff())
        if (k >= 0) d[k] = c;
      break;
    case Part::geq1:
      for (const auto& [k, c] : a.diff())
        if (k >= 1) d[k] = c;
      break;
    case Part::minus:
      ds = a.dyads();
      break;
    case Part::order0:
      if (auto c = a.coeff(0); !c.is_zero()) d[0] = c;
      break;
  }
  return PsiDO::from_parts(a.context(), std::move(d), std::move(ds));
}

inline DiffExpr order0(const PsiDO& a) { return a.coeff(0); }

/// Coefficient of ∂⁻¹.
inline DiffExpr residue(const PsiDO& a) {
  DiffExpr r;
  for (const auto& d : a.dyads()) r += d.left * d.right;
  return r;
}

/// a∂⁻¹b ↦ Σ_{k≥1} (-1)^{k-1} a b^(k-1) ∂^{-k}, truncated at ∂^{-depth}.
inline OperatorView expand_tail(const PsiDO& a, int depth) {
  if (depth < 0) throw std::invalid_argument("expand_tail: negative depth");
  OperatorView v;
  v.depth = depth;
  for (const auto& [k, c] : a.diff()) v.add(k, c);
  for (const auto& d : a.dyads()) {
    DiffExpr b = d.right;
    for (int k = 1; k <= depth; ++k) {
      v.add(-k, d.left * b * Rational(k % 2 ? 1 : -1));
      b = differentiate(b);
    }
  }
  return v;
}

inline OperatorView to_view(const PsiDO& a, int depth) { return expand_tail(a, depth); }

/// Decides a == b. Differential parts compare exactly; tails by expansion,
/// which is conclusive once the depth reaches the tail rank bound.
inline Equality compare_operators(const PsiDO& a, const PsiDO& b, EqualityPolicy policy = {}) {
  const PsiDO d = a - b;
  if (!d.diff().empty()) return Equality::unequal;
  if (d.dyads().empty()) return Equality::equal;
  const int rank = static_cast<int>(d.dyads().size());
  const int depth = policy.depth > 0 ? policy.depth : 2 * rank + 2;
  const OperatorView v = expand_tail(d, depth);
  if (!v.is_zero()) return Equality::unequal;
  return depth >= rank ? Equality::equal : Equality::inconclusive;
}

inline bool operator==(const PsiDO& a, const PsiDO& b) { return compare_operators(a, b) == Equality::equal; }
inline bool operator!=(const PsiDO& a, const PsiDO& b) { return !(a == b); }

inline PsiDO commutator(const PsiDO& a, const PsiDO& b) { return a * b - b * a; }

/// g⁻¹ ∘ A ∘ g for a unit g.
inline PsiDO conjugate_by(const PsiDO& a, const DiffExpr& g) {
  const Context& ctx = a.ctx();
  if (!is_unit(g, ctx)) throw std::domain_error("conjugate_by: multiplier is not a unit");
  const auto& c = a.context();
  return PsiDO::function(c, unit_inverse(g, ctx)) * a * PsiDO::function(c, g);
}

/// (∂ - b)⁻¹ = E(b) ∂⁻¹ E(-b), a two-sided inverse in the dyadic algebra.
inline PsiDO invert_monic_linear(ContextPtr ctx, const DiffExpr& b) {
  return PsiDO::dyad(std::move(ctx), DiffExpr::exp_integral(b), DiffExpr::exp_integral(-b));
}

inline PsiDO power(const PsiDO& a, unsigned n) {
  PsiDO r = PsiDO::constant(a.context(), 1);
  for (unsigned i = 0; i < n; ++i) r = r * a;
  return r;
}

/// (A ∘ f)_0: the operator acting on a function.
inline DiffExpr apply(const PsiDO& a, const DiffExpr& f) {
  DiffExpr r;
  DiffExpr d = f;
  int k = 0;
  for (const auto& [deg, alpha] : a.diff()) {
    while (k < deg) {
      d = differentiate(d);
      ++k;
    }
    r += alpha * d;
  }
  for (const auto& dy : a.dyads()) r += dy.left * antiderivative(a.ctx(), dy.right * f);
  return r;
}

/// Principal N-th root of a monic order-N operator, as a view with
/// coefficients down to ∂^{-depth}; R^N agrees with A on orders ≥ N-1-depth.
inline OperatorView nth_root(const PsiDO& a, int n, int depth) {
  if (n <= 0) throw std::invalid_argument("nth_root: N must be positive");
  if (a.order() != n || a.coeff(n) != DiffExpr(1)) throw std::domain_error("nth_root: operator is not monic of order N");
  const OperatorView target = expand_tail(a, depth + n);
  OperatorView root;
  root.depth = depth;
  root.add(1, DiffExpr(1));
  for (int j = 0; j <= depth; ++j) {
    const int deg = n - 1 - j;
    OperatorView p;
    p.depth = n - deg;
    p.add(0, DiffExpr(1));
    for (int i = 0; i < n; ++i) p = mul(p, root, n - deg);
    const DiffExpr c = (target.coeff(deg) - p.coeff(deg)) * (Rational(1) / Rational(n));
    root.add(-j, c);
  }
  return root;
}

/// The differential part of a view (degrees ≥ 0) as an exact operator.
inline PsiDO view_plus(ContextPtr ctx, const OperatorView& v) {
  PsiDO::DiffPart d;
  for (const auto& [k, c] : v.coeffs)
    if (k >= 0) d[k] = c;
  return PsiDO::from_parts(std::move(ctx), std::move(d), {});
}

inline std::string to_string(const PsiDO& a) {
  if (a.is_zero()) return "0";
  const Context& ctx = a.ctx();
  std::string s;
  auto append = [&s](const std::string& term) {
    if (s.empty()) {
      s = term;
    } else if (term.rfind("-", 0) == 0) {
      s += " - " + term.substr(1);
    } else {
      s += " + " + term;
    }
  };
  for (auto it = a.diff().rbegin(); it != a.diff().rend(); ++it) {
    const auto& [k, c] = *it;
    const std::string del = k == 1 ? "del" : "del^" + std::to_string(k);
    if (k == 0) {
      append(c.size() == 1 ? to_string(c, ctx) : "(" + to_string(c, ctx) + ")");
    } else if (c == DiffExpr(1)) {
      append(del);
    } else if (c == DiffExpr(-1)) {
      append("-" + del);
    } else if (c.size() == 1) {
      append(to_string(c, ctx) + "*" + del);
    } else {
      append("(" + to_string(c, ctx) + ")*" + del);
    }
  }
  for (const auto& d : a.dyads())
    append("dinv(" + to_string(d.left, ctx) + ", " + to_string(d.right, ctx) + ")");
  return s;
}

inline std::string to_string(const OperatorView& v, const Context& ctx) {
  if (v.is_zero()) return "0";
  std::string s;
  for (auto it = v.coeffs.rbegin(); it != v.coeffs.rend(); ++it) {
    if (!s.empty()) s += " + ";
    s += "(" + to_string(it->second, ctx) + ")*del^" + std::to_string(it->first);
  }
  return s + " + O(del^" + std::to_string(-v.depth - 1) + ")";
}

}  // namespace kpcalc
