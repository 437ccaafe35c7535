#pragma once

// LaTeX rendering of expressions, operators and bracket tables.

#include <cctype>
#include <string>

#include "bracket.hpp"

namespace kpcalc {

/// phi1 → \phi_{1}, psi_2 → \psi_{2}, u1 → u_{1}.
inline std::string latex_name(const std::string& name) {
  std::string base = name, index;
  if (auto us = name.find('_'); us != std::string::npos) {
    base = name.substr(0, us);
    index = name.substr(us + 1);
  } else {
    std::size_t k = name.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(name[k - 1]))) --k;
    if (k > 0 && k < name.size()) {
      base = name.substr(0, k);
      index = name.substr(k);
    }
  }
  static const char* greek[] = {"alpha", "beta", "gamma", "delta", "phi", "psi", "theta", "omega", "rho", "sigma", "tau"};
  for (const char* g : greek)
    if (base == g) base = std::string("\\") + g;
  return index.empty() ? base : base + "_{" + index + "}";
}

inline std::string to_latex(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
}

inline std::string to_latex(const DiffExpr& e, const Context& ctx);

inline std::string to_latex(const Monomial& m, const Context& ctx) {
  std::string s;
  for (const auto& f : m.factors) {
    std::string base;
    if (f.atom.is_jet()) {
      base = latex_name(ctx[f.atom.gen].name) + std::string(f.atom.order, '\'');
      if (f.atom.order > 0 && f.exponent != 1) base = "(" + base + ")";
    } else {
      base = "\\partial^{-1}(" + to_latex(DiffExpr::monomial(*f.atom.arg, 1), ctx) + ")";
    }
    if (f.exponent != 1) base += "^{" + std::to_string(f.exponent) + "}";
    s += (s.empty() ? "" : " ") + base;
  }
  if (m.exp_arg) s += (s.empty() ? "" : " ") + std::string("e^{\\partial^{-1}(") + to_latex(*m.exp_arg, ctx) + ")}";
  return s;
}

inline std::string to_latex(const DiffExpr& e, const Context& ctx) {
  if (e.is_zero()) return "0";
  std::string s;
  for (const auto& [m, c] : e.terms()) {
    const bool neg = c < 0;
    const Rational a = neg ? Rational(-c) : c;
    std::string body;
    if (m.is_one()) body = to_latex(a);
    else if (a == 1) body = to_latex(m, ctx);
    else body = to_latex(a) + " " + to_latex(m, ctx);
    if (s.empty()) s = neg ? "-" + body : body;
    else s += (neg ? " - " : " + ") + body;
  }
  return s;
}

inline std::string to_latex(const PsiDO& a) {
  if (a.is_zero()) return "0";
  const Context& ctx = a.ctx();
  auto group = [&](const DiffExpr& c) { return c.size() == 1 ? to_latex(c, ctx) : "(" + to_latex(c, ctx) + ")"; };
  std::string s;
  auto append = [&s](const std::string& term) {
    if (s.empty()) s = term;
    else if (term.rfind("-", 0) == 0) s += " - " + term.substr(1);
    else s += " + " + term;
  };
  for (auto it = a.diff().rbegin(); it != a.diff().rend(); ++it) {
    const auto& [k, c] = *it;
    const std::string del = k == 1 ? "\\partial" : "\\partial^{" + std::to_string(k) + "}";
    if (k == 0) append(group(c));
    else if (c == DiffExpr(1)) append(del);
    else if (c == DiffExpr(-1)) append("-" + del);
    else append(group(c) + " " + del);
  }
  for (const auto& d : a.dyads()) {
    const std::string left = d.left == DiffExpr(1) ? "" : group(d.left) + " ";
    const std::string right = d.right == DiffExpr(1) ? "" : " " + group(d.right);
    append(left + "\\partial^{-1}" + right);
  }
  return s;
}

/// One align row per stored entry.
inline std::string to_latex(const BracketMatrix& t) {
  const Context& ctx = *t.context();
  std::string s = "\\begin{align*}\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i; j < t.size(); ++j) {
      if (t.at(i, j).is_zero()) continue;
      s += "\\{" + latex_name(ctx[t.fields()[i]].name) + "," + latex_name(ctx[t.fields()[j]].name) + "\\} &= " +
           to_latex(t.at(i, j)) + " \\\\\n";
    }
  return s + "\\end{align*}\n";
}

}  // namespace kpcalc
