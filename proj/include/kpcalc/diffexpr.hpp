#pragma once

// Differential expressions: Laurent polynomials over Q in jet variables,
// formal antiderivative symbols J(m) and exponential integrals E(g) = exp(∫g).

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "context.hpp"
#include "rational.hpp"

namespace kpcalc {

class DiffExpr;
struct Monomial;
using ExprPtr = std::shared_ptr<const DiffExpr>;
using MonomialPtr = std::shared_ptr<const Monomial>;

struct Atom {
  enum class Kind : std::uint8_t { jet = 0, integral = 1 };
  Kind kind = Kind::jet;
  GenId gen = 0;
  std::uint32_t order = 0;
  MonomialPtr arg;  // J(arg); arg carries unit coefficient

  static Atom jet(GenId g, std::uint32_t k) { return Atom{Kind::jet, g, k, nullptr}; }
  static Atom integral(Monomial m);
  bool is_jet() const { return kind == Kind::jet; }
};

struct Factor {
  Atom atom;
  int exponent = 1;
};

struct Monomial {
  std::vector<Factor> factors;  // sorted by atom, no zero exponents
  ExprPtr exp_arg;              // E(exp_arg), null if absent

  int degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.exponent;
    return d;
  }
  bool is_one() const { return factors.empty() && !exp_arg; }
};

int compare(const Atom& a, const Atom& b);
int compare(const Monomial& a, const Monomial& b);
int compare(const DiffExpr& a, const DiffExpr& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

class DiffExpr {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  DiffExpr() = default;
  DiffExpr(const Rational& c) {  // NOLINT: constants convert implicitly
    if (c != 0) terms_.emplace(Monomial{}, c);
  }
  DiffExpr(long c) : DiffExpr(Rational(c)) {}  // NOLINT
  DiffExpr(int c) : DiffExpr(Rational(c)) {}   // NOLINT

  static DiffExpr jet(GenId g, std::uint32_t k = 0) {
    Monomial m;
    m.factors.push_back({Atom::jet(g, k), 1});
    return monomial(std::move(m));
  }
  static DiffExpr monomial(Monomial m, const Rational& c = 1) {
    DiffExpr e;
    if (c != 0) e.terms_.emplace(std::move(m), c);
    return e;
  }
  /// E(g) with E(0) = 1.
  static DiffExpr exp_integral(const DiffExpr& g) {
    if (g.is_zero()) return DiffExpr(1);
    Monomial m;
    m.exp_arg = std::make_shared<const DiffExpr>(g);
    return monomial(std::move(m));
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
  }
  Rational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  DiffExpr& operator+=(const DiffExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  DiffExpr& operator-=(const DiffExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  DiffExpr& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  DiffExpr& operator*=(const DiffExpr& o);

  friend DiffExpr operator+(DiffExpr a, const DiffExpr& b) { return a += b; }
  friend DiffExpr operator-(DiffExpr a, const DiffExpr& b) { return a -= b; }
  friend DiffExpr operator-(DiffExpr a) { return a *= Rational(-1); }
  friend DiffExpr operator*(DiffExpr a, const Rational& s) { return a *= s; }
  friend DiffExpr operator*(const Rational& s, DiffExpr a) { return a *= s; }
  friend DiffExpr operator*(const DiffExpr& a, const DiffExpr& b) {
    DiffExpr r = a;
    r *= b;
    return r;
  }
  friend bool operator==(const DiffExpr& a, const DiffExpr& b) { return compare(a, b) == 0; }
  friend bool operator!=(const DiffExpr& a, const DiffExpr& b) { return compare(a, b) != 0; }
  friend bool operator<(const DiffExpr& a, const DiffExpr& b) { return compare(a, b) < 0; }

 private:
  Terms terms_;
};

inline Atom Atom::integral(Monomial m) {
  return Atom{Kind::integral, 0, 0, std::make_shared<const Monomial>(std::move(m))};
}

inline int compare(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.is_jet()) {
    if (a.gen != b.gen) return a.gen < b.gen ? -1 : 1;
    if (a.order != b.order) return a.order < b.order ? -1 : 1;
    return 0;
  }
  if (a.arg == b.arg) return 0;
  return compare(*a.arg, *b.arg);
}

inline int compare(const Monomial& a, const Monomial& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  const std::size_t n = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.factors[i].atom, b.factors[i].atom)) return c;
    if (a.factors[i].exponent != b.factors[i].exponent)
      return a.factors[i].exponent < b.factors[i].exponent ? -1 : 1;
  }
  if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size() ? -1 : 1;
  if (!a.exp_arg || !b.exp_arg) {
    if (a.exp_arg == b.exp_arg) return 0;
    return a.exp_arg ? 1 : -1;
  }
  if (a.exp_arg == b.exp_arg) return 0;
  return compare(*a.exp_arg, *b.exp_arg);
}

inline int compare(const DiffExpr& a, const DiffExpr& b) {
  auto ia = a.terms().begin(), ib = b.terms().begin();
  for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
    if (int c = compare(ia->first, ib->first)) return c;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia != a.terms().end()) return 1;
  if (ib != b.terms().end()) return -1;
  return 0;
}

inline Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.factors.reserve(a.factors.size() + b.factors.size());
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() || ib != b.factors.end()) {
    if (ib == b.factors.end() || (ia != a.factors.end() && compare(ia->atom, ib->atom) < 0)) {
      r.factors.push_back(*ia++);
    } else if (ia == a.factors.end() || compare(ib->atom, ia->atom) < 0) {
      r.factors.push_back(*ib++);
    } else {
      const int e = ia->exponent + ib->exponent;
      if (e != 0) r.factors.push_back({ia->atom, e});
      ++ia;
      ++ib;
    }
  }
  if (a.exp_arg && b.exp_arg) {
    DiffExpr g = *a.exp_arg + *b.exp_arg;
    if (!g.is_zero()) r.exp_arg = std::make_shared<const DiffExpr>(std::move(g));
  } else {
    r.exp_arg = a.exp_arg ? a.exp_arg : b.exp_arg;
  }
  return r;
}

inline DiffExpr& DiffExpr::operator*=(const DiffExpr& o) {
  DiffExpr r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
  *this = std::move(r);
  return *this;
}

/// Monomial with one copy of the factor at `index` removed.
// Iterated integrals. A J atom whose argument is w1 * J(...) with w1 free of
// J and E encodes the word (w1, w2, ..., wn): I(w1 ... wn) = J(w1 I(w2 ... wn)).
// Canonical expressions use Lyndon words only; other words are rewritten
// through the shuffle relations, which keeps products of integrals unique.
using Word = std::vector<Monomial>;

inline int compare(const Word& a, const Word& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (int c = compare(a[i], b[i])) return c;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

struct WordLess {
  bool operator()(const Word& a, const Word& b) const { return compare(a, b) < 0; }
};

using WordSum = std::map<Word, Rational, WordLess>;

/// The word of J(arg), or nullopt for a formal integral symbol.
inline std::optional<Word> word_of(const Monomial& arg) {
  if (arg.exp_arg) return std::nullopt;
  Monomial letter;
  const Factor* inner = nullptr;
  for (const auto& f : arg.factors) {
    if (f.atom.is_jet()) {
      letter.factors.push_back(f);
    } else {
      if (inner || f.exponent != 1) return std::nullopt;
      inner = &f;
    }
  }
  Word w{letter};
  if (inner) {
    auto tail = word_of(*inner->atom.arg);
    if (!tail) return std::nullopt;
    w.insert(w.end(), tail->begin(), tail->end());
  }
  return w;
}

inline Atom word_atom(const Word& w, std::size_t from = 0) {
  Monomial arg = w.at(from);
  if (from + 1 < w.size()) arg.factors.push_back({word_atom(w, from + 1), 1});
  return Atom::integral(std::move(arg));
}

inline bool is_lyndon(const Word& w) {
  if (w.empty()) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (compare(w, Word(w.begin() + static_cast<long>(i), w.end())) >= 0) return false;
  return true;
}

/// Duval's factorization into non-increasing Lyndon words.
inline std::vector<Word> lyndon_factorization(const Word& s) {
  std::vector<Word> out;
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1, k = i;
    while (j < n && compare(s[k], s[j]) <= 0) {
      k = compare(s[k], s[j]) < 0 ? i : k + 1;
      ++j;
    }
    while (i <= k) {
      out.emplace_back(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i + j - k));
      i += j - k;
    }
  }
  return out;
}

inline void shuffle_into(const Word& a, std::size_t i, const Word& b, std::size_t j, Word& prefix,
                         const Rational& c, WordSum& out) {
  if (i == a.size() || j == b.size()) {
    Word w = prefix;
    w.insert(w.end(), a.begin() + static_cast<long>(i), a.end());
    w.insert(w.end(), b.begin() + static_cast<long>(j), b.end());
    out[w] += c;
    return;
  }
  prefix.push_back(a[i]);
  shuffle_into(a, i + 1, b, j, prefix, c, out);
  prefix.back() = b[j];
  shuffle_into(a, i, b, j + 1, prefix, c, out);
  prefix.pop_back();
}

inline WordSum shuffle(const WordSum& s, const Word& w) {
  WordSum out;
  for (const auto& [u, c] : s) {
    Word prefix;
    shuffle_into(u, 0, w, 0, prefix, c, out);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

/// I(v) written as a polynomial in Lyndon integrals.
inline DiffExpr word_integral(const Word& v) {
  if (v.empty()) return DiffExpr(1);
  if (is_lyndon(v)) {
    Monomial m;
    m.factors.push_back({word_atom(v), 1});
    return DiffExpr::monomial(std::move(m));
  }
  static std::recursive_mutex mu;
  static std::map<Word, DiffExpr, WordLess> memo;
  std::lock_guard<std::recursive_mutex> lock(mu);
  if (auto it = memo.find(v); it != memo.end()) return it->second;
  WordSum sh{{Word{}, Rational(1)}};
  DiffExpr r(1);
  for (const Word& l : lyndon_factorization(v)) {
    sh = shuffle(sh, l);
    r *= word_integral(l);
  }
  const Rational lead = sh.at(v);
  for (const auto& [u, c] : sh) {
    if (compare(u, v) == 0) continue;
    if (compare(u, v) > 0) throw std::logic_error("word_integral: shuffle leading term");
    r -= word_integral(u) * c;
  }
  r *= Rational(1) / lead;
  memo.emplace(v, r);
  return r;
}

inline Monomial drop_one(const Monomial& m, std::size_t index) {
  Monomial r = m;
  if (--r.factors[index].exponent == 0) r.factors.erase(r.factors.begin() + static_cast<long>(index));
  return r;
}

inline DiffExpr differentiate(const Monomial& m) {
  DiffExpr r;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const auto& f = m.factors[i];
    const Monomial rest = drop_one(m, i);
    if (f.atom.is_jet()) {
      Monomial d;
      d.factors.push_back({Atom::jet(f.atom.gen, f.atom.order + 1), 1});
      r.add_term(rest * d, Rational(f.exponent));
    } else {
      DiffExpr d;
      if (auto w = word_of(*f.atom.arg))
        d = DiffExpr::monomial((*w)[0]) * word_integral(Word(w->begin() + 1, w->end()));
      else
        d = DiffExpr::monomial(*f.atom.arg);
      r += DiffExpr::monomial(rest, Rational(f.exponent)) * d;
    }
  }
  if (m.exp_arg) r += DiffExpr::monomial(m) * *m.exp_arg;
  return r;
}

/// The total derivative d/dx.
inline DiffExpr differentiate(const DiffExpr& e, unsigned times = 1) {
  DiffExpr cur = e;
  for (unsigned t = 0; t < times; ++t) {
    DiffExpr next;
    for (const auto& [m, c] : cur.terms()) {
      if (m.is_one()) continue;
      DiffExpr d = differentiate(m);
      d *= c;
      next += d;
    }
    cur = std::move(next);
  }
  return cur;
}

inline bool contains_integral(const Monomial& m) {
  for (const auto& f : m.factors)
    if (!f.atom.is_jet()) return true;
  return false;
}
inline bool contains_integral(const DiffExpr& e) {
  for (const auto& [m, c] : e.terms())
    if (contains_integral(m)) return true;
  return false;
}
inline bool contains_exp(const DiffExpr& e) {
  for (const auto& [m, c] : e.terms())
    if (m.exp_arg) return true;
  return false;
}
inline bool is_plain(const Monomial& m) { return !m.exp_arg && !contains_integral(m); }
inline bool is_plain(const DiffExpr& e) { return !contains_integral(e) && !contains_exp(e); }

/// Units: nonzero rational times invertible order-0 jets and an E factor.
inline bool is_unit(const DiffExpr& e, const Context& ctx) {
  if (e.size() != 1) return false;
  for (const auto& f : e.terms().begin()->first.factors) {
    if (!f.atom.is_jet() || f.atom.order != 0 || !ctx[f.atom.gen].invertible) return false;
  }
  return true;
}

inline DiffExpr unit_inverse(const DiffExpr& e, const Context& ctx) {
  if (!is_unit(e, ctx)) throw std::domain_error("expression is not a unit");
  const auto& [m, c] = *e.terms().begin();
  Monomial inv;
  for (const auto& f : m.factors) inv.factors.push_back({f.atom, -f.exponent});
  if (m.exp_arg) inv.exp_arg = std::make_shared<const DiffExpr>(-*m.exp_arg);
  return DiffExpr::monomial(std::move(inv), Rational(1) / c);
}

inline DiffExpr pow(const DiffExpr& e, unsigned n) {
  DiffExpr r(1);
  for (unsigned i = 0; i < n; ++i) r *= e;
  return r;
}

/// ∂e/∂atom treating every atom as independent.
inline DiffExpr partial(const DiffExpr& e, const Atom& a) {
  DiffExpr r;
  for (const auto& [m, c] : e.terms()) {
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
      if (compare(m.factors[i].atom, a) != 0) continue;
      r.add_term(drop_one(m, i), c * m.factors[i].exponent);
    }
  }
  return r;
}

/// Highest jet order of generator g appearing anywhere (including inside J/E), or -1.
inline int max_order(const DiffExpr& e, GenId g);
inline int max_order(const Monomial& m, GenId g) {
  int best = -1;
  for (const auto& f : m.factors) {
    if (f.atom.is_jet()) {
      if (f.atom.gen == g) best = std::max(best, static_cast<int>(f.atom.order));
    } else {
      best = std::max(best, max_order(*f.atom.arg, g));
    }
  }
  if (m.exp_arg) best = std::max(best, max_order(*m.exp_arg, g));
  return best;
}
inline int max_order(const DiffExpr& e, GenId g) {
  int best = -1;
  for (const auto& [m, c] : e.terms()) best = std::max(best, max_order(m, g));
  return best;
}

inline void collect_generators(const DiffExpr& e, std::set<GenId>& out);
inline void collect_generators(const Monomial& m, std::set<GenId>& out) {
  for (const auto& f : m.factors) {
    if (f.atom.is_jet())
      out.insert(f.atom.gen);
    else
      collect_generators(*f.atom.arg, out);
  }
  if (m.exp_arg) collect_generators(*m.exp_arg, out);
}
inline void collect_generators(const DiffExpr& e, std::set<GenId>& out) {
  for (const auto& [m, c] : e.terms()) collect_generators(m, out);
}

// ---------------------------------------------------------------- printing

inline std::string to_string(const DiffExpr& e, const Context& ctx);

inline std::string to_string(const Monomial& m, const Context& ctx) {
  std::string s;
  auto append = [&s](const std::string& part) {
    if (!s.empty()) s += "*";
    s += part;
  };
  for (const auto& f : m.factors) {
    std::string base;
    if (f.atom.is_jet()) {
      base = ctx[f.atom.gen].name + std::string(f.atom.order, '\'');
    } else {
      base = "J(" + to_string(*f.atom.arg, ctx) + ")";
    }
    if (f.exponent != 1) base += "^" + std::to_string(f.exponent);
    append(base);
  }
  if (m.exp_arg) append("E(" + to_string(*m.exp_arg, ctx) + ")");
  return s.empty() ? "1" : s;
}

inline std::string to_string(const DiffExpr& e, const Context& ctx) {
  if (e.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    const bool neg = c < 0;
    const Rational a = neg ? Rational(-c) : c;
    std::string body;
    if (m.is_one()) {
      body = to_string(a);
    } else if (a == 1) {
      body = to_string(m, ctx);
    } else {
      body = to_string(a) + "*" + to_string(m, ctx);
    }
    if (first) {
      s = neg ? "-" + body : body;
      first = false;
    } else {
      s += neg ? " - " : " + ";
      s += body;
    }
  }
  return s;
}

}  // namespace kpcalc
