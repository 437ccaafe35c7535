#pragma once

// Bracket matrices {f_i, f_j} = P_ij and the chain-rule transfer between coordinates.

#include <sstream>
#include <string>
#include <vector>

#include "frechet.hpp"
#include "integration.hpp"
#include "parser.hpp"

namespace kpcalc {

/// Square array of operators indexed by coordinate fields. Entries not set
/// explicitly follow from skew-adjointness, P_ji = -P_ij*, or are zero.
class BracketMatrix {
 public:
  BracketMatrix(ContextPtr ctx, std::vector<GenId> fields) : ctx_(std::move(ctx)), fields_(std::move(fields)) {}

  const ContextPtr& context() const { return ctx_; }
  const std::vector<GenId>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }

  std::size_t index(GenId g) const {
    for (std::size_t i = 0; i < fields_.size(); ++i)
      if (fields_[i] == g) return i;
    throw std::out_of_range("bracket: field " + (*ctx_)[g].name + " not in table");
  }

  void set(std::size_t i, std::size_t j, const PsiDO& p) { entries_.insert_or_assign({i, j}, p); }
  void set(const std::string& f, const std::string& g, const PsiDO& p) {
    set(index(ctx_->id(f)), index(ctx_->id(g)), p);
  }
  void set(const std::string& f, const std::string& g, const std::string& expr) {
    set(f, g, parse_operator(ctx_, expr));
  }

  bool has_explicit(std::size_t i, std::size_t j) const { return entries_.count({i, j}) != 0; }

  PsiDO at(std::size_t i, std::size_t j) const {
    if (auto it = entries_.find({i, j}); it != entries_.end()) return it->second;
    if (auto it = entries_.find({j, i}); it != entries_.end()) return -adjoint(it->second);
    return PsiDO::constant(ctx_, 0);
  }
  PsiDO at(const std::string& f, const std::string& g) const {
    return at(index(ctx_->id(f)), index(ctx_->id(g)));
  }

  /// Every entry explicit.
  BracketMatrix completed() const {
    BracketMatrix out(ctx_, fields_);
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) out.set(i, j, at(i, j));
    return out;
  }

  /// Pairs (i, j) whose explicit entries violate P_ji = -P_ij*.
  std::vector<std::pair<std::size_t, std::size_t>> skew_violations() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i; j < size(); ++j)
        if (has_explicit(i, j) && has_explicit(j, i) && at(j, i) != -adjoint(at(i, j))) out.push_back({i, j});
    return out;
  }

  /// One line per upper-triangle entry: {f,g} = <operator>.
  std::string to_text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i; j < size(); ++j)
        os << '{' << (*ctx_)[fields_[i]].name << ',' << (*ctx_)[fields_[j]].name << "} = " << to_string(at(i, j))
           << '\n';
    return os.str();
  }

  /// Inverse of to_text; fields are taken in order of first appearance.
  static BracketMatrix parse(const ContextPtr& ctx, const std::string& text) {
    std::vector<std::tuple<std::string, std::string, std::string, int, int>> rows;
    std::vector<GenId> fields;
    auto note = [&](const std::string& name, int line) {
      auto g = ctx->find(name);
      if (!g) throw ParseError("unknown field '" + name + "'", line, 1);
      if (std::find(fields.begin(), fields.end(), *g) == fields.end()) fields.push_back(*g);
    };
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto close = line.find('}');
      const auto comma = line.find(',');
      const auto eq = line.find('=', close == std::string::npos ? 0 : close);
      if (line[first] != '{' || close == std::string::npos || comma > close || eq == std::string::npos)
        throw ParseError("expected '{f,g} = <operator>'", lineno, static_cast<int>(first) + 1);
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string f = trim(line.substr(first + 1, comma - first - 1));
      const std::string g = trim(line.substr(comma + 1, close - comma - 1));
      note(f, lineno);
      note(g, lineno);
      rows.emplace_back(f, g, line.substr(eq + 1), lineno, static_cast<int>(eq) + 1);
    }
    BracketMatrix out(ctx, fields);
    for (const auto& [f, g, expr, ln, offset] : rows) {
      try {
        out.set(f, g, parse_operator(ctx, expr));
      } catch (const ParseError& e) {
        throw ParseError(e.message(), ln, offset + e.column());
      }
    }
    return out;
  }

 private:
  ContextPtr ctx_;
  std::vector<GenId> fields_;
  std::map<std::pair<std::size_t, std::size_t>, PsiDO> entries_;
};

/// New fields as expressions in the old table's fields.
struct CoordinateChange {
  std::vector<GenId> new_fields;
  std::vector<DiffExpr> definitions;  // in the old fields
};

/// P_new = Jac ∘ P_old ∘ Jac*, entries expressed in the old fields.
inline BracketMatrix transfer_bracket(const BracketMatrix& old, const CoordinateChange& change) {
  const auto& ctx = old.context();
  const std::size_t n = change.new_fields.size();
  std::vector<LocalOperatorRow> jac;
  for (const auto& d : change.definitions) jac.push_back(frechet(ctx, d, old.fields()));
  auto jac_at = [&](std::size_t a, std::size_t i) -> std::optional<PsiDO> {
    auto it = jac[a].find(old.fields()[i]);
    if (it == jac[a].end()) return std::nullopt;
    return it->second;
  };
  // Jac P_old, then times Jac* on the right.
  std::vector<std::vector<PsiDO>> left(n, std::vector<PsiDO>(old.size(), PsiDO::constant(ctx, 0)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < old.size(); ++i) {
      auto ja = jac_at(a, i);
      if (!ja) continue;
      for (std::size_t j = 0; j < old.size(); ++j) left[a][j] += *ja * old.at(i, j);
    }
  BracketMatrix out(ctx, change.new_fields);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      PsiDO e = PsiDO::constant(ctx, 0);
      for (std::size_t j = 0; j < old.size(); ++j) {
        auto jb = jac_at(b, j);
        if (jb) e += left[a][j] * adjoint(*jb);
      }
      out.set(a, b, e);
    }
  return out;
}

/// The table with each entry's coefficients rewritten by a substitution.
inline PsiDO substitute(const PsiDO& p, Substitution& sub) {
  const auto& ctx = p.context();
  PsiDO::DiffPart d;
  for (const auto& [k, c] : p.diff()) {
    DiffExpr s = sub(c);
    if (!s.is_zero()) d[k] = s;
  }
  std::vector<Dyad> ds;
  for (const auto& y : p.dyads()) ds.push_back({sub(y.left), sub(y.right)});
  return PsiDO::from_parts(ctx, std::move(d), std::move(ds));
}

inline BracketMatrix substitute(const BracketMatrix& t, const std::map<GenId, DiffExpr>& rules) {
  Substitution sub(*t.context(), rules);
  BracketMatrix out(t.context(), t.fields());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i; j < t.size(); ++j) out.set(i, j, substitute(t.at(i, j), sub));
  return out;
}

}  // namespace kpcalc
