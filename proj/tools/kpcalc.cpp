// kpcalc: verify bracket tables, compute flows, factorizations and Virasoro brackets.
// Exit codes: 0 success, 1 mathematical mismatch, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kpcalc/driver.hpp"

using namespace kpcalc;

namespace {

constexpr int exit_mismatch = 1;
constexpr int exit_usage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LaxFamily family_of(const std::string& kind, int N, int M) {
  if (N < 1 || M < 0) throw ConfigError("need N >= 1 and M >= 0");
  try {
    if (kind == "standard") return lax_standard(N, M);
    if (kind == "nonstandard") return lax_nonstandard(N, M);
    if (kind == "shifted") return lax_shifted(N, M);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown family '" + kind + "' (standard, nonstandard, shifted)");
}

int run_verify(const VerifyConfig& cfg, bool list) {
  if (list) {
    for (const auto& c : named_checks()) std::cout << c.name << "  " << c.summary << "\n";
    return 0;
  }
  const RunResult run = run_verification(cfg);
  std::cout << render(run, cfg);
  return run.exit_code;
}

int run_flow(const std::string& kind, int N, int M, int k, Format format) {
  const LaxFamily fam = family_of(kind, N, M);
  if (k < 0) throw ConfigError("k must be nonnegative");
  const FlowResult f = flow(fam, k);
  const Context& ctx = *fam.ctx;
  if (format == Format::structured) {
    nlohmann::ordered_json j;
    j["family"] = fam.name;
    j["k"] = k;
    j["rates"] = nlohmann::ordered_json::object();
    for (GenId g : f.fields) j["rates"][ctx[g].name] = to_string(f.at(g), ctx);
    std::cout << j.dump(2) << "\n";
  } else if (format == Format::latex) {
    std::cout << "\\begin{align*}\n";
    for (GenId g : f.fields)
      std::cout << "\\partial_{t_{" << k << "}} " << latex_name(ctx[g].name) << " &= " << to_latex(f.at(g), ctx)
                << " \\\\\n";
    std::cout << "\\end{align*}\n";
  } else {
    std::cout << f.to_text(ctx);
  }
  return 0;
}

/// Target table for the transferred constant bracket, when one is known.
std::optional<BracketMatrix> miura_target(int n, int m, bool prefix, const std::string& bracket) {
  if (n == 3 && m == 1 && !prefix) {
    if (bracket == "combined") return tables::omega_table();
    if (bracket == "second") return tables::gd2_table();
    if (bracket == "third") return tables::gd3_table();
  }
  if (n == 3 && m == 1 && prefix && bracket == "combined") return tables::nonstandard_table();
  if (n == 4 && m == 2 && !prefix && bracket == "combined") return tables::shifted_table_22();
  return std::nullopt;
}

tables::ConstantPoissonMatrix constant_bracket(const std::string& name, int n, int m) {
  if (name == "combined") return tables::combined_modified(n, m);
  if (name == "second") return tables::second_modified(n, m);
  if (name == "third") return tables::third_modified(n, m);
  throw ConfigError("unknown constant bracket '" + name + "' (combined, second, third)");
}

int run_miura(int n, int m, bool prefix, const std::string& bracket, bool diag, const VerifyConfig& cfg) {
  MiuraSpec spec;
  try {
    spec = expand_factorization(n, m, prefix);
  } catch (const FactorizationError& e) {
    throw ConfigError(e.what());
  }
  const Context& ctx = *spec.target.ctx;
  int code = 0;
  RunResult run;
  std::optional<BracketMatrix> transferred;
  std::optional<Congruence> cong;
  if (!bracket.empty()) {
    const auto c = constant_bracket(bracket, n, m);
    ReportDepth guard(cfg.depth);
    if (auto target = miura_target(n, m, prefix, bracket)) {
      run.reports.push_back(kw_transfer(c, spec, *target));
      for (const auto& ch : run.reports.back().checks)
        if (!passes(ch, cfg.strict)) code = exit_mismatch;
      run.exit_code = code;
    } else {
      transferred = miura_transfer(c, spec);
    }
    if (diag) cong = diagonalize(c.M);
  } else if (diag) {
    cong = diagonalize(tables::combined_modified(n, m).M);
  }

  if (cfg.format == Format::structured) {
    nlohmann::ordered_json j;
    j["target"] = spec.target.name;
    j["substitutions"] = nlohmann::ordered_json::object();
    for (GenId g : spec.target.fields) j["substitutions"][ctx[g].name] = to_string(spec.substitutions.at(g), ctx);
    if (!run.reports.empty()) j["comparison"] = nlohmann::ordered_json::parse(to_structured(run));
    if (transferred) j["transferred"] = transferred->to_text();
    if (cong) {
      j["congruence"]["T"] = to_text(cong->T);
      j["congruence"]["D"] = to_text(cong->D);
      j["congruence"]["signature"] = {cong->positive, cong->negative, cong->zero};
    }
    std::cout << j.dump(2) << "\n";
  } else if (cfg.format == Format::latex) {
    std::cout << "\\begin{align*}\n";
    for (GenId g : spec.target.fields)
      std::cout << latex_name(ctx[g].name) << " &= " << to_latex(spec.substitutions.at(g), ctx) << " \\\\\n";
    std::cout << "\\end{align*}\n";
    if (!run.reports.empty()) std::cout << to_latex(run);
    if (transferred) std::cout << to_latex(*transferred);
  } else {
    std::cout << "target " << spec.target.name << "\n" << spec.to_text();
    if (!run.reports.empty()) std::cout << to_text(run);
    if (transferred) std::cout << transferred->to_text();
    if (cong) {
      std::cout << "T =\n" << to_text(cong->T) << "D =\n" << to_text(cong->D) << "signature (" << cong->positive << ", "
                << cong->negative << ", " << cong->zero << ")\n";
    }
  }
  return code;
}

int run_conformal(const std::string& name, const std::string& field, const VerifyConfig& cfg) {
  const ConformalContext c = [&] {
    try {
      return conformal_context(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  ReportDepth guard(cfg.depth);
  if (field.empty()) {
    RunResult run;
    run.reports.push_back(c.verify());
    for (const auto& ch : run.reports.back().checks)
      if (!passes(ch, cfg.strict)) run.exit_code = exit_mismatch;
    std::cout << render(run, cfg);
    return run.exit_code;
  }
  const auto& ctx = c.table.context();
  const CompositeField f = field == c.t.name ? c.t : CompositeField{field, parse_function(ctx, field)};
  const PsiDO b = composite_bracket(f, c.t, c.table);
  std::string verdict, anomaly, decomposed;
  if (field == c.t.name) {
    const PsiDO rest = b - virasoro_form(ctx, c.t.definition, 0);
    if (rest.is_zero()) verdict = "Virasoro, no central term";
    else if (rest == PsiDO::function(ctx, rest.coeff(3)) * PsiDO::del(ctx, 3) && rest.coeff(3).is_constant())
      verdict = "Virasoro, central term " + to_string(rest);
    else verdict = "not of Virasoro form";
  } else if (auto d = decompose_spin(b, f.definition)) {
    verdict = "spin " + to_string(d->s);
    if (d->anomaly) {
      verdict = "not a spin field: spin " + to_string(d->s) + " part plus an anomaly";
      anomaly = d->anomaly->to_text(f.name);
      decomposed = d->to_text(f.name);
    }
  } else {
    verdict = "not a spin field";
  }
  const std::string lhs = "{" + f.name + "," + c.t.name + "}";
  if (cfg.format == Format::structured) {
    nlohmann::ordered_json j;
    j["context"] = c.name;
    j["generator"] = to_string(c.t.definition, *ctx);
    j["bracket"] = lhs;
    j["value"] = to_string(b);
    j["verdict"] = verdict;
    if (!anomaly.empty()) {
      j["decomposed"] = decomposed;
      j["anomaly"] = anomaly;
    }
    std::cout << j.dump(2) << "\n";
  } else if (cfg.format == Format::latex) {
    std::cout << "\\{" << latex_name(f.name) << "," << c.t.name << "\\} = " << to_latex(b) << "\n";
  } else {
    std::cout << "t = " << to_string(c.t.definition, *ctx) << "\n" << lhs << " = " << to_string(b) << "\n";
    if (!decomposed.empty()) std::cout << std::string(lhs.size(), ' ') << " = " << decomposed << "\n";
    std::cout << verdict << "\n";
    if (!anomaly.empty()) std::cout << "anomaly: " << anomaly << "\n";
  }
  return 0;
}

int run_parse(const std::string& src, const std::string& table_file, Format format) {
  const auto ctx = standard_context();
  if (!table_file.empty()) {
    const BracketMatrix t = BracketMatrix::parse(ctx, read_file(table_file));
    if (format == Format::latex) std::cout << to_latex(t);
    else if (format == Format::structured) {
      nlohmann::ordered_json j;
      j["fields"] = nlohmann::ordered_json::array();
      for (GenId g : t.fields()) j["fields"].push_back((*ctx)[g].name);
      j["skew_violations"] = t.completed().skew_violations().size();
      j["text"] = t.to_text();
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << t.to_text();
    }
    return 0;
  }
  const ParsedValue v = parse_expression(ctx, src);
  const bool is_fn = std::holds_alternative<DiffExpr>(v);
  if (format == Format::latex) {
    std::cout << (is_fn ? to_latex(std::get<DiffExpr>(v), *ctx) : to_latex(std::get<PsiDO>(v))) << "\n";
  } else if (format == Format::structured) {
    nlohmann::ordered_json j;
    j["kind"] = is_fn ? "function" : "operator";
    j["normal_form"] = to_string(v, *ctx);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(v, *ctx) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-differential bracket calculator"};
  app.require_subcommand(1);

  VerifyConfig cfg;
  std::string format = "text";
  std::string depth;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "text, structured or latex");
    sub->add_option("--depth", depth, "tail expansion depth (default $" + std::string(depth_variable) + " or 8)");
  };

  auto* verify = app.add_subcommand("verify", "run verification checks");
  bool all = false, list = false;
  verify->add_option("--table", cfg.checks, "check to run (repeatable); see --list");
  verify->add_flag("--all", all, "run every check");
  verify->add_flag("--list", list, "list the checks");
  verify->add_option("--flow-bound", cfg.flow_bound, "largest k for the flow checks");
  verify->add_flag("--strict", cfg.strict, "count skipped checks as failures");
  verify->add_flag("--timings", cfg.timings, "include wall times");
  add_common(verify);

  auto* flow_cmd = app.add_subcommand("flow", "compute the k-th flow of a Lax family");
  std::string kind = "standard";
  int N = 1, M = 2, k = 2;
  flow_cmd->add_option("--family", kind, "standard, nonstandard or shifted");
  flow_cmd->add_option("--N", N, "differential order parameter");
  flow_cmd->add_option("--M", M, "number of dyads");
  flow_cmd->add_option("-k,--k", k, "flow index");
  flow_cmd->add_option("--format", format, "text, structured or latex");

  auto* miura_cmd = app.add_subcommand("miura", "factorization into linear factors");
  int n = 3, m = 1;
  bool prefix = false, diag = false;
  std::string bracket;
  miura_cmd->add_option("--n", n, "number of factors (d - a_i)");
  miura_cmd->add_option("--m", m, "number of factors (d - b_j)^-1");
  miura_cmd->add_flag("--prefix", prefix, "prepend the inverse derivative");
  miura_cmd->add_option("--bracket", bracket, "transfer a constant bracket: combined, second or third");
  miura_cmd->add_flag("--diagonalize", diag, "congruence-diagonalize the constant bracket");
  add_common(miura_cmd);

  auto* conf_cmd = app.add_subcommand("conformal", "Virasoro generator brackets");
  std::string context = "standard", field;
  conf_cmd->add_option("--context", context, "standard, nonstandard or shifted");
  conf_cmd->add_option("--field", field, "field or expression f; prints {f,t} and its spin");
  add_common(conf_cmd);

  auto* parse_cmd = app.add_subcommand("parse", "parse and normalize an expression or a bracket table");
  std::string src, table_file;
  parse_cmd->add_option("expression", src, "function or operator");
  parse_cmd->add_option("--table", table_file, "bracket table file");
  parse_cmd->add_option("--format", format, "text, structured or latex");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    cfg.format = parse_format(format);
    cfg.depth = depth.empty() ? default_depth() : parse_depth(depth);
    if (*verify) {
      if (all && !cfg.checks.empty()) throw ConfigError("--all and --table are exclusive");
      return run_verify(cfg, list);
    }
    if (*flow_cmd) return run_flow(kind, N, M, k, cfg.format);
    if (*miura_cmd) return run_miura(n, m, prefix, bracket, diag, cfg);
    if (*conf_cmd) return run_conformal(context, field, cfg);
    if (*parse_cmd) {
      if (src.empty() == table_file.empty()) throw ConfigError("give an expression or --table, not both");
      return run_parse(src, table_file, cfg.format);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_usage;
  } catch (const DecompositionError& e) {
    std::cerr << "mismatch: " << e.what() << "\n";
    return exit_mismatch;
  }
  return exit_usage;
}
