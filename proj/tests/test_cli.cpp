#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "kpcalc/driver.hpp"

using namespace kpcalc;

namespace {

struct Output {
  int code;
  std::string out;
};

Output run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " KPCALC_CLI " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("verify a single table", "[cli]") {
  const auto r = run("verify --table nonstandard");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "21 checks: 21 verified, 0 mismatch, 0 inconclusive, 0 skipped"));
  CHECK(contains(r.out, "[verified] {q,r}"));
}

TEST_CASE("a mathematical mismatch exits with 1", "[cli]") {
  const auto r = run("verify --table comparison");
  CHECK(r.code == 1);
  CHECK(contains(r.out, "[mismatch] {u1,u1}"));
  CHECK(contains(r.out, "residual: as above"));
}

TEST_CASE("usage and configuration errors exit with 2", "[cli]") {
  CHECK(run("").code == 2);
  CHECK(run("verify --table bogus").code == 2);
  CHECK(run("verify --table eigen --format yaml").code == 2);
  CHECK(run("verify --table eigen --depth 0").code == 2);
  CHECK(run("verify --table eigen --all").code == 2);
  CHECK(run("verify --table eigen", "KPCALC_DEPTH=abc").code == 2);
  CHECK(run("parse 'del + zz'").code == 2);
  CHECK(run("parse").code == 2);
  CHECK(run("miura --n 1 --m 0").code == 2);
  CHECK(run("miura --bracket fourth").code == 2);
  CHECK(run("flow --family other").code == 2);
  CHECK(run("conformal --context other").code == 2);
  CHECK(run("nosuch").code == 2);
}

TEST_CASE("depth comes from the environment", "[cli]") {
  CHECK(run("verify --table eigen", "KPCALC_DEPTH=3").code == 0);
  ::setenv(depth_variable, "5", 1);
  CHECK(default_depth() == 5);
  ::unsetenv(depth_variable);
  CHECK(default_depth() == 8);
  CHECK(parse_depth("12") == 12);
  CHECK_THROWS_AS(parse_depth("4x"), ConfigError);
  CHECK_THROWS_AS(parse_depth("-1"), ConfigError);
}

TEST_CASE("structured output is deterministic", "[cli]") {
  const auto a = run("verify --table shifted --table nonstandard --format structured");
  const auto b = run("verify --table nonstandard --table shifted --format structured");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["exit"] == 0);
  CHECK(j["reports"][0]["title"] == "K(1,2) NS");
  CHECK(j["reports"][0]["checks"][1]["name"] == "{v1,v1}");
  CHECK(j["reports"][0]["checks"][1]["anchor"] == "K(1,2) NS");
  CHECK_FALSE(j["reports"][0].contains("seconds"));
  CHECK(nlohmann::json::parse(run("verify --table eigen --format structured --timings").out)["reports"][0].contains("seconds"));
}

TEST_CASE("latex output", "[cli]") {
  const auto r = run("verify --table eigen --format latex");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\\begin{tabular}"));
  CHECK(contains(run("parse 'del + dinv(phi1, psi1)' --format latex").out, "\\partial + \\phi_{1} \\partial^{-1} \\psi_{1}"));
  CHECK(contains(run("flow --family nonstandard --k 1 --format latex").out, "\\partial_{t_{1}} v_{1} &= v_{1}'"));
}

TEST_CASE("parse prints normal forms that parse back", "[cli][serialization]") {
  CHECK(run("parse \"u1''\"").out == "u1''\n");
  CHECK(run("parse 'E(b1)*E(-b1)'").out == "1\n");
  for (const char* e : {"del + dinv(q, r)", "(del - a1)*(del - a2)*inv(del - b1)", "dinv(1, q)*del^2",
                        "J(q^2)*r + 1/2*v1'"}) {
    const auto once = run("parse " + quote(e));
    REQUIRE(once.code == 0);
    std::string printed = once.out;
    printed.pop_back();
    CHECK(run("parse " + quote(printed)).out == once.out);
  }
  const auto s = nlohmann::json::parse(run("parse 'del^2 + u2' --format structured").out);
  CHECK(s["kind"] == "operator");
  CHECK(s["normal_form"] == "del^2 + u2");
}

TEST_CASE("bracket table files round trip", "[cli][serialization]") {
  const std::string path = "kpcalc_table_roundtrip.txt";
  for (const auto& t : {tables::nonstandard_table(), tables::omega_table(), tables::shifted_table_22()}) {
    std::ofstream(path) << t.to_text();
    const auto r = run("parse --table " + path);
    CHECK(r.code == 0);
    CHECK(r.out == t.to_text());
  }
  std::ofstream(path) << "{q,q} = del\n{q r} = 1\n";
  CHECK(run("parse --table " + path).code == 2);
  std::remove(path.c_str());
  CHECK(run("parse --table no_such_file.txt").code == 2);
}

TEST_CASE("flow command", "[cli]") {
  const auto r = run("flow --family nonstandard --N 1 --M 2 --k 2");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "q: q'' + 2*v1*q'\n"));
  const auto j = nlohmann::json::parse(run("flow --family standard --k 1 --format structured").out);
  CHECK(j["rates"]["phi1"] == "phi1'");
}

TEST_CASE("miura command", "[cli]") {
  const auto r = run("miura --n 3 --m 1 --bracket combined --diagonalize");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "u1 = -a1 - a2 - a3 + b1"));
  CHECK(contains(r.out, "psi = E(-b1)"));
  CHECK(contains(r.out, "signature ("));
  const auto j = nlohmann::json::parse(run("miura --n 3 --m 1 --format structured").out);
  CHECK(j["substitutions"]["psi"] == "E(-b1)");
  CHECK(contains(run("miura --n 2 --m 0 --bracket second").out, "{u2,u2}"));
}

TEST_CASE("conformal command", "[cli]") {
  const auto q = run("conformal --context nonstandard --field q");
  CHECK(q.code == 0);
  CHECK(contains(q.out, "= 1/2*q*del + q' - 1/2*dinv(1, q)*del^2"));
  CHECK(contains(q.out, "anomaly: -1/2*dinv(1, q)*del^2"));
  CHECK(contains(run("conformal --context nonstandard --field \"q'\"").out, "spin 3/2"));
  CHECK(contains(run("conformal --context nonstandard --field t").out, "central term 1/2*del^3"));
  CHECK(contains(run("conformal --context standard --field t").out, "no central term"));
  CHECK(run("conformal --context shifted").code == 0);
}

TEST_CASE("driver configuration", "[cli]") {
  VerifyConfig cfg;
  cfg.checks = {"eigen"};
  const auto r = run_verification(cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.reports.size() == 1);
  cfg.checks = {"nope"};
  CHECK_THROWS_AS(run_verification(cfg), ConfigError);
  cfg.checks = {"flows"};
  cfg.flow_bound = 0;
  CHECK_THROWS_AS(run_verification(cfg), ConfigError);
  CHECK(parse_format("latex") == Format::latex);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);

  // Skipped checks fail only in strict mode; inconclusive ones add the depth hint.
  RunResult fake;
  fake.reports.push_back(VerificationReport{"t", {CheckResult{"a", "", Status::skipped, "", ""}}, 0});
  CHECK(passes(fake.reports[0].checks[0], false));
  CHECK_FALSE(passes(fake.reports[0].checks[0], true));
  fake.reports[0].checks.push_back(CheckResult{"b", "", Status::inconclusive, "", ""});
  fake.inconclusive = true;
  CHECK(contains(to_text(fake), "--depth"));
  cfg.checks = {"flows"};
  cfg.flow_bound = 2;
  cfg.strict = true;
  CHECK(run_verification(cfg).exit_code == 1);
}
