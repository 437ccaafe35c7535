#include <catch_amalgamated.hpp>

#include "kpcalc/properties.hpp"

using namespace kpcalc;

TEST_CASE("algebra laws on random operators", "[properties]") {
  const PropertyConfig cfg;
  CHECK(cfg.cases == 200);
  CHECK(cfg.depth == 6);
  const auto rep = run_property_suite(cfg);
  REQUIRE(rep.checks.size() == 4);
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.detail << " " << c.residual);
    CHECK(c.status == Status::verified);
    CHECK(c.detail == "200 passed, 0 failed, 0 inconclusive");
  }
}

TEST_CASE("the suite is reproducible for a fixed seed", "[properties]") {
  const PropertyConfig cfg{20, 7, 6};
  const auto a = run_property_suite(cfg), b = run_property_suite(cfg);
  CHECK(a.title == b.title);
  for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].detail == b.checks[i].detail);
}
