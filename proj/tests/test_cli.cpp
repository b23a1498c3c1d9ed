#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pathatlas/errors.hpp"
#include "pathatlas/report.hpp"
#include "pathatlas/suites.hpp"

using namespace pathatlas;
namespace fs = std::filesystem;

TEST_CASE("config parsing applies defaults and rejects unknown suites") {
  const SuiteConfig c = SuiteConfig::from_json(Json::parse(R"({"suite":"bochner"})"));
  CHECK(c.suite == "bochner");
  CHECK(c.K == 6);
  CHECK(c.seed == 42);
  CHECK_THROWS_AS(SuiteConfig::from_json(Json::parse(R"({"suite":"nope"})")),
                  InvalidArgument);
  CHECK_THROWS_AS(SuiteConfig::from_json(Json::parse(R"({"M":1})")),
                  InvalidArgument);
}

TEST_CASE("config json round trip") {
  SuiteConfig c;
  c.suite = "mollifier";
  c.seed = 7;
  c.M = 500;
  const SuiteConfig d = SuiteConfig::from_json(c.to_json());
  CHECK(d.suite == c.suite);
  CHECK(d.seed == c.seed);
  CHECK(d.M == c.M);
  CHECK(c.canonical() == d.canonical());
}

TEST_CASE("suite runs are deterministic byte for byte") {
  SuiteConfig c;
  c.suite = "bochner";
  c.seed = 77;
  const std::string a = reports_to_string(run_suite(c));
  const std::string b = reports_to_string(run_suite(c));
  CHECK(a == b);
}

TEST_CASE("reports serialize with anchors and digest") {
  SuiteConfig c;
  c.suite = "bochner";
  const auto reports = run_suite(c);
  REQUIRE(!reports.empty());
  for (const auto& r : reports) {
    CHECK(!r.anchor.empty());
    CHECK(r.inputs_digest.size() == 16);
    const VerificationReport rt = report_from_json(r.to_json());
    CHECK(rt.check == r.check);
    CHECK(rt.passed == r.passed);
  }
  CHECK(all_passed(reports));
}

TEST_CASE("emit_report writes json and series csv") {
  SuiteConfig c;
  c.suite = "mollifier";
  c.M = 800;
  const auto reports = run_suite(c);
  const fs::path dir = fs::temp_directory_path() / "pathatlas_test_reports";
  fs::remove_all(dir);
  emit_report(reports, "both", dir.string());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "mollifier_second-order-convergence.csv"));
  std::ifstream f(dir / "report.json");
  Json j;
  f >> j;
  CHECK(j.at("total").get<int>() == static_cast<int>(reports.size()));
  CHECK(j.at("passed_all").get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("negative fixtures produce failing reports with witnesses") {
  SuiteConfig c;
  c.suite = "ift";
  c.fixture = "negative_ift";
  const auto reports = run_suite(c);
  CHECK_FALSE(all_passed(reports));
  bool witness_found = false;
  for (const auto& r : reports)
    if (!r.passed && !r.witnesses.empty()) witness_found = true;
  CHECK(witness_found);
}

TEST_CASE("explicit scale wire format round trips") {
  auto s = ScalePair::loop(3);
  const ScaleHandle back = scale_from_json(scale_to_json(*s));
  CHECK(same_scale(s, back));
  SuiteConfig c = SuiteConfig::from_json(Json::parse(
      R"({"suite":"sobolev","M":400,"scale":{"n_modes":2,"w1":[1.0,2.0],"w2":[1.0,4.0]}})"));
  REQUIRE(c.explicit_scale != nullptr);
  CHECK(c.explicit_scale->modes() == 2);
  const auto reports = run_suite(c);
  CHECK(all_passed(reports));
}

TEST_CASE("digest is stable") {
  CHECK(digest("abc") == digest("abc"));
  CHECK(digest("abc") != digest("abd"));
}
