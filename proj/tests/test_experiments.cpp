#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wetting/experiments.hpp"

using namespace wetting;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.sizes = {4, 6};
  c.replicas = 2;
  c.sweeps = 60;
  c.burn_in = 10;
  c.thin = 5;
  c.seed = 77;
  c.has_seed = true;
  c.stats.slab_exponent = 0;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"q": 25, "sizes": [16]})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"q": 25, "seed": 1, "sizes": [-1]})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("not json"), ConfigError);
  const ExperimentConfig c = tiny();
  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.sizes == c.sizes);
  CHECK(back.seed == 77);
  CHECK(back.replicas == 2);
  CHECK(back.m_of(16) == 16);
}

TEST_CASE("wetting report export") {
  const ExperimentConfig c = tiny();
  std::vector<SizeSummary> sizes;
  const Report r = run_wetting(c, &sizes);
  REQUIRE(sizes.size() == 2);
  CHECK(r.rows.size() == 4);
  CHECK(r.provenance.at("seed") == "77");

  const std::string js = report_json(r);
  std::string why;
  CHECK_MESSAGE(validate_report_json(js, &why), why);
  const Report back = report_from_json(js);
  CHECK(back.rows.size() == r.rows.size());
  CHECK(back.columns == r.columns);
  CHECK(report_json(back) == js);
  CHECK(!validate_report_json(R"({"experiment": "x"})"));

  const auto dir = std::filesystem::temp_directory_path() / "wetting_export_test";
  std::filesystem::remove_all(dir);
  const auto paths = export_report(r, dir.string(), "both");
  CHECK(paths.size() >= 2);
  std::istringstream csv(slurp((dir / "wetting.csv").string()));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) lines += !line.empty();
  CHECK(lines == 1 + c.replicas * static_cast<int>(c.sizes.size()));
  const auto j = nlohmann::json::parse(slurp((dir / "wetting.json").string()));
  CHECK(j["provenance"]["seed"] == "77");
  std::filesystem::remove_all(dir);
}

TEST_CASE("wetting runs are reproducible") {
  ExperimentConfig c = tiny();
  c.sizes = {4};
  c.replicas = 1;
  const Report a = run_wetting(c), b = run_wetting(c);
  REQUIRE(a.sample_rows.size() == b.sample_rows.size());
  CHECK(a.sample_rows == b.sample_rows);
}

TEST_CASE("Euler relation on K_{0,0}") {
  const EulerReport e = euler_check(DobrushinDomain(0, 0));
  CHECK(e.configs > 0);
  CHECK(e.constant_linked());
}

TEST_CASE("repulsiveness on K_{0,0}") {
  const RepulsivenessReport r = repulsiveness_check(DobrushinDomain(0, 0), params_from_q(25));
  CHECK(r.conditionings > 0);
  CHECK(r.max_deficit <= 1e-12);
  CHECK(r.max_tv_above <= 1e-12);
}

TEST_CASE("threshold corruption") {
  const CouplingThresholds th = CouplingThresholds::from(params_from_q(25));
  const CouplingThresholds t = corrupt_threshold(th, 2, 0.1);
  CHECK(t.one_over_c == doctest::Approx(th.one_over_c + 0.1));
  CHECK(t.clockwise == th.clockwise);
  CHECK_THROWS(corrupt_threshold(th, 5, 0.1));
}
