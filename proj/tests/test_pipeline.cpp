#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "robprod/pipeline.hpp"
#include "robprod/report.hpp"
#include "robprod/simgen.hpp"

using namespace robprod;

namespace {

PipelineConfig simulation_config() {
  PipelineConfig pc;
  pc.cloud_dims = {Measure::Output, Measure::Labour, Measure::Capital};
  pc.model.estimator = Estimator::Within;
  pc.model.regressors = {Measure::Labour, Measure::Capital};
  return pc;
}

SimPanel sample_one(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  return generate(c, SimVariant::SampleOne);
}

}  // namespace

TEST_CASE("four samples in report order") {
  const auto s = sample_one(1);
  const auto r = run_pipeline(s.data, simulation_config());
  REQUIRE(r.schemes.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.schemes[i].name == kSchemes[i]);
  CHECK(r.schemes[0].kept_records == 840);
  CHECK(r.schemes[0].sample.size() == 840);
  CHECK(r.schemes[1].kept_records == r.trim.kept_ids.size());
  CHECK(r.schemes[2].kept_records == r.decontamination.non_outliers.size());
  CHECK(r.schemes[3].kept_records == 840 - r.classification.small - r.classification.large);
  for (const auto& sc : r.schemes) {
    CHECK(sc.estimate.has_value());
    CHECK_FALSE(sc.error.has_value());
    CHECK(sc.sample.size() <= sc.kept_records);
    CHECK(sc.estimate->n_obs == sc.sample.size());
  }
  CHECK(r.classification.ids == r.decontamination.outlier_ids);
}

TEST_CASE("small-large keeps the neither outliers") {
  const auto s = sample_one(2);
  auto pc = simulation_config();
  pc.min_run = 1;
  const auto r = run_pipeline(s.data, pc);
  std::unordered_set<std::string> kept;
  for (const auto& rec : r.schemes[3].sample.records) kept.insert(rec.id());
  for (std::size_t i = 0; i < r.classification.ids.size(); ++i)
    CHECK(kept.count(r.classification.ids[i]) == (r.classification.labels[i] == OutlierLabel::Neither));
}

TEST_CASE("raw input is log-transformed before the cloud is built") {
  ProductionPanelConfig c;
  c.seed = 5;
  c.farms = 60;
  c.contamination = 0.05;
  const auto s = generate_production_panel(c);
  const auto r = run_pipeline(s.data, PipelineConfig{});
  CHECK(r.log_data.scale == Scale::Log);
  CHECK(r.cloud.dim() == 5);
  CHECK(r.cloud.at(0, 0) == doctest::Approx(std::log(s.data.records[0].output)));
  for (const auto& sc : r.schemes) CHECK(sc.estimate.has_value());
}

TEST_CASE("estimation failures are recorded per sample") {
  const auto s = sample_one(3);
  auto pc = simulation_config();
  pc.model.estimator = Estimator::Wlp;  // the two-input simulation has no materials
  const auto r = run_pipeline(s.data, pc);
  for (const auto& sc : r.schemes) {
    CHECK_FALSE(sc.estimate.has_value());
    CHECK(sc.error.has_value());
  }
}

TEST_CASE("reports are deterministic and complete") {
  const auto s = sample_one(4);
  const auto pc = simulation_config();
  const auto a = dump(pipeline_report(run_pipeline(s.data, pc), pc));
  const auto b = dump(pipeline_report(run_pipeline(s.data, pc), pc));
  CHECK(a == b);
  const auto j = Json::parse(a);
  CHECK(j.contains("provenance"));
  CHECK(j["schemes"].size() == 4);
  for (const auto& name : kSchemes) CHECK(j["schemes"].contains(name));
  CHECK(j["schemes"]["no-out"]["estimate"]["N"].get<std::size_t>() == 840);
  CHECK(j["schemes"]["full-out"]["estimate"]["N"].get<std::size_t>() > 0);
  CHECK(j["counts"]["records"].get<std::size_t>() == 840);

  std::ostringstream table, csv;
  const auto r = run_pipeline(s.data, pc);
  write_pipeline_table(table, r);
  write_pipeline_csv(csv, r);
  for (const auto& name : kSchemes) CHECK(table.str().find(name) != std::string::npos);
  CHECK(csv.str().rfind("scheme,term,coef,se\n", 0) == 0);
}

TEST_CASE("cloud files round-trip") {
  PointCloud c(2, {0.1, 1.0 / 3.0, -2.5, 1e-300}, {"a:1", "b:2"});
  std::ostringstream out;
  write_cloud(out, c, {"output", "capital"});
  std::istringstream in(out.str());
  const auto back = read_cloud(in);
  CHECK(back.dim_names == std::vector<std::string>{"output", "capital"});
  CHECK(back.cloud.ids() == c.ids());
  CHECK(back.cloud.coords() == c.coords());
}
