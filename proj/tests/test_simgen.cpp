#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "robprod/dataset.hpp"
#include "robprod/estimate.hpp"
#include "robprod/simgen.hpp"

using namespace robprod;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::pair<std::vector<double>, std::vector<double>> outlier_inputs(const SimPanel& s) {
  std::vector<double> l, k;
  for (const auto& r : s.data.records)
    if (s.outlier_ids.count(r.id())) {
      l.push_back(r.labour);
      k.push_back(r.capital);
    }
  return {l, k};
}

}  // namespace

TEST_CASE("raw variant has 100 x 7 clean rows") {
  SimConfig c;
  c.seed = 42;
  const auto s = generate(c, SimVariant::Raw);
  CHECK(s.data.size() == 700);
  CHECK(s.outlier_ids.empty());
  CHECK(s.data.scale == Scale::Log);
  std::map<std::string, int> per_farm;
  for (const auto& r : s.data.records) ++per_farm[r.farm_id];
  CHECK(per_farm.size() == 100);
  for (const auto& [f, n] : per_farm) CHECK(n == 7);
}

TEST_CASE("sample I adds 140 uncorrelated outlier rows") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SimConfig c;
    c.seed = seed;
    const auto s = generate(c, SimVariant::SampleOne);
    CHECK(s.data.size() == 840);
    CHECK(s.outlier_ids.size() == 140);
    const auto [l, k] = outlier_inputs(s);
    CHECK(std::abs(correlation(l, k)) < 0.1);
    CHECK(std::abs(correlation(l, k)) < 1e-12);
  }
}

TEST_CASE("sample II outlier inputs are near-perfect substitutes") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SimConfig c;
    c.seed = seed;
    const auto s = generate(c, SimVariant::SampleTwo);
    CHECK(s.data.size() == 840);
    CHECK(s.outlier_ids.size() == 140);
    const auto [l, k] = outlier_inputs(s);
    CHECK(correlation(l, k) <= -0.99);
  }
}

TEST_CASE("same seed gives a bit-identical panel, other seeds differ") {
  SimConfig c;
  c.seed = 5;
  const auto a = generate(c, SimVariant::SampleTwo);
  const auto b = generate(c, SimVariant::SampleTwo);
  REQUIRE(a.data.size() == b.data.size());
  bool same = true;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    for (Measure m : kAllMeasures) same = same && a.data.records[i].get(m) == b.data.records[i].get(m);
  CHECK(same);
  c.seed = 6;
  CHECK(generate(c, SimVariant::SampleTwo).data.records[0].output != a.data.records[0].output);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("clean block regression with farm dummies recovers the truth") {
  SimConfig c;
  c.seed = 2718;
  const auto s = generate(c, SimVariant::Raw);
  const std::size_t n = s.data.size();
  std::map<std::string, Eigen::Index> farm_col;
  for (const auto& r : s.data.records) farm_col.emplace(r.farm_id, 0);
  Eigen::Index col = 2;
  for (auto& [f, j] : farm_col) j = col++;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, col);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = s.data.records[i];
    x(i, 0) = r.labour;
    x(i, 1) = r.capital;
    x(i, farm_col[r.farm_id]) = 1.0;
    y(i) = r.output;
  }
  const Eigen::VectorXd b = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd e = y - x * b;
  const double s2 = e.squaredNorm() / static_cast<double>(n - col);
  const Eigen::MatrixXd cov = s2 * (x.transpose() * x).inverse();
  CHECK(std::abs(b(0) - 0.4) < 3.0 * std::sqrt(cov(0, 0)));
  CHECK(std::abs(b(1) - 0.6) < 3.0 * std::sqrt(cov(1, 1)));
}

TEST_CASE("outlier farm effects centre on -5") {
  SimConfig c;
  c.seed = 99;
  c.outlier_farms = 400;
  const auto s = generate(c, SimVariant::SampleOne);
  // farm mean of y - 0.01 l - 0.99 k estimates omega_i
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& r : s.data.records)
    if (s.outlier_ids.count(r.id())) {
      auto& a = acc[r.farm_id];
      a.first += r.output - c.outlier_labour * r.labour - c.outlier_capital * r.capital;
      a.second += 1;
    }
  double mean = 0.0;
  for (const auto& [f, a] : acc) mean += a.first / a.second;
  mean /= static_cast<double>(acc.size());
  // sd of the farm mean: sqrt(4 + 1/7), 400 farms
  CHECK(std::abs(mean + 5.0) < 3.0 * std::sqrt(4.0 + 1.0 / 7.0) / 20.0);
}

TEST_CASE("production panel shape and determinism") {
  ProductionPanelConfig c;
  c.seed = 3;
  c.farms = 50;
  c.periods = 6;
  const auto a = generate_production_panel(c);
  CHECK(a.data.size() == 300);
  CHECK(a.data.scale == Scale::Raw);
  CHECK(a.outlier_ids.empty());
  for (const auto& r : a.data.records)
    for (Measure m : kAllMeasures) CHECK(r.get(m) > 0.0);
  const auto b = generate_production_panel(c);
  CHECK(a.data.records.back().materials == b.data.records.back().materials);

  c.contamination = 0.1;
  const auto d = generate_production_panel(c);
  // each record is misreported independently: binomial(300, 0.1)
  CHECK(std::abs(static_cast<double>(d.outlier_ids.size()) - 30.0) < 3.0 * std::sqrt(27.0));
}

TEST_CASE("production panel is estimable and close to its coefficients") {
  ProductionPanelConfig c;
  c.seed = 8;
  const auto s = generate_production_panel(c);
  const auto r = fit(log_transform(s.data), ModelSpec{});
  CHECK(r.coefficient(Measure::Land) == doctest::Approx(c.land).epsilon(0.25));
  CHECK(r.coefficient(Measure::Labour) == doctest::Approx(c.labour).epsilon(0.25));
  CHECK(r.coefficient(Measure::Capital) == doctest::Approx(c.capital).epsilon(0.25));
  CHECK(r.coefficient(Measure::Materials) == doctest::Approx(c.materials).epsilon(0.25));
}
