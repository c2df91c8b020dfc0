#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "robprod/errors.hpp"
#include "robprod/mst.hpp"
#include "robprod/pmst.hpp"

using namespace robprod;

namespace {

// 8 points as two unit squares 1.5 apart, plus a tight 3-point cluster far away.
PointCloud two_clusters() {
  PointCloud c(2);
  const double pts[11][2] = {{0, 0},   {1, 0},   {0, 1},   {1, 1},    {2.5, 0}, {3.5, 0},
                             {2.5, 1}, {3.5, 1}, {25, 0},  {25.5, 0}, {25, 0.5}};
  for (int i = 0; i < 11; ++i) c.add("c" + std::to_string(i), pts[i]);
  return c;
}

PointCloud gaussian(std::mt19937_64& rng, std::size_t n, std::size_t p, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> g(mean, sd);
  PointCloud c(p);
  std::vector<double> x(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = g(rng);
    c.add("g" + std::to_string(i), x);
  }
  return c;
}

// Deletes edges one at a time and recomputes components from scratch.
std::vector<std::size_t> naive_core(const MstResult& mst, std::size_t n, std::size_t p) {
  const std::size_t bound = breakdown_bound(n, p);
  std::vector<Edge> order = mst.edges;
  std::sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) { return edge_less(b, a); });
  std::vector<Edge> alive = mst.edges;
  auto pairs = [](const std::vector<Edge>& es) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : es) out.emplace_back(e.u, e.v);
    return out;
  };
  for (const Edge& e : order) {
    std::vector<Edge> next;
    for (const auto& a : alive)
      if (!(a == e)) next.push_back(a);
    std::size_t largest = 0;
    for (const auto& comp : oracle::components(n, pairs(next))) largest = std::max(largest, comp.size());
    if (largest < bound) break;
    alive = std::move(next);
  }
  const auto comps = oracle::components(n, pairs(alive));
  std::vector<std::size_t> best;
  double best_w = 0.0;
  for (const auto& comp : comps) {
    const std::set<std::size_t> members(comp.begin(), comp.end());
    double w = 0.0;
    for (const auto& a : alive)
      if (members.count(a.u)) w += a.weight;
    const bool better = best.empty() || comp.size() > best.size() ||
                        (comp.size() == best.size() && (w < best_w || (w == best_w && comp.front() < best.front())));
    if (better) {
      best = comp;
      best_w = w;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("breakdown bound") {
  CHECK(breakdown_bound(10, 2) == 6);
  CHECK(breakdown_bound(11, 2) == 7);
  CHECK(breakdown_bound(840, 3) == 422);
}

TEST_CASE("bridge between two clusters is cut first and the big cluster is the core") {
  const auto c = two_clusters();
  const auto mst = build_mst(c);
  const auto core = prune_to_core(mst, c.size(), 2);
  CHECK(core.bound == 7);
  REQUIRE(core.trace.size() == 1);
  CHECK(core.trace[0].edge.u == 5);
  CHECK(core.trace[0].edge.v == 8);
  CHECK(core.trace[0].largest_component == 8);
  CHECK(core.core == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(core.core_edges.size() == 7);

  const auto stats = edge_stats(core.core_edges);
  CHECK(reweight(mst, c.size(), core.core, core.core_edges, 5.0) == core.core);
  CHECK(reweight(mst, c.size(), core.core, core.core_edges, 30.0).size() == 11);
  CHECK(stats.count == 7);
}

TEST_CASE("critical edge length") {
  CHECK(critical_length({1.0, 0.5, 100}, 0.95) == doctest::Approx(1.0 + std::sqrt(9999.0 / 400.0) * 0.5).epsilon(1e-14));
  CHECK(critical_length({1.0, 0.5, 100}, 0.95) == doctest::Approx(3.499875).epsilon(1e-9));
  CHECK(critical_length({2.5, 0.0, 50}, 0.9) == 2.5);
  CHECK_THROWS_AS(critical_length({1.0, 0.5, 20}, 0.95), NumericalError);
  CHECK_THROWS_AS(critical_length({1.0, 0.5, 10}, 0.95), NumericalError);
  CHECK_THROWS_AS(critical_length({1.0, 0.5, 1}, 0.5), NumericalError);
  CHECK_THROWS_AS(critical_length({1.0, 0.5, 50}, 1.0), std::invalid_argument);
  CHECK_FALSE(reweighting_admissible(20, 0.95));
  CHECK(reweighting_admissible(21, 0.95));
  CHECK(reweighting_admissible(3, 0.5));
  CHECK_FALSE(reweighting_admissible(2, 0.5));
}

TEST_CASE("edge stats use the m - 1 denominator") {
  const std::vector<Edge> es = {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}, {3, 4, 4.0}};
  const auto s = edge_stats(es);
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(s.count == 4);
}

TEST_CASE("reweight extremes") {
  std::mt19937_64 rng(1);
  const auto c = gaussian(rng, 120, 3);
  const auto mst = build_mst(c);
  const auto core = prune_to_core(mst, c.size(), 3);
  double max_w = 0.0;
  for (const auto& e : mst.edges) max_w = std::max(max_w, e.weight);
  CHECK(reweight(mst, c.size(), core.core, core.core_edges, max_w).size() == c.size());
  CHECK(reweight(mst, c.size(), core.core, core.core_edges, -1.0) == core.core);
}

TEST_CASE("core edges survive even above the critical length") {
  const auto c = two_clusters();
  const auto mst = build_mst(c);
  const auto core = prune_to_core(mst, c.size(), 2);
  CHECK(reweight(mst, c.size(), core.core, core.core_edges, 0.0) == core.core);
}

TEST_CASE("pruning matches naive component recomputation") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> grid(0, 3);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rep % 40;
    const std::size_t p = 1 + rep % 3;
    PointCloud c(p);
    if (rep % 2 == 0) {
      c = oracle::random_cloud(rng, n, p);
    } else {
      std::vector<double> x(p);
      for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x) v = grid(rng);
        c.add(std::to_string(i), x);
      }
    }
    if (n < p + 2) continue;
    const auto mst = build_mst(c);
    const auto core = prune_to_core(mst, n, p);
    CHECK(core.core == naive_core(mst, n, p));
    CHECK(core.core.size() >= breakdown_bound(n, p));
    for (std::size_t i = 1; i < core.trace.size(); ++i)
      CHECK_FALSE(edge_less(core.trace[i - 1].edge, core.trace[i].edge));
  }
}

TEST_CASE("whole procedure matches a naive re-implementation") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    const auto c = gaussian(rng, 200, 2);
    const auto mst = build_mst(c);
    const auto r = decontaminate(c, mst, PruneConfig{});
    const auto core = naive_core(mst, c.size(), 2);
    REQUIRE(r.core == core);

    std::set<std::size_t> members(core.begin(), core.end());
    std::vector<double> w;
    for (const auto& e : mst.edges)
      if (members.count(e.u) && members.count(e.v)) w.push_back(e.weight);
    long double mean = 0.0L, ss = 0.0L;
    for (double x : w) mean += x;
    mean /= w.size();
    for (double x : w) ss += (x - mean) * (x - mean);
    const long double sd = std::sqrt(ss / (w.size() - 1));
    const double crit = static_cast<double>(oracle::critical_length(mean, sd, w.size(), 0.95));
    REQUIRE(r.w_crit.has_value());
    CHECK(*r.w_crit == doctest::Approx(crit).epsilon(1e-12));

    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (const auto& e : mst.edges)
      if (e.weight <= crit || (members.count(e.u) && members.count(e.v))) kept.emplace_back(e.u, e.v);
    std::vector<std::size_t> expected;
    for (const auto& comp : oracle::components(c.size(), kept))
      if (std::binary_search(comp.begin(), comp.end(), core.front())) expected = comp;
    CHECK(r.non_outliers == expected);
  }
}

TEST_CASE("clean gaussian sample flags a small share") {
  double total = 0.0;
  const int seeds = 200;
  for (int seed = 1; seed <= seeds; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const auto r = decontaminate(gaussian(rng, 200, 2));
    CHECK(r.w_crit.has_value());
    total += static_cast<double>(r.outliers.size()) / 200.0;
  }
  // the Chebyshev rebuild flags about a tenth of a clean normal sample at n = 200
  CHECK(total / seeds < 0.125);
}

TEST_CASE("planted far cluster is flagged") {
  std::mt19937_64 rng(4);
  auto c = gaussian(rng, 150, 3);
  const auto far = gaussian(rng, 20, 3, 12.0, 0.5);
  for (std::size_t i = 0; i < far.size(); ++i) c.add("far" + std::to_string(i), far.point(i));
  const auto r = decontaminate(c);
  for (std::size_t i = 150; i < 170; ++i) CHECK(std::binary_search(r.outliers.begin(), r.outliers.end(), i));
}

TEST_CASE("minimal cloud n = p + 2 terminates") {
  PointCloud c(3, {0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 4, 9, 9, 9}, {"a", "b", "c", "d", "e"});
  const auto r = decontaminate(c);
  CHECK(r.bound == 4);
  CHECK(r.core.size() >= 4);
  CHECK(r.reweight_error.has_value());
  CHECK(r.non_outliers == r.core);
  CHECK_FALSE(r.w_crit.has_value());
}

TEST_CASE("too small a cloud is a data error") {
  PointCloud c(3, {0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3}, {"a", "b", "c", "d"});
  CHECK_THROWS_AS(decontaminate(c), DataError);
}

TEST_CASE("partition and diagnostics are consistent") {
  std::mt19937_64 rng(8);
  const auto c = gaussian(rng, 300, 4);
  const auto r = decontaminate(c);
  CHECK(r.non_outliers.size() + r.outliers.size() == 300);
  CHECK(std::includes(r.non_outliers.begin(), r.non_outliers.end(), r.core.begin(), r.core.end()));
  CHECK(r.core_edge_stats.count == r.core.size() - 1);
  CHECK(r.non_outlier_ids.size() == r.non_outliers.size());
  CHECK(r.outlier_ids.size() == r.outliers.size());
  for (std::size_t i = 0; i < r.outliers.size(); ++i) CHECK(r.outlier_ids[i] == c.id(r.outliers[i]));
}

TEST_CASE("smaller alpha never keeps more points") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    auto c = gaussian(rng, 150, 2);
    const auto tail = gaussian(rng, 30, 2, 4.0, 2.0);
    for (std::size_t i = 0; i < tail.size(); ++i) c.add("t" + std::to_string(i), tail.point(i));
    std::vector<std::size_t> prev;
    double prev_w = -1.0;
    for (double alpha : {0.5, 0.7, 0.9, 0.95}) {
      const auto r = decontaminate(c, {alpha, false});
      REQUIRE(r.w_crit.has_value());
      CHECK(*r.w_crit >= prev_w);
      CHECK(std::includes(r.non_outliers.begin(), r.non_outliers.end(), prev.begin(), prev.end()));
      prev = r.non_outliers;
      prev_w = *r.w_crit;
    }
  }
}

TEST_CASE("isometries leave the partition unchanged") {
  std::mt19937_64 rng(13);
  auto c = gaussian(rng, 200, 2);
  const auto tail = gaussian(rng, 25, 2, 5.0, 1.5);
  for (std::size_t i = 0; i < tail.size(); ++i) c.add("t" + std::to_string(i), tail.point(i));
  const auto base = decontaminate(c);

  // coordinate swap plus reflection is exact in floating point
  PointCloud flipped(2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x[2] = {-c.at(i, 1), c.at(i, 0)};
    flipped.add(c.id(i), x);
  }
  const auto r1 = decontaminate(flipped);
  CHECK(r1.non_outlier_ids == base.non_outlier_ids);

  const double th = 0.7;
  PointCloud rotated(2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x[2] = {std::cos(th) * c.at(i, 0) - std::sin(th) * c.at(i, 1) + 3.0,
                         std::sin(th) * c.at(i, 0) + std::cos(th) * c.at(i, 1) - 1.0};
    rotated.add(c.id(i), x);
  }
  const auto r2 = decontaminate(rotated);
  CHECK(r2.non_outlier_ids == base.non_outlier_ids);
}

TEST_CASE("rerun on the non-outliers keeps a majority core") {
  std::mt19937_64 rng(17);
  auto c = gaussian(rng, 250, 3);
  const auto tail = gaussian(rng, 50, 3, 6.0, 1.0);
  for (std::size_t i = 0; i < tail.size(); ++i) c.add("t" + std::to_string(i), tail.point(i));
  const auto r = decontaminate(c);
  const auto sub = c.subset(r.non_outliers);
  const auto again = decontaminate(sub);
  CHECK(again.core.size() >= breakdown_bound(sub.size(), 3));
  CHECK(again.non_outliers.size() > sub.size() / 2);
}

TEST_CASE("standardisation makes the partition scale-free") {
  std::mt19937_64 rng(19);
  const auto c = gaussian(rng, 150, 3);
  PointCloud scaled(3);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x[3] = {c.at(i, 0) * 1000.0, c.at(i, 1), c.at(i, 2) * 0.01};
    scaled.add(c.id(i), x);
  }
  const auto z = standardize_columns(scaled);
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) mean += z.at(i, 0);
  mean /= static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) sq += (z.at(i, 0) - mean) * (z.at(i, 0) - mean);
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(sq / (z.size() - 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(decontaminate(scaled, {0.95, true}).non_outlier_ids == decontaminate(c, {0.95, true}).non_outlier_ids);
}
