#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "robprod/errors.hpp"
#include "robprod/mst.hpp"
#include "robprod/union_find.hpp"

using namespace robprod;

TEST_CASE("collinear points") {
  PointCloud c(2, {0, 0, 1, 0, 3, 0}, {"a", "b", "c"});
  const auto t = build_mst(c);
  REQUIRE(t.edges.size() == 2);
  CHECK(t.edges[0] == Edge{0, 1, 1.0});
  CHECK(t.edges[1] == Edge{1, 2, 2.0});
  CHECK(t.total_weight == 3.0);
}

TEST_CASE("identical points are joined by a zero edge") {
  PointCloud c(3, {1, 2, 3, 1, 2, 3}, {"a", "b"});
  const auto t = build_mst(c);
  REQUIRE(t.edges.size() == 1);
  CHECK(t.edges[0].weight == 0.0);
}

TEST_CASE("degenerate sizes") {
  CHECK(build_mst(PointCloud(2)).edges.empty());
  PointCloud one(2, {5, 5}, {"x"});
  CHECK(build_mst(one).edges.empty());
  CHECK(build_mst(one).total_weight == 0.0);
}

TEST_CASE("non-finite coordinates are rejected") {
  PointCloud c(2, {0, 0, std::numeric_limits<double>::quiet_NaN(), 1}, {"a", "b"});
  CHECK_THROWS_AS(build_mst(c), DataError);
}

TEST_CASE("seven random unit-square points match Cayley enumeration") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const auto c = oracle::random_cloud(rng, 7, 2);
    CHECK(build_mst(c).total_weight == oracle::brute_force_mst_weight(c));
  }
}

TEST_CASE("tree is spanning, acyclic and sorted") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 5u, 40u, 300u}) {
    const auto c = oracle::random_cloud(rng, n, 4, -3, 3);
    const auto t = build_mst(c);
    REQUIRE(t.edges.size() == n - 1);
    UnionFind uf(n);
    double total = 0.0;
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
      const auto& e = t.edges[i];
      CHECK(e.u < e.v);
      CHECK(uf.find(e.u) != uf.find(e.v));
      uf.unite(e.u, e.v);
      CHECK(e.weight == euclidean_distance(c.point(e.u), c.point(e.v)));
      if (i > 0) CHECK((t.edges[i - 1].u < e.u || (t.edges[i - 1].u == e.u && t.edges[i - 1].v < e.v)));
      total += e.weight;
    }
    CHECK(uf.component_size(0) == n);
    CHECK(total == t.total_weight);
  }
}

TEST_CASE("cut property on every tree edge") {
  std::mt19937_64 rng(3);
  const auto c = oracle::random_cloud(rng, 60, 3);
  const auto t = build_mst(c);
  for (std::size_t skip = 0; skip < t.edges.size(); ++skip) {
    UnionFind uf(c.size());
    for (std::size_t i = 0; i < t.edges.size(); ++i)
      if (i != skip) uf.unite(t.edges[i].u, t.edges[i].v);
    double lightest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        if (uf.find(a) != uf.find(b)) lightest = std::min(lightest, oracle::distance(c, a, b));
    CHECK(t.edges[skip].weight == lightest);
  }
}

TEST_CASE("equal weights are resolved by index order") {
  // unit square: four edges of length 1, Prim must keep the three smallest pairs
  PointCloud c(2, {0, 0, 1, 0, 0, 1, 1, 1}, {"a", "b", "c", "d"});
  const auto t = build_mst(c);
  REQUIRE(t.edges.size() == 3);
  CHECK(t.edges[0] == Edge{0, 1, 1.0});
  CHECK(t.edges[1] == Edge{0, 2, 1.0});
  CHECK(t.edges[2] == Edge{1, 3, 1.0});
}

TEST_CASE("integer grid ties are deterministic and minimal") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(0, 2);
  for (int rep = 0; rep < 50; ++rep) {
    PointCloud c(2);
    for (int i = 0; i < 7; ++i) {
      const double x[2] = {double(u(rng)), double(u(rng))};
      c.add(std::to_string(i), x);
    }
    const auto a = build_mst(c);
    const auto b = build_mst(c);
    CHECK(a.edges == b.edges);
    CHECK(a.total_weight == doctest::Approx(oracle::brute_force_mst_weight(c)).epsilon(1e-12));
  }
}

TEST_CASE("total weight does not depend on point order") {
  std::mt19937_64 rng(9);
  const auto c = oracle::random_cloud(rng, 80, 3);
  std::vector<std::size_t> perm(c.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  CHECK(build_mst(c.subset(perm)).total_weight == doctest::Approx(build_mst(c).total_weight).epsilon(1e-12));
}

TEST_CASE("union-find sizes") {
  UnionFind uf(5);
  CHECK(uf.unite(0, 1) == 2);
  CHECK(uf.unite(2, 3) == 2);
  CHECK(uf.unite(1, 3) == 4);
  CHECK(uf.unite(0, 2) == 4);
  CHECK(uf.component_size(4) == 1);
}
