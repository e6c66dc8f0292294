#include <doctest.h>

#include <stdexcept>

#include "meshsort/mesh.hpp"
#include "meshsort/rng.hpp"
#include "oracles.hpp"

using namespace meshsort;

TEST_CASE("cell_of") {
  const MeshGrid g(4, 4, 1920, 1080);
  CHECK(g.cell_of({960, 540}) == CellId{2, 2});
  CHECK(g.cell_of({0, 0}) == CellId{0, 0});
  CHECK(g.cell_of({1920, 1080}) == CellId{3, 3});
  CHECK(g.cell_of({-50, 5000}) == CellId{0, 3});
  CHECK(g.cell_of({479.999, 269.999}) == CellId{0, 0});
  CHECK(g.cell_of({480, 270}) == CellId{1, 1});
  CHECK_THROWS_AS(MeshGrid(0, 4, 1920, 1080), std::invalid_argument);
  CHECK_THROWS_AS(MeshGrid(4, 4, 0, 1080), std::invalid_argument);
}

TEST_CASE("record lost and refound") {
  MeshGrid g(4, 4, 1920, 1080);
  const CellId c = g.record_lost({100, 100});
  CHECK(g.count(c) == 1);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (CellId{i, j} != c) CHECK(g.count({i, j}) == 0);
    }
  }
  for (int k = 0; k < 4; ++k) g.record_lost({100, 100});
  g.record_refound({100, 100});
  g.record_refound({100, 100});
  CHECK(g.count(c) == 3);

  g.record_refound({1900, 1000});
  CHECK(g.count({3, 3}) == -1);
  CHECK(g.count(c) == 3);
}

TEST_CASE("threshold") {
  const ThresholdFn h{0.02};
  CHECK(threshold(h, false, 100) == doctest::Approx(2.0));
  CHECK(threshold(h, true, 100) == 0.0);
  CHECK(threshold(h, true, 1e9) == 0.0);
  CHECK(threshold(h, false, 1e-9) == doctest::Approx(2e-11));
  CHECK_THROWS_AS(threshold(h, false, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(threshold(h, false, -1.0), std::invalid_argument);
}

TEST_CASE("identify") {
  const ThresholdFn h{0.02};
  MeshGrid g(4, 4, 1920, 1080);
  CHECK(g.identify(h, 1).empty());

  for (int k = 0; k < 3; ++k) g.record_lost({10, 10});
  CHECK(g.identify(h, 100) == std::vector<CellId>{{0, 0}});
  CHECK(g.is_frequent({0, 0}));

  // Once frequent, the threshold drops to zero even at late frames.
  CHECK(g.identify(h, 10000).size() == 1);

  for (int k = 0; k < 3; ++k) g.record_refound({10, 10});
  CHECK(g.identify(h, 10001).empty());
  CHECK_FALSE(g.is_frequent({0, 0}));

  SUBCASE("tie is not frequent") {
    MeshGrid t(2, 2, 100, 100);
    t.record_lost({1, 1});
    t.record_lost({1, 1});
    CHECK(t.identify(h, 100).empty());
  }
}

TEST_CASE("snapshot") {
  MeshGrid g(4, 4, 1920, 1080);
  const MeshSnapshot fresh = g.snapshot(1);
  CHECK(fresh.counts == std::vector<std::int64_t>(16, 0));
  CHECK(fresh.frequent.empty());

  for (int k = 0; k < 5; ++k) g.record_lost({1000, 300});
  g.record_refound({1000, 300});
  g.record_refound({1000, 300});
  g.identify({0.02}, 100);
  const MeshSnapshot s = g.snapshot(100);
  CHECK(s.count(2, 1) == 3);
  std::int64_t total = 0;
  for (auto v : s.counts) total += v;
  CHECK(total == 3);
  CHECK(s.frequent == std::vector<CellId>{{2, 1}});
  CHECK(MeshSnapshot::parse(s.serialize()) == s);
  CHECK(MeshSnapshot::parse(fresh.serialize()) == fresh);
  CHECK_THROWS(MeshSnapshot::parse("mesh 2 2 frame 1\n0 0\n"));
}

TEST_CASE("property: counts match a recount of the event log") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform() * 8);
    const int n = 1 + static_cast<int>(rng.uniform() * 8);
    MeshGrid g(m, n, 1280, 720);
    oracle::MeshLog log{m, n, 1280, 720, {}, {}};
    const int events = static_cast<int>(rng.uniform() * 300);
    for (int e = 0; e < events; ++e) {
      const double x = rng.uniform() * 1400 - 60;
      const double y = rng.uniform() * 800 - 40;
      if (rng.uniform() < 0.6) {
        g.record_lost({x, y});
        log.lost(x, y);
      } else {
        g.record_refound({x, y});
        log.refound(x, y);
      }
      const CellId c = g.cell_of({x, y});
      REQUIRE(c.i >= 0);
      REQUIRE(c.i < m);
      REQUIRE(c.j >= 0);
      REQUIRE(c.j < n);
      if (rng.uniform() < 0.1) {
        const double t = 1 + e;
        const double lambda = rng.uniform() * 0.05;
        g.identify({lambda}, t);
        log.identify(lambda, t);
        std::set<std::pair<int, int>> got;
        for (const CellId& f : g.frequent()) got.insert({f.i, f.j});
        REQUIRE(got == log.frequent);
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) REQUIRE(g.count({i, j}) == log.count(i, j));
    }
  }
}

TEST_CASE("property: identify is idempotent at fixed counts and t") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    MeshGrid g(4, 4, 100, 100);
    for (int e = 0; e < 40; ++e) {
      if (rng.uniform() < 0.7) {
        g.record_lost({rng.uniform() * 100, rng.uniform() * 100});
      } else {
        g.record_refound({rng.uniform() * 100, rng.uniform() * 100});
      }
    }
    const double t = 1 + rng.uniform() * 300;
    const std::vector<CellId> first = g.identify({0.02}, t);
    REQUIRE(g.identify({0.02}, t) == first);
  }
}

TEST_CASE("property: raising a non-frequent cell's count never removes it") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = 1 + rng.uniform() * 400;
    const int base = static_cast<int>(rng.uniform() * 12) - 2;
    bool was = false;
    for (int extra = 0; extra < 10; ++extra) {
      MeshGrid g(1, 1, 10, 10);
      for (int k = 0; k < base + extra; ++k) g.record_lost({5, 5});
      for (int k = 0; k < -(base + extra); ++k) g.record_refound({5, 5});
      const bool now = !g.identify({0.02}, t).empty();
      REQUIRE((!was || now));
      was = now;
    }
  }
}

TEST_CASE("lambda zero makes every positive cell frequent") {
  MeshGrid g(3, 3, 90, 90);
  g.record_lost({5, 5});
  g.record_lost({50, 50});
  g.record_lost({85, 5});
  g.record_refound({85, 5});
  CHECK(g.identify({0.0}, 500) == std::vector<CellId>{{0, 0}, {1, 1}});
}
