#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hsim/hormone.hpp"
#include "hsim/rng.hpp"
#include "support.hpp"

using namespace hsim;

namespace {

HormoneField::Residence none() { return {}; }

}  // namespace

TEST_CASE("deposit") {
  const Overlay o = test::line_overlay(3);
  HormoneField f(3, 2);
  f.deposit(o, 1, 0, 3.95);
  CHECK(f.level(1, 0) == 3.95);
  f.deposit(o, 1, 0, 0.0);
  CHECK(f.level(1, 0) == 3.95);
  f.deposit(o, 2, 1, 1.5);
  f.deposit(o, 2, 1, 2.0);
  CHECK(f.level(2, 1) == 3.5);
  CHECK_THROWS_AS(f.deposit(o, 0, 0, -1.0), Error);

  Overlay dead = test::line_overlay(3);
  dead.remove_node(2);
  CHECK_THROWS_AS(f.deposit(dead, 2, 0, 1.0), Error);
}

TEST_CASE("raise over open slots") {
  const Overlay o = test::line_overlay(2);
  SUBCASE("three steps") {
    HormoneField f(2, 1);
    const std::vector<HormoneSlot> open{{0, 0}};
    for (int i = 0; i < 3; ++i) f.raise_open_requests(o, open, 4.39);
    CHECK(f.level(0, 0) == doctest::Approx(13.17).epsilon(1e-12));
  }
  SUBCASE("empty set") {
    HormoneField f(2, 1);
    f.raise_open_requests(o, {}, 4.39);
    CHECK(f.total_mass() == 0.0);
  }
  SUBCASE("slot fulfilled at step 2 of 5") {
    HormoneField f(2, 1);
    for (int step = 0; step < 5; ++step) {
      std::vector<HormoneSlot> open;
      if (step < 2) open.push_back({1, 0});
      f.raise_open_requests(o, open, 4.39);
    }
    CHECK(f.level(1, 0) == doctest::Approx(2 * 4.39));
  }
}

TEST_CASE("diffusion split by bandwidth share") {
  const Overlay o = test::line_overlay(3);
  HormoneField f(3, 1);
  f.deposit(o, 1, 0, 10.0);
  f.diffuse(o, 0.45, none());
  CHECK(f.level(1, 0) == doctest::Approx(5.5));
  CHECK(f.level(0, 0) == doctest::Approx(2.25));
  CHECK(f.level(2, 0) == doctest::Approx(2.25));

  Overlay uneven(3);
  uneven.add_edge(0, 1, 300.0);
  uneven.add_edge(0, 2, 100.0);
  HormoneField g(3, 1);
  g.deposit(uneven, 0, 0, 8.0);
  g.diffuse(uneven, 0.5, none());
  CHECK(g.level(1, 0) == doctest::Approx(3.0));
  CHECK(g.level(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("alpha zero leaves the field unchanged") {
  const Overlay o = test::line_overlay(3);
  HormoneField f(3, 1);
  f.deposit(o, 1, 0, 10.0);
  f.diffuse(o, 0.0, none());
  CHECK(f.level(1, 0) == 10.0);
  CHECK(f.level(0, 0) == 0.0);
}

TEST_CASE("residence stops forwarding") {
  const Overlay o = test::line_overlay(3);
  HormoneField f(3, 1);
  f.deposit(o, 1, 0, 10.0);
  f.diffuse(o, 0.45, [](NodeId n, KeywordId) { return n == 1; });
  CHECK(f.level(1, 0) == 10.0);
  CHECK(f.level(0, 0) == 0.0);
  CHECK(f.level(2, 0) == 0.0);
}

TEST_CASE("evaporation and clamp") {
  const Overlay o = test::line_overlay(3);
  HormoneField f(3, 1);
  f.deposit(o, 0, 0, 1.0);
  f.deposit(o, 1, 0, 0.10);
  f.deposit(o, 2, 0, 0.30);
  f.evaporate(0.16, 0.23);
  CHECK(f.level(0, 0) == doctest::Approx(0.84));
  CHECK(f.level(1, 0) == 0.0);
  CHECK(f.level(2, 0) == 0.0);
}

TEST_CASE("evaporation never leaves a value inside (0, t)") {
  Rng rng(5);
  const Overlay o = test::complete_overlay(6);
  HormoneField f(6, 4);
  for (int i = 0; i < 200; ++i) {
    f.deposit(o, static_cast<NodeId>(rng.below(6)), static_cast<KeywordId>(rng.below(4)),
              rng.uniform(0.0, 2.0));
    f.diffuse(o, 0.45, none());
    f.evaporate(0.05, 0.23);
    for (NodeId v = 0; v < 6; ++v) {
      for (KeywordId k = 0; k < 4; ++k) {
        const double l = f.level(v, k);
        CHECK((l == 0.0 || l >= 0.23));
      }
    }
  }
}

TEST_CASE("gradient ordering") {
  Overlay o(4);
  o.add_edge(0, 1, 1.0);
  o.add_edge(0, 2, 1.0);
  HormoneField f(4, 1);
  f.deposit(o, 0, 0, 2.0);
  f.deposit(o, 1, 0, 5.0);
  f.deposit(o, 2, 0, 3.0);
  const auto g = f.gradient(o, 0, 0);
  REQUIRE(g.size() == 2);
  CHECK(g[0].first == 1);
  CHECK(g[0].second == doctest::Approx(3.0));
  CHECK(g[1].first == 2);
  CHECK(g[1].second == doctest::Approx(1.0));

  CHECK(f.gradient(o, 3, 0).empty());

  const Overlay star = test::star_overlay(4);
  HormoneField flat(4, 1);
  const auto ties = flat.gradient(star, 0, 0);
  REQUIRE(ties.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ties[i].first == i + 1);
    CHECK(ties[i].second == 0.0);
  }
}

TEST_CASE("diffusion matches a dense Jacobi oracle") {
  RandomOverlayOptions ro;
  ro.nodes = 20;
  ro.edge_probability = 0.2;
  ro.bandwidth_jitter = 3.0;
  const Overlay o = generate_random_overlay(ro, 11);
  HormoneField f(20, 3);
  std::vector<std::vector<double>> dense(20, std::vector<double>(3, 0.0));
  Rng rng(2);
  for (int i = 0; i < 15; ++i) {
    const auto v = static_cast<NodeId>(rng.below(20));
    const auto k = static_cast<KeywordId>(rng.below(3));
    const double a = rng.uniform(0.5, 5.0);
    f.deposit(o, v, k, a);
    dense[v][k] += a;
  }
  auto stopped = [](NodeId n, KeywordId k) { return (n + k) % 7 == 0; };
  for (int step = 0; step < 10; ++step) {
    f.diffuse(o, 0.45, stopped);
    // Visit nodes in descending order to show the update is order-free.
    std::vector<std::vector<double>> next(20, std::vector<double>(3, 0.0));
    for (int v = 19; v >= 0; --v) {
      double bw = 0.0;
      for (const Link& l : o.links(v)) bw += l.bandwidth_bps;
      for (KeywordId k = 0; k < 3; ++k) {
        const double lvl = dense[v][k];
        if (stopped(v, k) || bw == 0.0) {
          next[v][k] += lvl;
          continue;
        }
        next[v][k] += lvl * 0.55;
        for (const Link& l : o.links(v)) next[l.to][k] += lvl * 0.45 * l.bandwidth_bps / bw;
      }
    }
    dense = next;
  }
  for (NodeId v = 0; v < 20; ++v) {
    for (KeywordId k = 0; k < 3; ++k) {
      CHECK(f.level(v, k) == doctest::Approx(dense[v][k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mass is conserved by diffusion and non-increasing under decay") {
  RandomOverlayOptions ro;
  ro.nodes = 30;
  ro.edge_probability = 0.15;
  const Overlay o = generate_random_overlay(ro, 4);
  HormoneField f(30, 2);
  for (NodeId v = 0; v < 30; v += 3) f.deposit(o, v, v % 2, 1.0 + v);
  const double m0 = f.total_mass();
  for (int i = 0; i < 100; ++i) f.diffuse(o, 0.45, none());
  CHECK(std::abs(f.total_mass() - m0) <= 1e-9 * m0);
  double prev = f.total_mass();
  for (int i = 0; i < 50; ++i) {
    f.diffuse(o, 0.45, none());
    f.evaporate(0.16, 0.23);
    CHECK(f.total_mass() <= prev + 1e-12);
    prev = f.total_mass();
  }
}

TEST_CASE("clear_node and csv dump") {
  const Overlay o = test::line_overlay(3);
  HormoneField f(3, 2);
  f.deposit(o, 0, 1, 2.5);
  f.deposit(o, 2, 0, 1.0);
  std::ostringstream out;
  f.dump_csv(out, 7);
  CHECK(out.str() == "7,2,0,1\n7,0,1,2.5\n");
  f.clear_node(0);
  CHECK(f.level(0, 1) == 0.0);
  CHECK(f.total_mass() == 1.0);
}

TEST_CASE("parameter validation") {
  ParameterSet p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ParameterSet{};
  p.c = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ParameterSet{};
  p.maxhops = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}
