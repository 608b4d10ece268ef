#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "dwpt/error.hpp"
#include "dwpt/grid.hpp"

using namespace dwpt;

TEST_SUITE("grid") {
  TEST_CASE("interval includes both end points") {
    const auto g = Grid::interval(101, 2.0);
    CHECK(g.size() == 101);
    CHECK(g.h() == doctest::Approx(0.04));
    CHECK(g.coord(0) == doctest::Approx(-2.0));
    CHECK(g.coord(100) == doctest::Approx(2.0));
    CHECK(g.coord(50) == doctest::Approx(0.0));
    // Trapezoid weights integrate constants exactly.
    const auto& w = g.weights();
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(w.front() == doctest::Approx(0.02));
  }

  TEST_CASE("circle and torus spacing and weights") {
    const auto c = Grid::circle(64);
    CHECK(c.h() == doctest::Approx(kTwoPi / 64));
    CHECK(c.periodic());
    const auto& wc = c.weights();
    CHECK(std::accumulate(wc.begin(), wc.end(), 0.0) == doctest::Approx(kTwoPi).epsilon(1e-14));

    const auto t = Grid::torus(32, 16, kTwoPi, 1.0);
    CHECK(t.size() == 512);
    CHECK(t.h2() == doctest::Approx(1.0 / 16));
    CHECK(t.coord2(3) == doctest::Approx(3.0 / 16));
    const auto& wt = t.weights();
    CHECK(std::accumulate(wt.begin(), wt.end(), 0.0) == doctest::Approx(kTwoPi).epsilon(1e-13));
  }

  TEST_CASE("spacing constructor needs a whole number of steps") {
    const auto g = Grid::interval_with_spacing(1.0, 0.0625);
    CHECK(g.n() == 33);
    CHECK_THROWS_AS(Grid::interval_with_spacing(1.0, 0.3), Error);
  }

  TEST_CASE("resolution rule") {
    const auto g = Grid::circle(512);  // h ~ 0.01227
    CHECK(g.resolves(0.1));
    CHECK_FALSE(g.resolves(0.05));
    CHECK(g.resolves(0.05, 4.0));
    try {
      g.require_resolution(0.05);
      FAIL("expected a precondition error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::precondition);
    }
  }

  TEST_CASE("invalid construction") {
    CHECK_THROWS_AS(Grid::interval(8, 1.0), Error);
    CHECK_THROWS_AS(Grid::circle(16, -1.0), Error);
    CHECK_THROWS_AS(grid_kind_from_string("sphere"), Error);
  }

  TEST_CASE("json round trip") {
    for (const auto& g : {Grid::interval(33, 0.5), Grid::circle(128), Grid::torus(16, 16, kTwoPi, 2.0)}) {
      const auto back = Grid::from_json(g.to_json());
      CHECK(back == g);
      CHECK(to_string(back.kind()) == to_string(g.kind()));
    }
  }

  TEST_CASE("wrap-aware helpers") {
    CHECK(circle_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
    CHECK(circle_distance(1.0, 4.0) == doctest::Approx(3.0));
    CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTwoPi));
    CHECK(wrap_angle(3.0, 2.0) == doctest::Approx(1.0));
  }
}
