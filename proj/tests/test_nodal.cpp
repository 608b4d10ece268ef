#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "dwpt/error.hpp"
#include "dwpt/nodal.hpp"
#include "dwpt/solvers.hpp"

using namespace dwpt;

namespace {

constexpr double kPi = std::numbers::pi;

template <class Fn>
Field circle_field(std::size_t n, Fn&& fn, double eps = 0.1) {
  return sample_fiber(Grid::circle(n), eps, fn);
}

}  // namespace

TEST_SUITE("nodal") {
  TEST_CASE("zeros of a shifted sine") {
    const Field f = circle_field(256, [](double t) { return std::sin(2 * t - 0.1); });
    const auto ns = extract_nodal_set(f);
    REQUIRE(ns.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(ns.points[k].coord == doctest::Approx(0.05 + k * kPi / 2).epsilon(1e-5));
      CHECK(ns.points[k].direction == (k % 2 == 0 ? 1 : -1));
    }
  }

  TEST_CASE("interval zeros and exact grid zeros") {
    const auto g = Grid::interval(41, 1.0);
    const Field f = sample_fiber(g, 0.1, [](double x) { return x * x - 0.25; });
    const auto ns = extract_nodal_set(f);
    REQUIRE(ns.size() == 2);
    CHECK(ns.points[0].coord == doctest::Approx(-0.5));
    CHECK(ns.points[1].coord == doctest::Approx(0.5));
  }

  TEST_CASE("hausdorff distance") {
    const Field a = circle_field(256, [](double t) { return std::sin(t); });
    const Field b = rotate(a, 8);
    const auto na = extract_nodal_set(a), nb = extract_nodal_set(b);
    CHECK(hausdorff(na, nb) == doctest::Approx(8 * kTwoPi / 256).epsilon(1e-6));
    CHECK(hausdorff(na, na) == 0.0);
    const Field c = circle_field(256, [](double) { return 1.0; });
    const auto nc = extract_nodal_set(c);
    CHECK(nc.empty());
    CHECK(hausdorff(nc, nc) == 0.0);
    CHECK(is_empty_vs_nonempty(hausdorff(na, nc)));
    CHECK(distance_to_set(na, kPi / 2) == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(distance_to_set(na, kTwoPi - 0.1) == doctest::Approx(0.1).epsilon(1e-6));
  }

  TEST_CASE("torus nodal cloud groups into fiber circles") {
    const auto g = Grid::torus(128, 16, kTwoPi, 1.0);
    const Field f = sample_fiber(g, 0.1, [](double t) { return std::sin(t - 0.3); });
    const auto ns = extract_nodal_set(f);
    CHECK(ns.size() == 32);
    const auto angles = fiber_angles(ns, 4 * g.h());
    REQUIRE(angles.size() == 2);
    CHECK(angles[0] == doctest::Approx(0.3).epsilon(1e-4));
    CHECK(angles[1] == doctest::Approx(0.3 + kPi).epsilon(1e-4));
  }

  TEST_CASE("congruence of spacings") {
    const auto even = check_congruent_intervals({0.0, kPi / 2, kPi, 3 * kPi / 2}, 1e-5);
    CHECK(even.pass);
    CHECK(even.mean == doctest::Approx(kPi / 2));
    const auto uneven = check_congruent_intervals({0.0, kPi / 2 + 0.01, kPi, 3 * kPi / 2}, 1e-5);
    CHECK_FALSE(uneven.pass);
    CHECK(uneven.max_abs_deviation == doctest::Approx(0.01).epsilon(1e-9));
    // Wrap-around spacing counts too.
    CHECK_FALSE(check_congruent_intervals({0.5, 1.5, 2.5}, 1e-5).pass);
    CHECK_THROWS_AS(check_congruent_intervals(std::vector<double>{1.0}, 1e-5), Error);
  }

  TEST_CASE("simple zeros alternate") {
    const Field f = circle_field(512, [](double t) { return std::sin(2 * t) + 0.8 * std::sin(t); });
    const auto alt = check_alternation(f, extract_nodal_set(f));
    CHECK(alt.alternates);
    CHECK(alt.arc_signs.size() == 4);
  }

  TEST_CASE("touching zeros do not alternate") {
    // sin^2 with its two zeros placed exactly on grid points: both arcs positive.
    Field f = circle_field(512, [](double t) { return std::sin(t) * std::sin(t); });
    f.values[0] = 0.0;
    f.values[256] = 0.0;
    const auto ns = extract_nodal_set(f);
    REQUIRE(ns.size() == 2);
    const auto alt = check_alternation(f, ns);
    CHECK_FALSE(alt.alternates);
    CHECK(alt.arc_signs == std::vector<int>{1, 1});
  }

  TEST_CASE("torus alternation per slice") {
    const auto g = Grid::torus(64, 16, kTwoPi, 1.0);
    Field f = sample_fiber(g, 0.3, [](double t) { return std::sin(2 * t + 0.05); });
    CHECK(check_alternation(f).alternates);
    for (std::size_t i = 0; i < g.n(); ++i) f.values[i * g.n2() + 5] = std::sin(g.coord(i)) * std::sin(g.coord(i));
    f.values[5] = 0.0;
    f.values[32 * g.n2() + 5] = 0.0;
    CHECK_FALSE(check_alternation(f).alternates);
  }

  TEST_CASE("rotation symmetry") {
    const Field f = circle_field(256, [](double t) { return std::sin(2 * t); });
    const auto s = check_rotation_symmetry(f, 4);
    CHECK(s.pass);
    CHECK(s.shift_steps == 64);
    CHECK(s.sign_flip_residual <= 1e-14);
    const Field g = circle_field(256, [](double t) { return std::sin(2 * t) + 0.05 * std::cos(4 * t); });
    const auto sg = check_rotation_symmetry(g, 4);
    CHECK_FALSE(sg.pass);
    CHECK(sg.sign_flip_residual == doctest::Approx(0.1).epsilon(1e-6));
    CHECK_THROWS_AS(check_rotation_symmetry(f, 3), Error);
    CHECK_THROWS_AS(check_rotation_symmetry(f, 6), Error);
  }

  TEST_CASE("trigonometric interpolation is exact for band-limited fields") {
    auto fn = [](double t) { return std::sin(3 * t) + 0.5 * std::cos(5 * t) - 0.25; };
    const TrigInterpolant u(circle_field(64, fn));
    for (double t : {0.01, 1.234, 3.3, 6.0}) CHECK(u(t) == doctest::Approx(fn(t)).epsilon(1e-12));
  }

  TEST_CASE("local symmetries of a critical point") {
    const auto c = build_circle(4, 0.1, 512, Potential::quartic());
    const auto good = check_local_symmetries(c.field, extract_nodal_set(c.field));
    CHECK(good.pass);
    CHECK(good.odd_defect <= 1e-7);
    CHECK(good.even_defect <= 1e-7);

    const Field skew = circle_field(512, [](double t) { return std::sin(t) + 0.3 * std::cos(2 * t); });
    CHECK_FALSE(check_local_symmetries(skew, extract_nodal_set(skew)).pass);
  }

  TEST_CASE("decay rate near the wells") {
    const double eps = 0.1;
    const auto c = build_circle(2, eps, 512, Potential::quartic());
    const auto fit = fit_decay(c.field, extract_nodal_set(c.field));
    CHECK(fit.points_used > 10);
    CHECK(fit.kappa * eps == doctest::Approx(std::sqrt(2.0)).epsilon(0.25));
    CHECK(fit.distance.size() == c.field.size());
  }

  TEST_CASE("fiber slice") {
    const auto g = Grid::torus(32, 16, kTwoPi, 1.0);
    Field f(g, 0.2);
    for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = static_cast<double>(k);
    const Field s = fiber_slice(f, 3);
    CHECK(s.grid.kind() == GridKind::circle);
    CHECK(s.values[2] == 2 * 16 + 3);
  }
}
