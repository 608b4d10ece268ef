#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "dwpt/error.hpp"
#include "dwpt/experiments.hpp"
#include "dwpt/nodal.hpp"

using namespace dwpt;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("index sets and their boundaries") {
    const auto iv = Grid::interval(21, 1.0);  // h = 0.1
    const auto set = fiber_index_set(iv, -0.5, 0.5);
    CHECK(set.size() == 11);
    CHECK(boundary_of(iv, set) == IndexSet{5, 15});

    const auto c = Grid::circle(64);
    const auto wrapped = fiber_index_set(c, -0.2, 0.2);
    CHECK(wrapped.size() == 5);
    CHECK(wrapped.front() == 0);
    CHECK(wrapped.back() == 63);
    CHECK(boundary_of(c, wrapped) == IndexSet{2, 62});
  }

  TEST_CASE("comparison scenarios") {
    const auto rep = experiment_comparison({}, Potential::quartic());
    CHECK(rep.pass());
    REQUIRE(rep.find("comparison.nested_strict") != nullptr);
    CHECK(rep.find("comparison.nested_strict")->measured > 0.0);
    CHECK(rep.find("comparison.restricted_inapplicable")->pass);
  }

  TEST_CASE("comparison preconditions are classified, not judged") {
    const auto p = Potential::quartic();
    const auto g = Grid::interval(161, 1.0);
    const auto model = solve_dirichlet_model(g, 0.1, p);
    REQUIRE(model.status == ModelSolution::Status::positive);
    const Field zero(g, 0.1);
    const auto interior = fiber_index_set(g, -0.5, 0.5);

    const auto ok = comparison_test(model.field, zero, interior, p);
    CHECK(ok.verdict == ComparisonReport::Verdict::pass);
    CHECK(ok.min_gap > 0.0);

    Field bumped = model.field;
    bumped.values[80] += 1e-3;  // no longer critical
    const auto not_critical = comparison_test(bumped, zero, interior, p);
    CHECK(not_critical.verdict == ComparisonReport::Verdict::inapplicable);
    CHECK_FALSE(not_critical.reason.empty());

    // u vanishes on the ends of the whole interval.
    const auto all = fiber_index_set(g, -1.0, 1.0);
    CHECK(comparison_test(model.field, zero, all, p).verdict == ComparisonReport::Verdict::inapplicable);

    const Field other_eps(g, 0.2);
    CHECK(comparison_test(model.field, other_eps, interior, p).verdict == ComparisonReport::Verdict::inapplicable);
  }

  TEST_CASE("synthetic slide: first touch lands inside the slid domain") {
    const auto p = Potential::quartic();
    const auto g = Grid::circle(512);
    const auto b = build_barrier(BarrierKind::two_sided, kPi, 0.3, 0.1, p, g);
    // u sits far below the barrier except for one tooth just right of its domain.
    const double tooth_value = -0.5;
    const auto tooth = static_cast<std::size_t>(std::ceil((b.domain_hi + 0.1) / g.h()));
    const double theta_t = g.coord(tooth);
    Field u(g, 0.1);
    for (auto& v : u.values) v = -2.0;
    u.values[tooth] = tooth_value;

    // Brute-force oracle: first grid offset at which the slid barrier dips to the tooth.
    long expected = -1;
    for (long k = 1; k < 2000 && expected < 0; ++k) {
      const double s = k * g.h();
      if (theta_t < b.domain_lo + s || theta_t > b.domain_hi + s) continue;
      if (b.value(theta_t - s) <= tooth_value) expected = k;
    }
    REQUIRE(expected > 0);

    const auto r = slide_to_touch(u, b, +1, 2.0, Orientation::barrier_above);
    REQUIRE(r.touched);
    CHECK(r.steps == expected);
    CHECK(r.touch_coord == doctest::Approx(theta_t));
    CHECK(r.offset > 0.1);
    CHECK(r.interior);
    CHECK(r.boundary_distance >= g.h());

    // Sliding the other way never reaches the tooth within a short range.
    const auto away = slide_to_touch(u, b, -1, 0.5, Orientation::barrier_above);
    CHECK_FALSE(away.touched);
  }

  TEST_CASE("slide refuses a non-strict starting order") {
    const auto p = Potential::quartic();
    const auto g = Grid::circle(512);
    const auto b = build_barrier(BarrierKind::left_reflected, 1.0, 0.6, 0.1, p, g);
    Field u(g, 0.1);
    for (auto& v : u.values) v = 0.5;
    CHECK(code_of([&] { slide_to_touch(u, b, 1, 1.0); }) == ErrorCode::precondition);
  }

  TEST_CASE("barrier construction preconditions") {
    const auto p = Potential::quartic();
    const auto g = Grid::circle(512);
    // Half-length below pi eps / 2: only the trivial model solution exists.
    CHECK(code_of([&] { build_barrier(BarrierKind::two_sided, 1.0, 0.1, 0.1, p, g); }) == ErrorCode::precondition);
    // Reflected pieces would wrap onto themselves.
    CHECK(code_of([&] { build_barrier(BarrierKind::two_sided, 1.0, 1.2, 0.1, p, g); }) == ErrorCode::precondition);
    CHECK(code_of([&] { build_barrier(BarrierKind::two_sided, 1.0, 0.3, 0.1, p, Grid::interval(64, 1.0)); }) ==
          ErrorCode::invalid_argument);

    const auto left = build_barrier(BarrierKind::left_reflected, 2.0, 0.6, 0.1, p, g);
    CHECK(left.domain_lo == doctest::Approx(1.4));
    CHECK(left.domain_hi == doctest::Approx(2.6));
    CHECK(left.value(1.7) == doctest::Approx(-left.value(2.3)).epsilon(1e-9));
    CHECK(left.value(2.3) > 0.0);
  }

  TEST_CASE("slide pipeline at a resolvable epsilon") {
    SlideConfig cfg;
    cfg.epsilon = 0.025;
    cfg.n = 2048;
    const auto rep = experiment_slide(cfg, Potential::quartic());
    for (const auto& a : rep.assertions) {
      INFO(a.name << ": " << a.detail);
      CHECK(a.pass);
    }
  }

  TEST_CASE("slide at eps = 0.1 reports the missing barrier") {
    const auto rep = experiment_slide({}, Potential::quartic());
    CHECK_FALSE(rep.pass());
    const auto* a = rep.find("slide[delta=0.5*max].barrier");
    REQUIRE(a != nullptr);
    CHECK(a->detail.find("no positive model solution") != std::string::npos);
  }

  TEST_CASE("glued profile puts zeros at the requested angles") {
    const auto g = Grid::circle(512);
    const Field f = glued_profile(g, 0.1, {4.0, 1.0});
    const auto ns = extract_nodal_set(f);
    REQUIRE(ns.size() == 2);
    CHECK(ns.points[0].coord == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(ns.points[1].coord == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(f.values[static_cast<std::size_t>(2.5 / g.h())] > 0.0);
    CHECK(f.values[static_cast<std::size_t>(5.5 / g.h())] < 0.0);
  }

  TEST_CASE("negated seeds mirror the two-interface outcomes") {
    TwoInterfaceConfig cfg;
    cfg.epsilons = {0.25};
    cfg.seeds = {1, 2};
    const auto plus = experiment_two_interface(cfg, Potential::quartic());
    cfg.negate = true;
    const auto minus = experiment_two_interface(cfg, Potential::quartic());
    const auto& a = plus.measurements.at("runs");
    const auto& b = minus.measurements.at("runs");
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].at("outcome") == b[k].at("outcome"));
      if (a[k].contains("critical_point"))
        CHECK(a[k].at("critical_point").at("nodal_count") == b[k].at("critical_point").at("nodal_count"));
    }
    CHECK(plus.pass());
    CHECK(minus.pass());
  }

  TEST_CASE("odd m is rejected before any work") {
    RigidityConfig cfg;
    cfg.m = 3;
    try {
      experiment_m_rigidity(cfg, Potential::quartic());
      FAIL("expected invalid_argument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_argument);
      CHECK(std::string(e.what()).find("even") != std::string::npos);
    }
    cfg.m = 2;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }

  TEST_CASE("configs round-trip through json") {
    RigidityConfig r;
    r.m = 6;
    r.seeds = {5, 9};
    CHECK(RigidityConfig::from_json(r.to_json()).to_json() == r.to_json());
    TwoInterfaceConfig t;
    t.negate = true;
    CHECK(TwoInterfaceConfig::from_json(t.to_json()).to_json() == t.to_json());
    CHECK(DecayConfig::from_json(DecayConfig{}.to_json()).to_json() == DecayConfig{}.to_json());
    CHECK(ComparisonConfig::from_json(ComparisonConfig{}.to_json()).to_json() == ComparisonConfig{}.to_json());
    CHECK(SlideConfig::from_json(SlideConfig{}.to_json()).to_json() == SlideConfig{}.to_json());
    CHECK(barrier_kind_from_string(to_string(BarrierKind::left_reflected)) == BarrierKind::left_reflected);
  }

  TEST_CASE("run_experiment dispatch and replay") {
    CHECK(code_of([] { run_experiment("three-interface", nlohmann::json::object()); }) == ErrorCode::invalid_argument);
    const auto first = run_experiment("comparison", nlohmann::json::object());
    const auto again = run_experiment("comparison", first.config);
    CHECK(first.to_json().dump() == again.to_json().dump());
    CHECK_FALSE(first.to_json().contains("runtime_seconds"));
  }
}
