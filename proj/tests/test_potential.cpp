#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dwpt/error.hpp"
#include "dwpt/potential.hpp"

using namespace dwpt;

namespace {

// Closed-form derivatives of (1 - x^2)^2 / 4, written out by hand.
double w_sym(double x) { return 0.25 * (1 - x * x) * (1 - x * x); }
double w1_sym(double x) { return x * x * x - x; }
double w2_sym(double x) { return 3 * x * x - 1; }

const AxiomVerdict& verdict(const AxiomReport& r, int axiom) {
  for (const auto& v : r.verdicts)
    if (v.axiom == axiom) return v;
  FAIL("missing axiom " << axiom);
  return r.verdicts.front();
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("quartic matches its symbolic derivatives") {
    const auto p = Potential::quartic();
    for (double x = -2.0; x <= 2.0; x += 0.0625) {
      CHECK(p.value(x) == doctest::Approx(w_sym(x)).epsilon(1e-14));
      CHECK(p.d1(x) == doctest::Approx(w1_sym(x)).epsilon(1e-14));
      CHECK(p.d2(x) == doctest::Approx(w2_sym(x)).epsilon(1e-14));
    }
    CHECK(std::abs(p.d1(1.0)) <= 1e-12);
    CHECK(std::abs(p.d1(-1.0)) <= 1e-12);
  }

  TEST_CASE("polynomial with quartic coefficients agrees with quartic") {
    const auto q = Potential::quartic();
    const auto p = Potential::polynomial({0.25, 0.0, -0.5, 0.0, 0.25});
    for (double x = -1.7; x <= 1.7; x += 0.1) {
      CHECK(p.value(x) == doctest::Approx(q.value(x)).epsilon(1e-13));
      CHECK(p.d1(x) == doctest::Approx(q.d1(x)).epsilon(1e-13));
      CHECK(p.d2(x) == doctest::Approx(q.d2(x)).epsilon(1e-13));
    }
  }

  TEST_CASE("table potential interpolates dense quartic samples") {
    std::vector<std::pair<double, double>> pts;
    for (int k = -400; k <= 400; ++k) {
      const double x = k / 200.0;
      pts.emplace_back(x, w_sym(x));
    }
    const auto p = Potential::table(pts);
    for (double x = -1.9; x <= 1.9; x += 0.013) {
      CHECK(p.value(x) == doctest::Approx(w_sym(x)).epsilon(1e-6));
      CHECK(std::abs(p.d1(x) - w1_sym(x)) < 1e-4);
    }
    CHECK(std::abs(p.d1(1.0)) < 1e-4);
    CHECK(check_double_well(p).all_pass());
  }

  TEST_CASE("table needs four distinct abscissae") {
    CHECK_THROWS_AS(Potential::table({{0.0, 1.0}, {1.0, 0.0}, {-1.0, 0.0}}), Error);
  }

  TEST_CASE("quartic satisfies all four axioms") {
    const auto r = check_double_well(Potential::quartic());
    REQUIRE(r.verdicts.size() == 4);
    CHECK(r.all_pass());
  }

  TEST_CASE("x^2 fails nonnegativity-with-zeros at the wells") {
    const auto r = check_double_well(Potential::polynomial({0.0, 0.0, 1.0}));
    CHECK_FALSE(r.all_pass());
    const auto& v = verdict(r, 1);
    CHECK_FALSE(v.pass);
    CHECK(std::abs(v.witness) == doctest::Approx(1.0));
    CHECK(v.measured == doctest::Approx(1.0));
  }

  TEST_CASE("(1 - x^2)^4 / 4 fails the curvature axiom") {
    // Expanded: (1 - 4x^2 + 6x^4 - 4x^6 + x^8) / 4.
    const auto p = Potential::polynomial({0.25, 0, -1.0, 0, 1.5, 0, -1.0, 0, 0.25});
    // Hand-differentiated: W'' = 2(1 - x^2)^2 (7x^2 - 1).
    CHECK(std::abs(p.d2(1.0)) < 1e-12);
    CHECK(std::abs(p.d2(-1.0)) < 1e-12);
    CHECK(p.d2(0.5) == doctest::Approx(2.0 * std::pow(1 - 0.25, 2) * (7 * 0.25 - 1)).epsilon(1e-12));
    const auto r = check_double_well(p);
    CHECK_FALSE(verdict(r, 3).pass);
    CHECK(verdict(r, 1).pass);
    CHECK(verdict(r, 2).pass);
  }

  TEST_CASE("odd perturbation breaks evenness") {
    const auto r = check_double_well(Potential::polynomial({0.25, 0.0, -0.5, 0.01, 0.25}));
    CHECK_FALSE(verdict(r, 2).pass);
  }

  TEST_CASE("json round trip") {
    for (const auto& p : {Potential::quartic(), Potential::polynomial({1.0, 0.0, -2.0, 0.0, 1.0})}) {
      const auto q = Potential::from_json(p.to_json());
      CHECK(q.kind() == p.kind());
      for (double x : {-1.3, 0.0, 0.4, 2.0}) CHECK(q.value(x) == p.value(x));
    }
    CHECK_THROWS_AS(Potential::from_json({{"kind", "sextic"}}), Error);
  }
}
