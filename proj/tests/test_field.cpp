#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dwpt/error.hpp"
#include "dwpt/field.hpp"

using namespace dwpt;

namespace {

Field random_field(const Grid& g, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.2, 1.2);
  Field f(g, eps);
  for (double& v : f.values) v = d(rng);
  if (g.kind() == GridKind::interval) f.values.front() = f.values.back() = 0.0;
  return f;
}

// Simpson's rule for sigma = int_{-1}^{1} sqrt(2 W(s)) ds with W = (1 - s^2)^2 / 4.
double sigma_oracle() {
  const int n = 20000;
  const double h = 2.0 / n;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double s = -1.0 + k * h;
    const double f = std::sqrt(2.0 * 0.25 * (1 - s * s) * (1 - s * s));
    sum += f * (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("gradient is the first variation of the energy") {
    const auto p = Potential::quartic();
    const double t = 1e-6;
    for (const auto& g : {Grid::circle(64), Grid::interval(48, 1.0), Grid::torus(16, 16, kTwoPi, 1.0)}) {
      for (double eps : {0.1, 0.3}) {
        Field u = random_field(g, eps, 7);
        const Field grad = gradient(u, p);
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
          if (g.kind() == GridKind::interval && (k == 0 || k + 1 == u.size())) continue;
          const double keep = u.values[k];
          u.values[k] = keep + t;
          const double ep = energy(u, p);
          u.values[k] = keep - t;
          const double em = energy(u, p);
          u.values[k] = keep;
          const double fd = (ep - em) / (2 * t);
          const double an = g.weight(k) * grad.values[k];
          worst = std::max(worst, std::abs(fd - an));
          scale = std::max(scale, std::abs(an));
        }
        CHECK(worst / scale <= 1e-6);
      }
    }
  }

  TEST_CASE("hessian is symmetric and matches gradient differences") {
    const auto p = Potential::quartic();
    const auto g = Grid::circle(128);
    const Field u = random_field(g, 0.2, 11);
    const Field a = random_field(g, 0.2, 12);
    const Field b = random_field(g, 0.2, 13);
    const double ab = inner(g, a.values, hessian_apply(u, b, p).values);
    const double ba = inner(g, b.values, hessian_apply(u, a, p).values);
    CHECK(std::abs(ab - ba) <= 1e-10 * std::abs(ab));

    const double t = 1e-6;
    Field up = u, um = u;
    for (std::size_t k = 0; k < u.size(); ++k) {
      up.values[k] += t * a.values[k];
      um.values[k] -= t * a.values[k];
    }
    const Field gp = gradient(up, p), gm = gradient(um, p), ha = hessian_apply(u, a, p);
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
      worst = std::max(worst, std::abs((gp.values[k] - gm.values[k]) / (2 * t) - ha.values[k]));
    CHECK(worst / max_norm(ha.values) <= 1e-6);
  }

  TEST_CASE("discrete laplacian eigenfunctions") {
    const auto c = Grid::circle(64);
    const double h = c.h();
    for (int k : {1, 3, 7}) {
      const Field f = sample_fiber(c, 1.0, [&](double th) { return std::sin(k * th); });
      Field out(c, 1.0);
      laplacian(c, f.values, out.values);
      const double lambda = -(2 - 2 * std::cos(k * h)) / (h * h);
      for (std::size_t i = 0; i < c.n(); ++i) CHECK(out.values[i] == doctest::Approx(lambda * f.values[i]).epsilon(1e-9));
    }

    const auto t = Grid::torus(32, 16, kTwoPi, kTwoPi);
    Field f(t, 1.0);
    for (std::size_t i = 0; i < t.n(); ++i)
      for (std::size_t j = 0; j < t.n2(); ++j) f.values[i * t.n2() + j] = std::sin(t.coord(i)) * std::cos(2 * t.coord2(j));
    Field out(t, 1.0);
    laplacian(t, f.values, out.values);
    const double lambda = -(2 - 2 * std::cos(t.h())) / (t.h() * t.h()) - (2 - 2 * std::cos(2 * t.h2())) / (t.h2() * t.h2());
    for (std::size_t k = 0; k < f.size(); k += 37) CHECK(out.values[k] == doctest::Approx(lambda * f.values[k]).epsilon(1e-9));

    const auto iv = Grid::interval(20, 1.0);
    const Field q = sample_fiber(iv, 1.0, [](double x) { return x * x; });
    Field lq(iv, 1.0);
    laplacian(iv, q.values, lq.values);
    CHECK(lq.values.front() == 0.0);
    CHECK(lq.values.back() == 0.0);
    CHECK(lq.values[7] == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("wells have zero energy and zero residual") {
    const auto p = Potential::quartic();
    const auto g = Grid::circle(32);
    Field plus(g, 0.1), minus(g, 0.1);
    for (auto& v : plus.values) v = 1.0;
    for (auto& v : minus.values) v = -1.0;
    CHECK(energy(plus, p) == 0.0);
    CHECK(energy(minus, p) == 0.0);
    CHECK(residual_norm(plus, p) == 0.0);
  }

  TEST_CASE("heteroclinic profile carries one interface energy") {
    const double eps = 0.05, sigma = sigma_oracle();
    CHECK(sigma == doctest::Approx(2 * std::sqrt(2.0) / 3).epsilon(1e-9));
    const auto g = Grid::interval(1601, 20 * eps);
    const Field u = sample_fiber(g, eps, [&](double x) { return std::tanh(x / (std::sqrt(2.0) * eps)); });
    CHECK(std::abs(energy(u, Potential::quartic()) - sigma) <= 1e-3);
  }

  TEST_CASE("rotation, negation, truncation") {
    const auto g = Grid::circle(16);
    Field f(g, 0.5);
    for (std::size_t i = 0; i < 16; ++i) f.values[i] = static_cast<double>(i) - 7.5;
    const Field r = rotate(f, 3);
    for (std::size_t i = 0; i < 16; ++i) CHECK(r.values[i] == f.values[(i + 13) % 16]);
    CHECK(rotate(f, -16).values == f.values);
    const Field n = negated(f);
    CHECK(n.values[0] == 7.5);
    const Field t = truncated(f);
    CHECK(t.values[0] == 1.0);
    CHECK(t.values[7] == 0.5);
    CHECK_THROWS_AS(rotate(Field(Grid::interval(16, 1.0), 0.5), 1), Error);
    CHECK_THROWS_AS(Field(g, std::vector<double>(15, 0.0), 0.5), Error);
  }
}
