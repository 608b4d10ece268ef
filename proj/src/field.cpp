#include "dwpt/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwpt/error.hpp"

namespace dwpt {

Field::Field(Grid g, double eps) : grid(std::move(g)), values(grid.size(), 0.0), epsilon(eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "epsilon must be positive");
}

Field::Field(Grid g, std::vector<double> v, double eps)
    : grid(std::move(g)), values(std::move(v)), epsilon(eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "epsilon must be positive");
  if (values.size() != grid.size()) {
    std::ostringstream os;
    os << "field has " << values.size() << " values, grid expects " << grid.size();
    fail(ErrorCode::invalid_argument, os.str());
  }
}

void laplacian(const Grid& g, std::span<const double> u, std::span<double> out) {
  const std::size_t n = g.n();
  const double ih2 = 1.0 / (g.h() * g.h());
  switch (g.kind()) {
    case GridKind::interval:
      out[0] = out[n - 1] = 0.0;
      for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * ih2;
      break;
    case GridKind::circle:
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t l = i == 0 ? n - 1 : i - 1;
        const std::size_t r = i + 1 == n ? 0 : i + 1;
        out[i] = (u[l] - 2.0 * u[i] + u[r]) * ih2;
      }
      break;
    case GridKind::torus: {
      const std::size_t n2 = g.n2();
      const double jh2 = 1.0 / (g.h2() * g.h2());
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t il = (i == 0 ? n - 1 : i - 1) * n2;
        const std::size_t ir = (i + 1 == n ? 0 : i + 1) * n2;
        const std::size_t row = i * n2;
        for (std::size_t j = 0; j < n2; ++j) {
          const std::size_t jl = j == 0 ? n2 - 1 : j - 1;
          const std::size_t jr = j + 1 == n2 ? 0 : j + 1;
          const double c = u[row + j];
          out[row + j] = (u[il + j] - 2.0 * c + u[ir + j]) * ih2 +
                         (u[row + jl] - 2.0 * c + u[row + jr]) * jh2;
        }
      }
      break;
    }
  }
}

double inner(const Grid& g, std::span<const double> a, std::span<const double> b) {
  const auto& w = g.weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += w[k] * a[k] * b[k];
  return acc;
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dirichlet_energy(const Field& f) {
  const Grid& g = f.grid;
  const auto& u = f.values;
  const std::size_t n = g.n();
  const double half_eps = 0.5 * f.epsilon;
  double acc = 0.0;
  switch (g.kind()) {
    case GridKind::interval:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (u[i + 1] - u[i]) / g.h();
        acc += g.h() * half_eps * d * d;
      }
      break;
    case GridKind::circle:
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (u[i + 1 == n ? 0 : i + 1] - u[i]) / g.h();
        acc += g.h() * half_eps * d * d;
      }
      break;
    case GridKind::torus: {
      const std::size_t n2 = g.n2();
      const double cell = g.h() * g.h2();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ir = (i + 1 == n ? 0 : i + 1) * n2;
        for (std::size_t j = 0; j < n2; ++j) {
          const std::size_t jr = j + 1 == n2 ? 0 : j + 1;
          const double c = u[i * n2 + j];
          const double d1 = (u[ir + j] - c) / g.h();
          const double d2 = (u[i * n2 + jr] - c) / g.h2();
          acc += cell * half_eps * (d1 * d1 + d2 * d2);
        }
      }
      break;
    }
  }
  return acc;
}

double energy(const Field& f, const Potential& p) {
  const auto& w = f.grid.weights();
  double pot = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) pot += w[k] * p.value(f.values[k]);
  return dirichlet_energy(f) + pot / f.epsilon;
}

Field gradient(const Field& f, const Potential& p) {
  Field out(f.grid, f.epsilon);
  laplacian(f.grid, f.values, out.values);
  const double eps = f.epsilon, ieps = 1.0 / eps;
  for (std::size_t k = 0; k < f.size(); ++k) out.values[k] = -eps * out.values[k] + ieps * p.d1(f.values[k]);
  if (f.grid.kind() == GridKind::interval) out.values.front() = out.values.back() = 0.0;
  return out;
}

double residual_norm(const Field& f, const Potential& p) { return max_norm(gradient(f, p).values); }

Field hessian_apply(const Field& f, const Field& direction, const Potential& p) {
  if (!(direction.grid == f.grid)) fail(ErrorCode::invalid_argument, "hessian_apply: grid mismatch");
  std::vector<double> phi = direction.values;
  if (f.grid.kind() == GridKind::interval) phi.front() = phi.back() = 0.0;
  Field out(f.grid, f.epsilon);
  laplacian(f.grid, phi, out.values);
  const double eps = f.epsilon, ieps = 1.0 / eps;
  for (std::size_t k = 0; k < f.size(); ++k)
    out.values[k] = -eps * out.values[k] + ieps * p.d2(f.values[k]) * phi[k];
  if (f.grid.kind() == GridKind::interval) out.values.front() = out.values.back() = 0.0;
  return out;
}

Field rotate(const Field& f, long steps) {
  if (!f.grid.periodic()) fail(ErrorCode::invalid_argument, "rotate needs a periodic grid");
  const long n = static_cast<long>(f.grid.n());
  const std::size_t n2 = f.grid.kind() == GridKind::torus ? f.grid.n2() : 1;
  Field out(f.grid, f.epsilon);
  for (long i = 0; i < n; ++i) {
    const long src = ((i - steps) % n + n) % n;
    std::copy_n(f.values.begin() + src * static_cast<long>(n2), n2,
                out.values.begin() + i * static_cast<long>(n2));
  }
  return out;
}

Field negated(const Field& f) {
  Field out = f;
  for (double& v : out.values) v = -v;
  return out;
}

Field truncated(const Field& f) {
  Field out = f;
  for (double& v : out.values) v = std::min(std::abs(v), 1.0);
  return out;
}

}  // namespace dwpt
