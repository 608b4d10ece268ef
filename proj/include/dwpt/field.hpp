#pragma once

#include <span>
#include <vector>

#include "dwpt/grid.hpp"
#include "dwpt/potential.hpp"

namespace dwpt {

/// Samples of a scalar function on a grid, tagged with the phase-transition
/// width parameter epsilon it belongs to.
struct Field {
  Grid grid;
  std::vector<double> values;
  double epsilon = 1.0;

  Field() = default;
  Field(Grid g, double eps);                          // zero-initialised
  Field(Grid g, std::vector<double> v, double eps);   // size-checked

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

// Discrete operators. The energy uses forward differences on every grid edge,
// so the L2 gradient below is exactly its first variation and the 3-point
// (5-point on the torus) Laplacian is its second-order stencil.

/// out = Delta_h u. Dirichlet boundary rows of interval grids are set to 0.
void laplacian(const Grid& g, std::span<const double> u, std::span<double> out);

/// Quadrature inner product <a, b> with the grid's weights.
double inner(const Grid& g, std::span<const double> a, std::span<const double> b);

double max_norm(std::span<const double> v);

/// E_eps(u) = sum over edges of (eps/2)|D u|^2 + sum over points of w W(u) / eps.
double energy(const Field& f, const Potential& p);

/// Gradient term alone: sum over edges of (eps/2)|D u|^2.
double dirichlet_energy(const Field& f);

/// L2 gradient -eps Delta_h u + W'(u)/eps; zero on Dirichlet boundary rows.
Field gradient(const Field& f, const Potential& p);

/// max |gradient|, the residual of the discrete Euler-Lagrange equation.
double residual_norm(const Field& f, const Potential& p);

/// -eps Delta_h phi + W''(u) phi / eps. On interval grids the direction is
/// taken to vanish on the boundary (the eliminated Dirichlet unknowns).
Field hessian_apply(const Field& f, const Field& direction, const Potential& p);

/// Rotation along the S^1 fiber by a whole number of grid steps:
/// out(theta_i) = f(theta_{i - steps}).
Field rotate(const Field& f, long steps);

Field negated(const Field& f);

/// Pointwise min{|u|, 1}.
Field truncated(const Field& f);

/// Field whose value depends only on the fiber coordinate (constant along
/// the second torus direction).
template <class Fn>
Field sample_fiber(const Grid& g, double eps, Fn&& fn) {
  Field f(g, eps);
  const std::size_t n2 = g.kind() == GridKind::torus ? g.n2() : 1;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double v = fn(g.coord(i));
    for (std::size_t j = 0; j < n2; ++j) f.values[i * n2 + j] = v;
  }
  return f;
}

}  // namespace dwpt
