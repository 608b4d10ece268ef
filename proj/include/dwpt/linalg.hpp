#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dwpt/field.hpp"

namespace dwpt {

/// Thomas algorithm for a tridiagonal system; sub[0] and sup[n-1] unused.
/// Overwrites rhs with the solution. No pivoting: intended for diagonally
/// dominant matrices.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs);

/// Periodic tridiagonal system (corner entries sub[0] couples row 0 to n-1,
/// sup[n-1] couples row n-1 to 0), via Sherman-Morrison.
void solve_cyclic_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                              std::span<const double> sup, std::span<double> rhs);

/// Solver for (I - tau Delta_h) x = b on a grid. Interval boundary rows are
/// the identity, so Dirichlet values pass through unchanged.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(const Grid& g, double tau);
  ~ImplicitDiffusion();
  ImplicitDiffusion(ImplicitDiffusion&&) noexcept;
  ImplicitDiffusion& operator=(ImplicitDiffusion&&) noexcept;

  void solve(std::span<double> rhs_inout) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct LinearSolveInfo {
  bool ok = false;
  int iterations = 0;
  double relative_residual = 0.0;
  std::string message;
};

/// Solves J x = b for the Newton Jacobian J = -eps Delta_h + W''(u)/eps,
/// bordered by the given constraint vectors:
///   [J  T][x]   [b]
///   [T' 0][l] = [0]
/// so x is orthogonal to every border vector. Banded direct factorisation on
/// 1-D grids, preconditioned MINRES on the torus. Interval boundary rows are
/// identity rows.
std::vector<double> solve_jacobian(const Field& u, const Potential& p, std::span<const double> rhs,
                                   const std::vector<std::vector<double>>& border,
                                   LinearSolveInfo& info, double iterative_tol = 1e-12,
                                   int max_iterations = 20000);

}  // namespace dwpt
