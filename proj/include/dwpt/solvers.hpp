#pragma once

#include <string>
#include <vector>

#include "dwpt/field.hpp"
#include "dwpt/potential.hpp"

namespace dwpt {

struct SolveConfig {
  double tol_grad = 1e-10;   // max-norm residual target
  int max_newton = 50;
  long max_flow_steps = 100000;
  double flow_dt = 0.0;      // 0 selects eps * h
  double damping = 0.5;      // backtracking factor
  // A Newton solve only counts as converged once the update has also
  // settled; small residuals alone do not pin slow interface modes.
  double step_tol = 1e-4;
  double points_per_eps = kPointsPerEpsilon;

  void validate() const;
  nlohmann::json to_json() const;
  static SolveConfig from_json(const nlohmann::json& j);
};

struct StopRule {
  long max_steps = 100000;
  double residual_tol = 0.0;  // stop once the residual max-norm is at or below this
  long sample_every = 100;    // energy / nodal-angle sampling interval
};

struct FlowTrace {
  Field final_field;
  std::vector<long> steps;
  std::vector<double> energies;
  std::vector<std::vector<double>> angles;  // fiber nodal angles per sample
  long steps_taken = 0;
  double dt = 0.0;          // final step size
  int halvings = 0;
  bool reached_residual = false;
  double final_residual = 0.0;

  /// Largest change of any nodal angle between the first and last sample
  /// that have the same number of angles; -1 when no such pair exists.
  double angle_drift() const;
};

/// Semi-implicit gradient flow
///   (I + dt eps^-1 (-eps^2 Delta_h)) u^{n+1} = u^n - dt eps^-1 W'(u^n),
/// optionally projecting onto [0, 1] after each step. Energy increases larger
/// than 1e-8 after the first 10 steps are undone and the step halved.
FlowTrace gradient_flow(const Field& initial, const Potential& p, const SolveConfig& cfg,
                        const StopRule& stop, bool project_unit_interval = false);

enum class NewtonFailure { none, singular_jacobian, diverged, stalled };
std::string to_string(NewtonFailure f);

struct NewtonResult {
  Field field;
  bool converged = false;
  NewtonFailure failure = NewtonFailure::none;
  int iterations = 0;
  std::vector<double> residuals;   // residual max-norm before each iteration and at exit
  std::vector<double> step_norms;  // accepted update max-norms
  double min_eigenvalue_estimate = 0.0;
  bool sign_free = false;          // converged to the zero field
  std::string message;

  nlohmann::json to_json() const;
};

/// Damped Newton on -eps Delta_h u + W'(u)/eps = 0. On periodic grids the
/// update is kept orthogonal to the rotation mode(s) of the current iterate.
NewtonResult newton_refine(const Field& initial, const Potential& p, const SolveConfig& cfg);

struct ModelSolution {
  enum class Status { positive, trivial_zero };
  Field field;
  Status status = Status::trivial_zero;
  double energy = 0.0;
  double zero_energy = 0.0;
  long flow_steps = 0;
  NewtonResult newton;

  double half_length() const { return field.grid.length(); }
  nlohmann::json to_json() const;
};
std::string to_string(ModelSolution::Status s);

/// Positive Dirichlet solution on the given interval grid: projected gradient
/// flow from the clamped sine bump, Newton refinement, then the energy
/// comparison against the zero field.
ModelSolution solve_dirichlet_model(const Grid& interval_grid, double eps, const Potential& p,
                                    const SolveConfig& cfg = {});
/// Same, on [-l, l] with a grid chosen from the resolution rule (n >= 129).
ModelSolution solve_dirichlet_model(double half_length, double eps, const Potential& p,
                                    const SolveConfig& cfg = {});

/// Number of interval points used by the (l, eps) overload.
std::size_t model_grid_points(double half_length, double eps, double points_per_eps = kPointsPerEpsilon);

struct ThresholdResult {
  double estimate = 0.0;
  double lower = 0.0;   // largest eps seen with a positive solution
  double upper = 0.0;   // smallest eps seen with the trivial solution
  int solves = 0;
  nlohmann::json to_json() const;
};

/// Bisection for the largest eps with a positive model solution, to
/// relative bracket width `rel_width`.
ThresholdResult existence_threshold(double half_length, const Potential& p, const SolveConfig& cfg = {},
                                    double rel_width = 1e-3);

/// Circle field made of `copies` odd reflections of a positive model
/// solution; copy k carries the sign (-1)^k and the nodal points are the glue
/// angles k * 2l. Requires copies even and copies * 2l = 2pi to 1e-12.
Field reflect_extend(const ModelSolution& m, int copies);

/// Model solution for m equal nodal intervals on an n-point circle, reflected
/// and Newton-refined. n must be divisible by m.
struct CircleSolution {
  Field field;
  ModelSolution model;
  NewtonResult newton;
};
CircleSolution build_circle(int m, double eps, std::size_t n, const Potential& p, const SolveConfig& cfg = {});

}  // namespace dwpt
