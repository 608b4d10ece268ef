#include "dwpt/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dwpt/error.hpp"
#include "dwpt/linalg.hpp"
#include "dwpt/nodal.hpp"

namespace dwpt {

namespace {

constexpr double kEnergySlack = 1e-8;
constexpr long kTransientSteps = 10;
constexpr double kMinDt = 1e-14;
constexpr double kMinLineSearchStep = 1.0 / (1 << 30);
constexpr double kZeroFieldMargin = 1e-8;
constexpr int kStagnationWindow = 5;
constexpr double kStagnationFactor = 0.5;
constexpr double kFlowStopResidual = 1e-6;
constexpr long kResidualCheckEvery = 10;
constexpr std::size_t kMinModelPoints = 129;

std::vector<double> sample_angles(const Field& u) {
  const NodalSet ns = extract_nodal_set(u);
  if (u.grid.kind() == GridKind::torus) return fiber_angles(ns, 4.0 * u.grid.h());
  return ns.coords();
}

// Normalised rotation modes of a periodic field: d/dtheta, and on the torus
// also d/dy when the field varies along the second factor.
std::vector<std::vector<double>> rotation_modes(const Field& u) {
  std::vector<std::vector<double>> modes;
  const Grid& g = u.grid;
  if (!g.periodic()) return modes;
  const std::size_t n = g.n();
  const std::size_t n2 = g.kind() == GridKind::torus ? g.n2() : 1;
  auto at = [&](std::size_t i, std::size_t j) { return u.values[i * n2 + j]; };
  auto push_if_significant = [&](std::vector<double> t, double threshold) {
    const double m = max_norm(t);
    if (m <= threshold) return;
    for (double& v : t) v /= m;
    modes.push_back(std::move(t));
  };

  std::vector<double> t1(u.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1, r = i + 1 == n ? 0 : i + 1;
    for (std::size_t j = 0; j < n2; ++j) t1[i * n2 + j] = (at(r, j) - at(l, j)) / (2.0 * g.h());
  }
  push_if_significant(std::move(t1), 1e-8);

  if (g.kind() == GridKind::torus) {
    std::vector<double> t2(u.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        t2[i * n2 + j] = (at(i, j + 1 == n2 ? 0 : j + 1) - at(i, j == 0 ? n2 - 1 : j - 1)) / (2.0 * g.h2());
    push_if_significant(std::move(t2), 1e-6);
  }
  return modes;
}

double rayleigh_estimate(const Field& u, const Potential& p, const std::vector<std::vector<double>>& modes) {
  Field dir(u.grid, u.epsilon);
  if (!modes.empty()) dir.values = modes.front();
  else std::fill(dir.values.begin(), dir.values.end(), 1.0);
  const Field hd = hessian_apply(u, dir, p);
  const double num = inner(u.grid, dir.values, hd.values);
  const double den = inner(u.grid, dir.values, dir.values);
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

void SolveConfig::validate() const {
  if (!(tol_grad >= 1e-13)) fail(ErrorCode::invalid_argument, "tol_grad must be >= 1e-13");
  if (max_newton <= 0 || max_flow_steps <= 0) fail(ErrorCode::invalid_argument, "iteration limits must be positive");
  if (flow_dt < 0.0) fail(ErrorCode::invalid_argument, "flow_dt must be positive (or 0 for eps*h)");
  if (!(damping > 0.0 && damping < 1.0)) fail(ErrorCode::invalid_argument, "damping must lie in (0, 1)");
  if (!(step_tol > 0.0) || !(points_per_eps > 0.0)) fail(ErrorCode::invalid_argument, "tolerances must be positive");
}

nlohmann::json SolveConfig::to_json() const {
  return {{"tol_grad", tol_grad},       {"max_newton", max_newton}, {"max_flow_steps", max_flow_steps},
          {"flow_dt", flow_dt},         {"damping", damping},       {"step_tol", step_tol},
          {"points_per_eps", points_per_eps}};
}

SolveConfig SolveConfig::from_json(const nlohmann::json& j) {
  SolveConfig c;
  c.tol_grad = j.value("tol_grad", c.tol_grad);
  c.max_newton = j.value("max_newton", c.max_newton);
  c.max_flow_steps = j.value("max_flow_steps", c.max_flow_steps);
  c.flow_dt = j.value("flow_dt", c.flow_dt);
  c.damping = j.value("damping", c.damping);
  c.step_tol = j.value("step_tol", c.step_tol);
  c.points_per_eps = j.value("points_per_eps", c.points_per_eps);
  c.validate();
  return c;
}

double FlowTrace::angle_drift() const {
  if (angles.size() < 2) return -1.0;
  const auto& first = angles.front();
  for (auto it = angles.rbegin(); it != angles.rend(); ++it) {
    if (it->size() != first.size() || first.empty()) continue;
    double worst = 0.0;
    for (double a : first) {
      double best = kTwoPi;
      for (double b : *it) best = std::min(best, circle_distance(a, b, final_field.grid.length()));
      worst = std::max(worst, best);
    }
    return worst;
  }
  return -1.0;
}

FlowTrace gradient_flow(const Field& initial, const Potential& p, const SolveConfig& cfg, const StopRule& stop,
                        bool project_unit_interval) {
  cfg.validate();
  const Grid& g = initial.grid;
  const double eps = initial.epsilon;
  FlowTrace trace{initial};
  Field& u = trace.final_field;

  double dt = cfg.flow_dt > 0.0 ? cfg.flow_dt : eps * g.h();
  auto solver = std::make_unique<ImplicitDiffusion>(g, dt * eps);
  double e = energy(u, p);
  const bool dirichlet = g.kind() == GridKind::interval;
  const long sample_every = std::max<long>(1, stop.sample_every);

  trace.steps.push_back(0);
  trace.energies.push_back(e);
  trace.angles.push_back(sample_angles(u));

  std::vector<double> next(u.size());
  long step = 0;
  while (step < stop.max_steps) {
    const double k = dt / eps;
    for (std::size_t i = 0; i < u.size(); ++i) next[i] = u.values[i] - k * p.d1(u.values[i]);
    if (dirichlet) {
      next.front() = u.values.front();
      next.back() = u.values.back();
    }
    solver->solve(next);
    if (project_unit_interval)
      for (double& v : next) v = std::clamp(v, 0.0, 1.0);

    Field candidate(g, next, eps);
    const double e_new = energy(candidate, p);
    if (step >= kTransientSteps && e_new > e + kEnergySlack) {
      dt *= 0.5;
      ++trace.halvings;
      if (dt < kMinDt) fail(ErrorCode::no_convergence, "gradient flow: step size collapsed below 1e-14");
      solver = std::make_unique<ImplicitDiffusion>(g, dt * eps);
      continue;
    }
    u.values.swap(candidate.values);
    e = e_new;
    ++step;

    if (step % sample_every == 0) {
      trace.steps.push_back(step);
      trace.energies.push_back(e);
      trace.angles.push_back(sample_angles(u));
    }
    if (stop.residual_tol > 0.0 && step % kResidualCheckEvery == 0) {
      const double r = residual_norm(u, p);
      if (r <= stop.residual_tol) {
        trace.reached_residual = true;
        break;
      }
    }
  }
  if (trace.steps.back() != step) {
    trace.steps.push_back(step);
    trace.energies.push_back(e);
    trace.angles.push_back(sample_angles(u));
  }
  trace.steps_taken = step;
  trace.dt = dt;
  trace.final_residual = residual_norm(u, p);
  if (stop.residual_tol > 0.0 && trace.final_residual <= stop.residual_tol) trace.reached_residual = true;
  return trace;
}

std::string to_string(NewtonFailure f) {
  switch (f) {
    case NewtonFailure::none: return "none";
    case NewtonFailure::singular_jacobian: return "singular_jacobian";
    case NewtonFailure::diverged: return "diverged";
    case NewtonFailure::stalled: return "stalled";
  }
  return "unknown";
}

nlohmann::json NewtonResult::to_json() const {
  nlohmann::json j = {{"converged", converged},   {"failure", to_string(failure)}, {"iterations", iterations},
                      {"residuals", residuals},   {"step_norms", step_norms},     {"sign_free", sign_free}};
  if (failure == NewtonFailure::singular_jacobian) j["min_eigenvalue_estimate"] = min_eigenvalue_estimate;
  if (!message.empty()) j["message"] = message;
  return j;
}

NewtonResult newton_refine(const Field& initial, const Potential& p, const SolveConfig& cfg) {
  cfg.validate();
  NewtonResult out{initial};
  Field& u = out.field;
  Field r = gradient(u, p);
  double res = max_norm(r.values);
  out.residuals.push_back(res);

  std::vector<double> rhs(u.size());
  for (int it = 0; it < cfg.max_newton; ++it) {
    const auto modes = rotation_modes(u);
    for (std::size_t k = 0; k < u.size(); ++k) rhs[k] = -r.values[k];
    LinearSolveInfo info;
    std::vector<double> delta = solve_jacobian(u, p, rhs, modes, info);
    if (!info.ok) {
      out.failure = NewtonFailure::singular_jacobian;
      out.min_eigenvalue_estimate = rayleigh_estimate(u, p, modes);
      std::ostringstream os;
      os << "Jacobian solve failed (" << info.message << "); Rayleigh estimate of the smallest eigenvalue "
         << out.min_eigenvalue_estimate;
      out.message = os.str();
      break;
    }
    const double step = max_norm(delta);
    if (res <= cfg.tol_grad && step <= cfg.step_tol) {
      out.converged = true;
      break;
    }

    double t = 1.0;
    bool accepted = false;
    Field trial = u;
    double res_trial = res;
    while (t >= kMinLineSearchStep) {
      for (std::size_t k = 0; k < u.size(); ++k) trial.values[k] = u.values[k] + t * delta[k];
      res_trial = residual_norm(trial, p);
      if (std::isfinite(res_trial) && (res_trial < res || res_trial <= cfg.tol_grad)) {
        accepted = true;
        break;
      }
      t *= cfg.damping;
    }
    if (!accepted) {
      out.failure = NewtonFailure::stalled;
      std::ostringstream os;
      os << "line search stalled at residual " << res << " (update norm " << step << ")";
      out.message = os.str();
      break;
    }
    u.values.swap(trial.values);
    res = res_trial;
    r = gradient(u, p);
    ++out.iterations;
    out.residuals.push_back(res);
    out.step_norms.push_back(t * step);
    if (out.iterations >= kStagnationWindow && res > cfg.tol_grad &&
        res > kStagnationFactor * out.residuals[out.residuals.size() - 1 - kStagnationWindow]) {
      out.failure = NewtonFailure::stalled;
      std::ostringstream os;
      os << "residual stagnated at " << res << " over " << kStagnationWindow << " iterations";
      out.message = os.str();
      break;
    }
  }
  if (!out.converged && out.failure == NewtonFailure::none) {
    out.failure = NewtonFailure::diverged;
    std::ostringstream os;
    os << "no convergence after " << cfg.max_newton << " Newton iterations, residual " << res;
    out.message = os.str();
  }
  out.sign_free = out.converged && max_norm(u.values) <= 1e-8;
  return out;
}

std::string to_string(ModelSolution::Status s) {
  return s == ModelSolution::Status::positive ? "positive" : "trivial_zero";
}

nlohmann::json ModelSolution::to_json() const {
  double peak = 0.0;
  for (double v : field.values) peak = std::max(peak, v);
  return {{"status", to_string(status)},
          {"half_length", half_length()},
          {"epsilon", field.epsilon},
          {"n", field.grid.n()},
          {"energy", energy},
          {"zero_energy", zero_energy},
          {"max_value", peak},
          {"flow_steps", flow_steps},
          {"initial_guess", "clamp(sin(pi (x + l) / (2 l)), 0, 1)"},
          {"newton", newton.to_json()}};
}

std::size_t model_grid_points(double half_length, double eps, double points_per_eps) {
  const double needed = std::ceil(2.0 * half_length * points_per_eps / eps) + 1.0;
  return std::max(kMinModelPoints, static_cast<std::size_t>(needed));
}

ModelSolution solve_dirichlet_model(const Grid& g, double eps, const Potential& p, const SolveConfig& cfg) {
  cfg.validate();
  if (g.kind() != GridKind::interval) fail(ErrorCode::invalid_argument, "model solutions live on interval grids");
  g.require_resolution(eps, cfg.points_per_eps);
  const double l = g.length();

  Field seed(g, eps);
  for (std::size_t i = 1; i + 1 < g.n(); ++i)
    seed.values[i] = std::clamp(std::sin(std::numbers::pi * (g.coord(i) + l) / (2.0 * l)), 0.0, 1.0);

  StopRule stop;
  stop.max_steps = cfg.max_flow_steps;
  stop.residual_tol = kFlowStopResidual;
  stop.sample_every = cfg.max_flow_steps;
  const FlowTrace flow = gradient_flow(seed, p, cfg, stop, /*project_unit_interval=*/true);

  ModelSolution m{flow.final_field};
  m.flow_steps = flow.steps_taken;
  m.newton = newton_refine(flow.final_field, p, cfg);
  if (!m.newton.converged) {
    std::ostringstream os;
    os << "model solution (l = " << l << ", eps = " << eps << ") did not converge: " << m.newton.message
       << "; residual trace:";
    for (double r : m.newton.residuals) os << ' ' << r;
    fail(ErrorCode::no_convergence, os.str());
  }
  m.field = m.newton.field;
  m.field.values.front() = m.field.values.back() = 0.0;
  m.energy = energy(m.field, p);
  m.zero_energy = energy(Field(g, eps), p);
  m.status = m.energy < m.zero_energy - kZeroFieldMargin ? ModelSolution::Status::positive
                                                         : ModelSolution::Status::trivial_zero;
  return m;
}

ModelSolution solve_dirichlet_model(double half_length, double eps, const Potential& p, const SolveConfig& cfg) {
  if (!(half_length > 0.0)) fail(ErrorCode::invalid_argument, "half-length must be positive");
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "epsilon must be positive");
  return solve_dirichlet_model(Grid::interval(model_grid_points(half_length, eps, cfg.points_per_eps), half_length),
                               eps, p, cfg);
}

nlohmann::json ThresholdResult::to_json() const {
  return {{"estimate", estimate}, {"lower", lower}, {"upper", upper}, {"solves", solves}};
}

ThresholdResult existence_threshold(double half_length, const Potential& p, const SolveConfig& cfg,
                                    double rel_width) {
  if (!(half_length > 0.0)) fail(ErrorCode::invalid_argument, "half-length must be positive");
  ThresholdResult out;
  auto positive = [&](double eps) {
    ++out.solves;
    return solve_dirichlet_model(half_length, eps, p, cfg).status == ModelSolution::Status::positive;
  };

  double lo = 0.0, hi = 0.0;
  double guess = 0.5 * half_length;
  if (positive(guess)) {
    lo = guess;
    hi = 2.0 * guess;
    while (positive(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6 * half_length) fail(ErrorCode::no_convergence, "existence threshold: no trivial regime found");
    }
  } else {
    hi = guess;
    lo = 0.5 * guess;
    while (!positive(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-3 * half_length) fail(ErrorCode::no_convergence, "existence threshold: no positive regime found");
    }
  }
  while (hi - lo > rel_width * lo) {
    const double mid = 0.5 * (lo + hi);
    if (positive(mid)) lo = mid;
    else hi = mid;
  }
  out.lower = lo;
  out.upper = hi;
  out.estimate = 0.5 * (lo + hi);
  return out;
}

Field reflect_extend(const ModelSolution& m, int copies) {
  if (copies < 2 || copies % 2 != 0) {
    std::ostringstream os;
    os << "reflect_extend needs an even number of copies >= 2, got " << copies
       << " (no such phase transition exists for odd m)";
    fail(ErrorCode::invalid_argument, os.str());
  }
  if (m.status != ModelSolution::Status::positive)
    fail(ErrorCode::precondition, "reflect_extend needs a positive model solution");
  const double l = m.half_length();
  if (std::abs(copies * 2.0 * l - kTwoPi) > 1e-12) {
    std::ostringstream os;
    os << "copies * 2l = " << copies * 2.0 * l << " does not match the circumference 2pi";
    fail(ErrorCode::precondition, os.str());
  }
  const std::size_t seg = m.field.grid.n() - 1;
  Field out(Grid::circle(seg * static_cast<std::size_t>(copies)), m.field.epsilon);
  for (int k = 0; k < copies; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < seg; ++j) out.values[static_cast<std::size_t>(k) * seg + j] = sign * m.field.values[j];
  }
  return out;
}

CircleSolution build_circle(int m, double eps, std::size_t n, const Potential& p, const SolveConfig& cfg) {
  if (m < 2 || m % 2 != 0) {
    std::ostringstream os;
    os << "m must be even and >= 2, got " << m << " (no such phase transition exists for odd m)";
    fail(ErrorCode::invalid_argument, os.str());
  }
  if (n % static_cast<std::size_t>(m) != 0) {
    std::ostringstream os;
    os << "grid size " << n << " is not divisible by m = " << m;
    fail(ErrorCode::invalid_argument, os.str());
  }
  Grid::circle(n).require_resolution(eps, cfg.points_per_eps);
  const double l = std::numbers::pi / m;
  const Grid interval = Grid::interval(n / static_cast<std::size_t>(m) + 1, l);
  CircleSolution out{Field(Grid::circle(n), eps), solve_dirichlet_model(interval, eps, p, cfg), NewtonResult{Field(Grid::circle(n), eps)}};
  if (out.model.status != ModelSolution::Status::positive) {
    std::ostringstream os;
    os << "no positive model solution on l = pi/" << m << " at eps = " << eps
       << " (eps lies above the existence threshold)";
    fail(ErrorCode::precondition, os.str());
  }
  out.newton = newton_refine(reflect_extend(out.model, m), p, cfg);
  out.field = out.newton.field;
  return out;
}

}  // namespace dwpt
