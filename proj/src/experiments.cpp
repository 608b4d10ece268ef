#include "dwpt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "dwpt/error.hpp"
#include "dwpt/nodal.hpp"

namespace dwpt {

nlohmann::json Assertion::to_json() const {
  nlohmann::json j = {{"name", name}, {"pass", pass}, {"measured", measured}, {"tolerance", tolerance}};
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

bool ExperimentReport::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

const Assertion* ExperimentReport::find(const std::string& name) const {
  for (const auto& a : assertions)
    if (a.name == name) return &a;
  return nullptr;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : assertions) a.push_back(x.to_json());
  return {{"format_version", 1}, {"experiment", id},          {"config", config},
          {"measurements", measurements}, {"assertions", a}, {"pass", pass()}};
}

// ---------------------------------------------------------------------------

IndexSet fiber_index_set(const Grid& g, double lo, double hi) {
  if (!(hi >= lo)) fail(ErrorCode::invalid_argument, "fiber_index_set: empty coordinate range");
  const std::size_t n2 = g.kind() == GridKind::torus ? g.n2() : 1;
  constexpr double slack = 1e-12;
  IndexSet out;
  for (std::size_t i = 0; i < g.n(); ++i) {
    double theta = g.coord(i);
    if (g.periodic()) {
      const double L = g.length();
      theta += L * std::ceil((lo - slack - theta) / L);
    }
    if (theta < lo - slack || theta > hi + slack) continue;
    for (std::size_t j = 0; j < n2; ++j) out.push_back(i * n2 + j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

IndexSet boundary_of(const Grid& g, const IndexSet& set) {
  std::vector<char> member(g.size(), 0);
  for (std::size_t k : set) {
    if (k >= g.size()) fail(ErrorCode::invalid_argument, "index set exceeds the grid");
    member[k] = 1;
  }
  const std::size_t n = g.n();
  const std::size_t n2 = g.kind() == GridKind::torus ? g.n2() : 1;
  IndexSet out;
  for (std::size_t k : set) {
    const std::size_t i = k / n2, j = k % n2;
    bool edge = false;
    if (g.kind() == GridKind::interval) {
      edge = i == 0 || i + 1 == n || !member[i - 1] || !member[i + 1];
    } else {
      const std::size_t il = i == 0 ? n - 1 : i - 1, ir = i + 1 == n ? 0 : i + 1;
      edge = !member[il * n2 + j] || !member[ir * n2 + j];
      if (g.kind() == GridKind::torus) {
        const std::size_t jl = j == 0 ? n2 - 1 : j - 1, jr = j + 1 == n2 ? 0 : j + 1;
        edge = edge || !member[i * n2 + jl] || !member[i * n2 + jr];
      }
    }
    if (edge) out.push_back(k);
  }
  return out;
}

std::string to_string(ComparisonReport::Verdict v) {
  switch (v) {
    case ComparisonReport::Verdict::pass: return "pass";
    case ComparisonReport::Verdict::fail: return "fail";
    case ComparisonReport::Verdict::inapplicable: return "inapplicable";
  }
  return "unknown";
}

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json j = {{"verdict", to_string(verdict)}};
  if (verdict == Verdict::inapplicable) {
    j["reason"] = reason;
  } else {
    j["min_gap"] = min_gap;
    j["location"] = location;
    j["location_coord"] = location_coord;
    j["interior_points"] = interior_points;
  }
  return j;
}

ComparisonReport comparison_test(const Field& u, const Field& v, const IndexSet& domain, const Potential& p,
                                 double critical_tol, double boundary_tol) {
  ComparisonReport r;
  auto inapplicable = [&](std::string why) {
    r.verdict = ComparisonReport::Verdict::inapplicable;
    r.reason = std::move(why);
    return r;
  };
  if (!(u.grid == v.grid)) return inapplicable("fields live on different grids");
  if (u.epsilon != v.epsilon) return inapplicable("fields were solved at different epsilon");
  if (domain.empty()) return inapplicable("empty domain");
  for (std::size_t k : domain)
    if (k >= u.size()) return inapplicable("domain index outside the grid");

  const IndexSet boundary = boundary_of(u.grid, domain);
  IndexSet interior;
  std::set_difference(domain.begin(), domain.end(), boundary.begin(), boundary.end(), std::back_inserter(interior));
  if (interior.empty()) return inapplicable("domain has no interior points");

  const Field gu = gradient(u, p), gv = gradient(v, p);
  double ru = 0.0, rv = 0.0;
  for (std::size_t k : interior) {
    ru = std::max(ru, std::abs(gu.values[k]));
    rv = std::max(rv, std::abs(gv.values[k]));
  }
  std::ostringstream os;
  if (ru > critical_tol || rv > critical_tol) {
    os << "not critical on the domain interior (residuals " << ru << ", " << rv << " > " << critical_tol << ")";
    return inapplicable(os.str());
  }
  for (std::size_t k : domain)
    if (!(u.values[k] > 0.0)) {
      os << "u is not positive on the domain (u = " << u.values[k] << " at index " << k << ")";
      return inapplicable(os.str());
    }
  for (std::size_t k : boundary)
    if (std::abs(v.values[k]) > boundary_tol) {
      os << "v does not vanish on the domain boundary (|v| = " << std::abs(v.values[k]) << " at index " << k << ")";
      return inapplicable(os.str());
    }

  r.min_gap = std::numeric_limits<double>::infinity();
  const std::size_t n2 = u.grid.kind() == GridKind::torus ? u.grid.n2() : 1;
  for (std::size_t k : interior) {
    const double gap = u.values[k] - v.values[k];
    if (gap < r.min_gap) {
      r.min_gap = gap;
      r.location = k;
    }
  }
  r.location_coord = u.grid.coord(r.location / n2);
  r.interior_points = interior.size();
  r.verdict = r.min_gap > 0.0 ? ComparisonReport::Verdict::pass : ComparisonReport::Verdict::fail;
  return r;
}

// ---------------------------------------------------------------------------

std::string to_string(BarrierKind k) { return k == BarrierKind::two_sided ? "two_sided" : "left_reflected"; }

BarrierKind barrier_kind_from_string(const std::string& s) {
  if (s == "two_sided" || s == "two_sided_theta2") return BarrierKind::two_sided;
  if (s == "left_reflected") return BarrierKind::left_reflected;
  fail(ErrorCode::invalid_argument, "unknown barrier kind '" + s + "'");
}

namespace {

constexpr double kBarrierRefinement = 4.0;  // model spacing = target spacing / this

// Linear interpolation of the model profile on [-l, l].
double model_at(const Field& model, double x) {
  const Grid& g = model.grid;
  const double l = g.length();
  if (x <= -l || x >= l) return 0.0;
  const double s = (x + l) / g.h();
  const std::size_t i = std::min(static_cast<std::size_t>(s), g.n() - 2);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * model.values[i] + t * model.values[i + 1];
}

}  // namespace

double Barrier::value(double theta) const {
  const Field& m = model.field;
  const double t = theta - center;
  if (kind == BarrierKind::two_sided) {
    const double l = length;
    if (std::abs(t) <= l) return model_at(m, t);
    if (t > l && t <= 3.0 * l) return -model_at(m, 2.0 * l - t);
    if (t < -l && t >= -3.0 * l) return -model_at(m, -2.0 * l - t);
    return 0.0;
  }
  const double half = 0.5 * length;
  if (t >= 0.0 && t <= length) return model_at(m, t - half);
  if (t < 0.0 && t >= -length) return -model_at(m, -t - half);
  return 0.0;
}

nlohmann::json Barrier::to_json() const {
  return {{"kind", to_string(kind)},         {"center", center},       {"length", length},
          {"epsilon", epsilon},              {"domain", {domain_lo, domain_hi}},
          {"domain_points", domain.size()},  {"model_half_length", model.half_length()},
          {"model_energy", model.energy},    {"model_status", to_string(model.status)}};
}

Barrier build_barrier(BarrierKind kind, double center, double length, double eps, const Potential& p,
                      const Grid& target, const SolveConfig& cfg) {
  if (!target.periodic()) fail(ErrorCode::invalid_argument, "barriers are placed on circle or torus grids");
  if (!(length > 0.0) || !(eps > 0.0)) fail(ErrorCode::invalid_argument, "barrier length and epsilon must be positive");
  target.require_resolution(eps, cfg.points_per_eps);

  Barrier b;
  b.kind = kind;
  b.center = center;
  b.length = length;
  b.epsilon = eps;
  const double half = kind == BarrierKind::two_sided ? length : 0.5 * length;
  const double reach = kind == BarrierKind::two_sided ? 3.0 * length : length;
  b.domain_lo = center - reach;
  b.domain_hi = center + reach;
  if (b.domain_hi - b.domain_lo >= target.length() - target.h()) {
    std::ostringstream os;
    os << "reflected barrier pieces overlap: support " << b.domain_hi - b.domain_lo << " does not fit in circumference "
       << target.length();
    fail(ErrorCode::precondition, os.str());
  }

  const auto fine = static_cast<std::size_t>(std::ceil(2.0 * half * kBarrierRefinement / target.h())) + 1;
  std::size_t points = std::max(model_grid_points(half, eps, cfg.points_per_eps), fine);
  if (points % 2 == 0) ++points;
  b.model = solve_dirichlet_model(Grid::interval(points, half), eps, p, cfg);
  if (b.model.status != ModelSolution::Status::positive) {
    std::ostringstream os;
    os << "no positive model solution with half-length " << half << " at eps = " << eps
       << " (existence needs eps below about " << 2.0 * half / std::numbers::pi << ")";
    fail(ErrorCode::precondition, os.str());
  }

  b.domain = fiber_index_set(target, b.domain_lo, b.domain_hi);
  b.field = Field(target, eps);
  const std::size_t n2 = target.kind() == GridKind::torus ? target.n2() : 1;
  const double L = target.length();
  for (std::size_t k : b.domain) {
    double theta = target.coord(k / n2);
    theta += L * std::ceil((b.domain_lo - 1e-12 - theta) / L);
    b.field.values[k] = b.value(theta);
  }
  return b;
}

nlohmann::json SlideReport::to_json() const {
  nlohmann::json j = {{"touched", touched},     {"steps", steps},
                      {"step_size", step_size}, {"initial_min_gap", initial_min_gap},
                      {"max_offset", max_offset}};
  if (touched) {
    j["offset"] = offset;
    j["touch_coord"] = touch_coord;
    j["touch_coord2"] = touch_coord2;
    j["boundary_distance"] = boundary_distance;
    j["interior"] = interior;
  }
  return j;
}

SlideReport slide_to_touch(const Field& u, const Barrier& b, int direction, double max_offset, Orientation orientation) {
  const Grid& g = u.grid;
  if (!(g == b.field.grid)) fail(ErrorCode::invalid_argument, "slide_to_touch: barrier and field grids differ");
  if (direction != 1 && direction != -1) fail(ErrorCode::invalid_argument, "slide direction must be +1 or -1");
  if (!(max_offset >= 0.0)) fail(ErrorCode::invalid_argument, "max_offset must be non-negative");

  const std::size_t n2 = g.kind() == GridKind::torus ? g.n2() : 1;
  const double h = g.h(), L = g.length();
  const double sign = orientation == Orientation::barrier_above ? 1.0 : -1.0;

  SlideReport r;
  r.step_size = h;
  r.max_offset = max_offset;
  for (long k = 0;; ++k) {
    const double s = static_cast<double>(k) * h;
    if (s > max_offset + 1e-12) break;
    const double lo = b.domain_lo + direction * s, hi = b.domain_hi + direction * s;
    double worst = std::numeric_limits<double>::infinity();
    double worst_theta = 0.0;
    std::size_t worst_index = 0;
    for (std::size_t i = 0; i < g.n(); ++i) {
      double theta = g.coord(i);
      theta += L * std::ceil((lo - 1e-12 - theta) / L);
      if (theta > hi + 1e-12) continue;
      const double bv = b.value(theta - direction * s);
      for (std::size_t j = 0; j < n2; ++j) {
        const double gap = sign * (bv - u.values[i * n2 + j]);
        if (gap < worst) {
          worst = gap;
          worst_theta = theta;
          worst_index = i * n2 + j;
        }
      }
    }
    if (k == 0) {
      r.initial_min_gap = worst;
      if (!(worst > 0.0)) {
        std::ostringstream os;
        os << "slide_to_touch: ordering is not strict at offset 0 (min gap " << worst << ")";
        fail(ErrorCode::precondition, os.str());
      }
      continue;
    }
    if (worst <= 0.0) {
      r.touched = true;
      r.steps = k;
      r.offset = s;
      r.touch_coord = wrap_angle(worst_theta, L);
      r.touch_coord2 = g.kind() == GridKind::torus ? g.coord2(worst_index % n2) : 0.0;
      r.boundary_distance = std::min(worst_theta - lo, hi - worst_theta);
      r.interior = r.boundary_distance >= h - 1e-9;
      return r;
    }
    r.steps = k;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Configuration

std::vector<std::uint64_t> default_seeds(std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = i + 1;
  return s;
}

namespace {

SolveConfig solver_from(const nlohmann::json& j) {
  return j.contains("solver") ? SolveConfig::from_json(j.at("solver")) : SolveConfig{};
}

void require_nonempty(const std::vector<double>& eps, const char* what) {
  if (eps.empty()) fail(ErrorCode::invalid_argument, std::string(what) + ": epsilon list is empty");
  for (double e : eps)
    if (!(e > 0.0)) fail(ErrorCode::invalid_argument, std::string(what) + ": epsilon must be positive");
}

}  // namespace

nlohmann::json TwoInterfaceConfig::to_json() const {
  return {{"epsilons", epsilons},       {"seeds", seeds},           {"n", n},
          {"phi_min", phi_min},         {"phi_max", phi_max},       {"negate", negate},
          {"include_control", include_control},                     {"flow_steps", flow_steps},
          {"flow_residual", flow_residual},                         {"antipodal_tol", antipodal_tol},
          {"symmetry_tol", symmetry_tol},                           {"solver", solver.to_json()}};
}

TwoInterfaceConfig TwoInterfaceConfig::from_json(const nlohmann::json& j) {
  TwoInterfaceConfig c;
  c.epsilons = j.value("epsilons", c.epsilons);
  c.seeds = j.value("seeds", c.seeds);
  c.n = j.value("n", c.n);
  c.phi_min = j.value("phi_min", c.phi_min);
  c.phi_max = j.value("phi_max", c.phi_max);
  c.negate = j.value("negate", c.negate);
  c.include_control = j.value("include_control", c.include_control);
  c.flow_steps = j.value("flow_steps", c.flow_steps);
  c.flow_residual = j.value("flow_residual", c.flow_residual);
  c.antipodal_tol = j.value("antipodal_tol", c.antipodal_tol);
  c.symmetry_tol = j.value("symmetry_tol", c.symmetry_tol);
  c.solver = solver_from(j);
  return c;
}

void RigidityConfig::validate() const {
  if (m % 2 != 0)
    fail(ErrorCode::invalid_argument,
         "m = " + std::to_string(m) + " is odd: equally spaced sign-alternating nodal sets need an even m");
  if (m < 4) fail(ErrorCode::invalid_argument, "m-rigidity needs an even m >= 4 (m = 2 is the two-interface experiment)");
  if (!circle && !torus) fail(ErrorCode::invalid_argument, "m-rigidity: enable the circle, the torus, or both");
  if (circle && circle_n % static_cast<std::size_t>(m) != 0)
    fail(ErrorCode::invalid_argument, "circle grid size must be divisible by m");
  if (torus && torus_n % static_cast<std::size_t>(m) != 0)
    fail(ErrorCode::invalid_argument, "torus fiber grid size must be divisible by m");
  if (!(perturbation >= 0.0) || !(torus_noise >= 0.0))
    fail(ErrorCode::invalid_argument, "perturbation and noise amplitudes must be non-negative");
  require_nonempty(epsilons, "m-rigidity");
}

nlohmann::json RigidityConfig::to_json() const {
  return {{"m", m},
          {"epsilons", epsilons},
          {"seeds", seeds},
          {"perturbation", perturbation},
          {"circle", circle},
          {"torus", torus},
          {"include_control", include_control},
          {"circle_n", circle_n},
          {"torus_n", torus_n},
          {"torus_n2", torus_n2},
          {"torus_noise", torus_noise},
          {"torus_points_per_eps", torus_points_per_eps},
          {"circle_flow_steps", circle_flow_steps},
          {"torus_flow_steps", torus_flow_steps},
          {"flow_residual", flow_residual},
          {"congruence_tol", congruence_tol},
          {"symmetry_tol", symmetry_tol},
          {"solver", solver.to_json()}};
}

RigidityConfig RigidityConfig::from_json(const nlohmann::json& j) {
  RigidityConfig c;
  c.m = j.value("m", c.m);
  c.epsilons = j.value("epsilons", c.epsilons);
  c.seeds = j.value("seeds", c.seeds);
  c.perturbation = j.value("perturbation", c.perturbation);
  c.circle = j.value("circle", c.circle);
  c.torus = j.value("torus", c.torus);
  c.include_control = j.value("include_control", c.include_control);
  c.circle_n = j.value("circle_n", c.circle_n);
  c.torus_n = j.value("torus_n", c.torus_n);
  c.torus_n2 = j.value("torus_n2", c.torus_n2);
  c.torus_noise = j.value("torus_noise", c.torus_noise);
  c.torus_points_per_eps = j.value("torus_points_per_eps", c.torus_points_per_eps);
  c.circle_flow_steps = j.value("circle_flow_steps", c.circle_flow_steps);
  c.torus_flow_steps = j.value("torus_flow_steps", c.torus_flow_steps);
  c.flow_residual = j.value("flow_residual", c.flow_residual);
  c.congruence_tol = j.value("congruence_tol", c.congruence_tol);
  c.symmetry_tol = j.value("symmetry_tol", c.symmetry_tol);
  c.solver = solver_from(j);
  return c;
}

nlohmann::json DecayConfig::to_json() const {
  return {{"epsilons", epsilons}, {"n", n}, {"rate_band", rate_band}, {"solver", solver.to_json()}};
}

DecayConfig DecayConfig::from_json(const nlohmann::json& j) {
  DecayConfig c;
  c.epsilons = j.value("epsilons", c.epsilons);
  c.n = j.value("n", c.n);
  c.rate_band = j.value("rate_band", c.rate_band);
  c.solver = solver_from(j);
  return c;
}

nlohmann::json ComparisonConfig::to_json() const {
  return {{"epsilon", epsilon},
          {"outer_half_length", outer_half_length},
          {"inner_half_length", inner_half_length},
          {"n", n},
          {"solver", solver.to_json()}};
}

ComparisonConfig ComparisonConfig::from_json(const nlohmann::json& j) {
  ComparisonConfig c;
  c.epsilon = j.value("epsilon", c.epsilon);
  c.outer_half_length = j.value("outer_half_length", c.outer_half_length);
  c.inner_half_length = j.value("inner_half_length", c.inner_half_length);
  c.n = j.value("n", c.n);
  c.solver = solver_from(j);
  return c;
}

nlohmann::json SlideConfig::to_json() const {
  return {{"m", m},
          {"epsilon", epsilon},
          {"n", n},
          {"delta_fractions", delta_fractions},
          {"center_shift", center_shift},
          {"solver", solver.to_json()}};
}

SlideConfig SlideConfig::from_json(const nlohmann::json& j) {
  SlideConfig c;
  c.m = j.value("m", c.m);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.n = j.value("n", c.n);
  c.delta_fractions = j.value("delta_fractions", c.delta_fractions);
  c.center_shift = j.value("center_shift", c.center_shift);
  c.solver = solver_from(j);
  return c;
}

// ---------------------------------------------------------------------------
// Shared pieces

Field glued_profile(const Grid& g, double eps, std::vector<double> angles) {
  if (!g.periodic()) fail(ErrorCode::invalid_argument, "glued_profile needs a periodic grid");
  if (angles.empty()) fail(ErrorCode::invalid_argument, "glued_profile needs at least one angle");
  const double L = g.length();
  for (double& a : angles) a = wrap_angle(a, L);
  std::sort(angles.begin(), angles.end());
  const double width = std::sqrt(2.0) * eps;
  const std::size_t m = angles.size();
  return sample_fiber(g, eps, [&](double x) {
    // arc k runs from angles[k] to angles[k + 1] (wrapping)
    double lifted = x < angles.front() ? x + L : x;
    std::size_t k = m - 1;
    for (std::size_t a = 0; a + 1 < m; ++a)
      if (lifted >= angles[a] && lifted < angles[a + 1]) k = a;
    const double start = angles[k];
    const double end = k + 1 < m ? angles[k + 1] : angles.front() + L;
    const double sgn = k % 2 == 0 ? 1.0 : -1.0;
    return sgn * std::tanh(std::min(lifted - start, end - lifted) / width);
  });
}

namespace {

// Runs f(i) for i in [0, count) on a small worker pool; results are written to
// caller-owned slots, so the merge order never depends on scheduling.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max<std::size_t>(1, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string eps_tag(double eps) {
  std::ostringstream os;
  os << "eps=" << eps;
  return os.str();
}

// Checks every converged critical point has to satisfy, whatever the experiment.
struct CriticalPointChecks {
  std::size_t nodal_count = 0;
  std::vector<double> angles;
  bool alternates = true;
  std::vector<int> arc_signs;
  double odd_defect = 0.0, even_defect = 0.0;
  double residual = 0.0;
};

CriticalPointChecks inspect(const Field& f, const Potential& p) {
  CriticalPointChecks c;
  const NodalSet ns = extract_nodal_set(f);
  const bool torus = f.grid.kind() == GridKind::torus;
  c.angles = torus ? fiber_angles(ns, 4.0 * f.grid.h()) : ns.coords();
  c.nodal_count = c.angles.size();
  c.residual = residual_norm(f, p);
  if (c.nodal_count >= 2) {
    const AlternationReport alt = torus ? check_alternation(f) : check_alternation(f, ns);
    c.alternates = alt.alternates;
    c.arc_signs = alt.arc_signs;
    const Field slice = torus ? fiber_slice(f, 0) : f;
    const LocalSymmetryReport ls = check_local_symmetries(slice, extract_nodal_set(slice));
    c.odd_defect = ls.odd_defect;
    c.even_defect = ls.even_defect;
  }
  return c;
}

nlohmann::json checks_json(const CriticalPointChecks& c) {
  return {{"nodal_count", c.nodal_count}, {"angles", c.angles},           {"alternates", c.alternates},
          {"arc_signs", c.arc_signs},     {"odd_defect", c.odd_defect}, {"even_defect", c.even_defect},
          {"residual", c.residual}};
}

// Aggregates over all converged critical points of an experiment.
struct InvariantTally {
  std::size_t converged = 0;
  std::size_t non_alternating = 0;
  std::size_t odd_count = 0;
  double worst_symmetry = 0.0;
  double worst_residual = 0.0;

  void add(const CriticalPointChecks& c) {
    ++converged;
    if (c.nodal_count >= 2 && !c.alternates) ++non_alternating;
    if (c.nodal_count % 2 != 0) ++odd_count;
    worst_symmetry = std::max({worst_symmetry, c.odd_defect, c.even_defect});
    worst_residual = std::max(worst_residual, c.residual);
  }

  void emit(ExperimentReport& r, const std::string& prefix, double symmetry_tol, double residual_tol) const {
    const std::string note = std::to_string(converged) + " converged critical points";
    r.assertions.push_back({prefix + ".alternation", non_alternating == 0, static_cast<double>(non_alternating), 0.0,
                            note});
    r.assertions.push_back({prefix + ".even_nodal_count", odd_count == 0, static_cast<double>(odd_count), 0.0, note});
    r.assertions.push_back(
        {prefix + ".local_symmetry", worst_symmetry <= symmetry_tol, worst_symmetry, symmetry_tol, note});
    r.assertions.push_back({prefix + ".residual", worst_residual <= residual_tol, worst_residual, residual_tol, note});
  }
};

FlowTrace flow_then(const Field& seed, const Potential& p, const SolveConfig& cfg, long steps, double residual) {
  StopRule stop;
  stop.max_steps = steps;
  stop.residual_tol = residual;
  stop.sample_every = std::max<long>(1, steps / 20);
  return gradient_flow(seed, p, cfg, stop);
}

}  // namespace

// ---------------------------------------------------------------------------
// Two interfaces

ExperimentReport experiment_two_interface(const TwoInterfaceConfig& cfg, const Potential& p) {
  require_nonempty(cfg.epsilons, "two-interface");
  if (!(cfg.phi_min > 0.0 && cfg.phi_max > cfg.phi_min && cfg.phi_max < kTwoPi))
    fail(ErrorCode::invalid_argument, "two-interface: need 0 < phi_min < phi_max < 2 pi");
  cfg.solver.validate();
  const Grid g = Grid::circle(cfg.n);
  for (double eps : cfg.epsilons) g.require_resolution(eps, cfg.solver.points_per_eps);

  struct Run {
    std::uint64_t seed = 0;
    bool control = false;
    double eps = 0.0, phi = 0.0;
    FlowTrace flow;
    NewtonResult newton;
    CriticalPointChecks checks;
  };
  std::vector<Run> runs;
  for (double eps : cfg.epsilons) {
    if (cfg.include_control) runs.push_back({0, true, eps, std::numbers::pi});
    for (std::uint64_t seed : cfg.seeds) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> phi(cfg.phi_min, cfg.phi_max);
      runs.push_back({seed, false, eps, phi(rng)});
    }
  }

  parallel_for(runs.size(), [&](std::size_t i) {
    Run& r = runs[i];
    Field seed = glued_profile(g, r.eps, {0.0, r.phi});
    if (cfg.negate) seed = negated(seed);
    r.flow = flow_then(seed, p, cfg.solver, cfg.flow_steps, cfg.flow_residual);
    r.newton = newton_refine(r.flow.final_field, p, cfg.solver);
    if (r.newton.converged) r.checks = inspect(r.newton.field, p);
  });

  ExperimentReport rep;
  rep.id = "two-interface";
  rep.config = cfg.to_json();
  rep.config["potential"] = p.to_json();
  rep.table.header = {"seed", "epsilon", "phi", "outcome", "nodal_count", "antipodal_error", "residual"};

  InvariantTally tally;
  double worst_antipodal = 0.0;
  std::size_t two_nodal = 0;
  nlohmann::json per_eps = nlohmann::json::object();
  nlohmann::json list = nlohmann::json::array();
  std::vector<Assertion> controls;
  for (const Run& r : runs) {
    std::string outcome = "non_converged";
    double antipodal = -1.0;
    if (r.newton.converged) {
      tally.add(r.checks);
      if (r.checks.nodal_count == 2) {
        outcome = "converged";
        antipodal = std::abs(circle_distance(r.checks.angles[0], r.checks.angles[1]) - std::numbers::pi);
        worst_antipodal = std::max(worst_antipodal, antipodal);
        ++two_nodal;
      } else {
        outcome = "escaped";
      }
    }
    auto& bucket = per_eps[eps_tag(r.eps)];
    bucket[outcome] = (bucket.contains(outcome) ? bucket[outcome].get<int>() : 0) + 1;

    nlohmann::json j = {{"seed", r.seed},
                        {"control", r.control},
                        {"epsilon", r.eps},
                        {"phi", r.phi},
                        {"outcome", outcome},
                        {"flow_steps", r.flow.steps_taken},
                        {"flow_residual", r.flow.final_residual},
                        {"newton", r.newton.to_json()}};
    if (r.newton.converged) j["critical_point"] = checks_json(r.checks);
    if (antipodal >= 0.0) j["antipodal_error"] = antipodal;
    list.push_back(std::move(j));
    rep.table.rows.push_back({r.control ? "control" : std::to_string(r.seed), fmt(r.eps), fmt(r.phi), outcome,
                              std::to_string(r.checks.nodal_count), antipodal >= 0.0 ? fmt(antipodal) : "",
                              fmt(r.newton.residuals.back())});
    if (r.control)
      controls.push_back({"two_interface.control_converges[" + eps_tag(r.eps) + "]", outcome == "converged",
                          antipodal, cfg.antipodal_tol, "seed angles {0, pi}"});
  }
  rep.measurements = {{"runs", list}, {"outcomes", per_eps}, {"converged_two_nodal", two_nodal}};

  rep.assertions.push_back({"two_interface.antipodal", worst_antipodal <= cfg.antipodal_tol, worst_antipodal,
                            cfg.antipodal_tol, std::to_string(two_nodal) + " converged 2-nodal critical points"});
  tally.emit(rep, "two_interface", cfg.symmetry_tol, cfg.solver.tol_grad);
  for (auto& c : controls) rep.assertions.push_back(std::move(c));
  return rep;
}

// ---------------------------------------------------------------------------
// m interfaces

ExperimentReport experiment_m_rigidity(const RigidityConfig& cfg, const Potential& p) {
  cfg.validate();
  cfg.solver.validate();
  SolveConfig torus_solver = cfg.solver;
  torus_solver.points_per_eps = cfg.torus_points_per_eps;
  const Grid circle = Grid::circle(cfg.circle ? cfg.circle_n : 16);
  const Grid torus = Grid::torus(cfg.torus ? cfg.torus_n : 16, cfg.torus ? cfg.torus_n2 : 16);
  for (double eps : cfg.epsilons) {
    if (cfg.circle) circle.require_resolution(eps, cfg.solver.points_per_eps);
    if (cfg.torus) torus.require_resolution(eps, torus_solver.points_per_eps);
  }

  struct Run {
    std::uint64_t seed = 0;
    bool control = false;
    bool on_torus = false;
    double eps = 0.0;
    std::vector<double> seed_angles;
    FlowTrace flow;
    NewtonResult newton;
    CriticalPointChecks checks;
    CongruenceReport congruence;
    SymmetryReport symmetry;
  };
  const double spacing = kTwoPi / cfg.m;
  std::vector<Run> runs;
  for (int geometry = 0; geometry < 2; ++geometry) {
    const bool on_torus = geometry == 1;
    if (on_torus ? !cfg.torus : !cfg.circle) continue;
    for (double eps : cfg.epsilons) {
      if (cfg.include_control) {
        Run r{0, true, on_torus, eps};
        for (int k = 0; k < cfg.m; ++k) r.seed_angles.push_back(k * spacing);
        runs.push_back(std::move(r));
      }
      for (std::uint64_t seed : cfg.seeds) {
        std::mt19937_64 rng(seed);
        const double rotation = std::uniform_real_distribution<double>(0.0, spacing)(rng);
        const int moved = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.m));
        const double direction = (rng() & 1u) ? 1.0 : -1.0;
        Run r{seed, false, on_torus, eps};
        for (int k = 0; k < cfg.m; ++k)
          r.seed_angles.push_back(rotation + k * spacing + (k == moved ? direction * cfg.perturbation : 0.0));
        runs.push_back(std::move(r));
      }
    }
  }

  parallel_for(runs.size(), [&](std::size_t i) {
    Run& r = runs[i];
    const Grid& g = r.on_torus ? torus : circle;
    const SolveConfig& sc = r.on_torus ? torus_solver : cfg.solver;
    Field seed = glued_profile(g, r.eps, r.seed_angles);
    if (r.on_torus && cfg.torus_noise > 0.0) {
      std::mt19937_64 rng(r.seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> noise(-cfg.torus_noise, cfg.torus_noise);
      for (double& v : seed.values) v += noise(rng);
    }
    r.flow = flow_then(seed, p, sc, r.on_torus ? cfg.torus_flow_steps : cfg.circle_flow_steps, cfg.flow_residual);
    r.newton = newton_refine(r.flow.final_field, p, sc);
    if (!r.newton.converged) return;
    r.checks = inspect(r.newton.field, p);
    if (r.checks.nodal_count == static_cast<std::size_t>(cfg.m)) {
      r.congruence = check_congruent_intervals(r.checks.angles, cfg.congruence_tol);
      r.symmetry = check_rotation_symmetry(r.newton.field, cfg.m, cfg.symmetry_tol);
    }
  });

  ExperimentReport rep;
  rep.id = "m-rigidity";
  rep.config = cfg.to_json();
  rep.config["potential"] = p.to_json();
  rep.table.header = {"seed", "epsilon", "geometry", "outcome", "nodal_count", "max_spacing_deviation"};

  InvariantTally tally;
  double worst_congruence = 0.0, worst_symmetry = 0.0;
  std::size_t counterexamples = 0;
  nlohmann::json census = nlohmann::json::object();
  nlohmann::json list = nlohmann::json::array();
  std::vector<Assertion> controls;
  for (const Run& r : runs) {
    const std::string geometry = r.on_torus ? "torus" : "circle";
    std::string outcome = "non_converged";
    if (r.newton.converged) {
      tally.add(r.checks);
      if (r.checks.nodal_count == static_cast<std::size_t>(cfg.m)) {
        const bool ok = r.congruence.pass && r.symmetry.pass;
        outcome = ok ? "converged_symmetric" : "converged_asymmetric";
        if (!ok) ++counterexamples;
        worst_congruence = std::max(worst_congruence, r.congruence.max_rel_deviation);
        worst_symmetry = std::max(worst_symmetry, r.symmetry.sign_flip_residual);
      } else {
        outcome = "escaped";
      }
    }
    auto& bucket = census[geometry][eps_tag(r.eps)];
    bucket[outcome] = (bucket.contains(outcome) ? bucket[outcome].get<int>() : 0) + 1;

    nlohmann::json j = {{"seed", r.seed},
                        {"control", r.control},
                        {"geometry", geometry},
                        {"epsilon", r.eps},
                        {"seed_angles", r.seed_angles},
                        {"outcome", outcome},
                        {"flow_steps", r.flow.steps_taken},
                        {"flow_residual", r.flow.final_residual},
                        {"newton", r.newton.to_json()}};
    if (r.newton.converged) j["critical_point"] = checks_json(r.checks);
    const bool measured = outcome == "converged_symmetric" || outcome == "converged_asymmetric";
    if (measured) {
      j["congruence"] = r.congruence.to_json();
      j["rotation_symmetry"] = r.symmetry.to_json();
    }
    list.push_back(std::move(j));
    rep.table.rows.push_back({r.control ? "control" : std::to_string(r.seed), fmt(r.eps), geometry, outcome,
                              std::to_string(r.checks.nodal_count),
                              measured ? fmt(r.congruence.max_rel_deviation) : ""});
    if (r.control)
      controls.push_back({"m_rigidity.control_symmetric[" + geometry + "," + eps_tag(r.eps) + "]",
                          outcome == "converged_symmetric", measured ? r.symmetry.sign_flip_residual : -1.0,
                          cfg.symmetry_tol, "equally spaced seed"});
  }
  rep.measurements = {{"runs", list}, {"census", census}};

  rep.assertions.push_back({"m_rigidity.counterexamples", counterexamples == 0, static_cast<double>(counterexamples),
                            0.0, "converged m-nodal critical points failing congruence or rotation symmetry"});
  rep.assertions.push_back({"m_rigidity.congruence", worst_congruence <= cfg.congruence_tol, worst_congruence,
                            cfg.congruence_tol, "max relative spacing deviation"});
  rep.assertions.push_back({"m_rigidity.rotation_symmetry", worst_symmetry <= cfg.symmetry_tol, worst_symmetry,
                            cfg.symmetry_tol, "max sign-flip residual under rotation by 2 pi / m"});
  tally.emit(rep, "m_rigidity", cfg.symmetry_tol, cfg.solver.tol_grad);
  for (auto& c : controls) rep.assertions.push_back(std::move(c));
  return rep;
}

// ---------------------------------------------------------------------------
// Decay away from the nodal set

ExperimentReport experiment_decay(const DecayConfig& cfg, const Potential& p) {
  require_nonempty(cfg.epsilons, "decay");
  cfg.solver.validate();
  if (!(cfg.rate_band > 0.0 && cfg.rate_band < 1.0)) fail(ErrorCode::invalid_argument, "decay: rate_band must lie in (0, 1)");
  const double target = std::sqrt(p.d2(1.0));

  struct Run {
    double eps = 0.0;
    CircleSolution solution;
    DecayFit fit;
    double envelope = 0.0;      // smallest C for which the bound holds on the fit window
    double worst_excess = 0.0;  // max over all points of gap - C exp(-kappa d)
    std::size_t worst_index = 0;
  };
  std::vector<Run> runs(cfg.epsilons.size());
  parallel_for(runs.size(), [&](std::size_t i) {
    Run& r = runs[i];
    r.eps = cfg.epsilons[i];
    r.solution = build_circle(2, r.eps, cfg.n, p, cfg.solver);
    if (!r.solution.newton.converged)
      fail(ErrorCode::no_convergence, "decay: two-interface solution did not converge at " + eps_tag(r.eps));
    r.fit = fit_decay(r.solution.field, extract_nodal_set(r.solution.field));
    for (std::size_t k = 0; k < r.fit.distance.size(); ++k) {
      const double d = r.fit.distance[k];
      if (d < r.fit.window_lo || d > r.fit.window_hi || r.fit.gap[k] <= kDecayFloor) continue;
      r.envelope = std::max(r.envelope, r.fit.gap[k] * std::exp(r.fit.kappa * d));
    }
    r.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < r.fit.distance.size(); ++k) {
      const double excess = r.fit.gap[k] - r.envelope * std::exp(-r.fit.kappa * r.fit.distance[k]);
      if (excess > r.worst_excess) {
        r.worst_excess = excess;
        r.worst_index = k;
      }
    }
  });

  ExperimentReport rep;
  rep.id = "decay";
  rep.config = cfg.to_json();
  rep.config["potential"] = p.to_json();
  rep.table.header = {"epsilon", "kappa", "kappa_eps", "c_envelope", "c_fit", "rms_residual", "points_used"};
  nlohmann::json list = nlohmann::json::array();
  for (const Run& r : runs) {
    const double rate = r.fit.kappa * r.eps;
    const double dev = std::abs(rate / target - 1.0);
    rep.assertions.push_back({"decay.rate[" + eps_tag(r.eps) + "]", dev <= cfg.rate_band, rate, cfg.rate_band,
                              "kappa * eps against sqrt(W''(1)) = " + fmt(target) + ", relative band"});
    rep.assertions.push_back({"decay.pointwise_bound[" + eps_tag(r.eps) + "]", r.worst_excess <= kDecayFloor,
                              r.worst_excess, kDecayFloor,
                              "max over grid points of |u^2 - 1| - C exp(-kappa dist), C = " + fmt(r.envelope)});
    list.push_back({{"epsilon", r.eps},
                    {"n", cfg.n},
                    {"fit", r.fit.to_json()},
                    {"kappa_eps", rate},
                    {"target", target},
                    {"c_envelope", r.envelope},
                    {"worst_excess", r.worst_excess},
                    {"worst_distance", r.fit.distance[r.worst_index]},
                    {"energy", energy(r.solution.field, p)}});
    rep.table.rows.push_back({fmt(r.eps), fmt(r.fit.kappa), fmt(rate), fmt(r.envelope), fmt(r.fit.c_fit),
                              fmt(r.fit.rms_residual), std::to_string(r.fit.points_used)});
  }
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const Run &a = runs[i], &b = runs[i + 1];
    const double ratio = (b.fit.kappa / a.fit.kappa) / (a.eps / b.eps);
    rep.assertions.push_back({"decay.scaling[" + eps_tag(a.eps) + "->" + eps_tag(b.eps) + "]",
                              std::abs(ratio - 1.0) <= cfg.rate_band, ratio, cfg.rate_band,
                              "kappa ratio divided by the inverse eps ratio"});
  }
  rep.measurements = {{"fits", list}};
  return rep;
}

// ---------------------------------------------------------------------------
// Comparison scenarios

ExperimentReport experiment_comparison(const ComparisonConfig& cfg, const Potential& p) {
  cfg.solver.validate();
  if (cfg.n < 17 || (cfg.n - 1) % 4 != 0) fail(ErrorCode::invalid_argument, "comparison: n - 1 must be divisible by 4");
  if (std::abs(cfg.inner_half_length * 2.0 - cfg.outer_half_length) > 1e-12 * cfg.outer_half_length)
    fail(ErrorCode::invalid_argument, "comparison: the inner interval must be the middle half of the outer one");
  const Grid outer = Grid::interval(cfg.n, cfg.outer_half_length);
  const std::size_t inner_n = (cfg.n - 1) / 2 + 1, shift = (cfg.n - 1) / 4;
  const Grid inner = Grid::interval(inner_n, cfg.inner_half_length);

  const ModelSolution big = solve_dirichlet_model(outer, cfg.epsilon, p, cfg.solver);
  const ModelSolution small = solve_dirichlet_model(inner, cfg.epsilon, p, cfg.solver);
  Field embedded(outer, cfg.epsilon);
  for (std::size_t i = 0; i < inner_n; ++i) embedded.values[shift + i] = small.field.values[i];
  IndexSet support(inner_n);
  for (std::size_t i = 0; i < inner_n; ++i) support[i] = shift + i;
  IndexSet everything(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) everything[i] = i;
  Field ones(outer, std::vector<double>(cfg.n, 1.0), cfg.epsilon);

  const ComparisonReport nested = comparison_test(big.field, embedded, support, p);
  const ComparisonReport restricted = comparison_test(big.field, big.field, support, p);
  const ComparisonReport constant = comparison_test(ones, big.field, everything, p);

  ExperimentReport rep;
  rep.id = "comparison";
  rep.config = cfg.to_json();
  rep.config["potential"] = p.to_json();
  rep.measurements = {{"outer_model", big.to_json()},
                      {"inner_model", small.to_json()},
                      {"nested", nested.to_json()},
                      {"restricted", restricted.to_json()},
                      {"constant", constant.to_json()}};
  using V = ComparisonReport::Verdict;
  rep.assertions.push_back({"comparison.nested_strict", nested.verdict == V::pass && nested.min_gap > 0.0,
                            nested.min_gap, 0.0, "outer model above the inner model on the inner support"});
  rep.assertions.push_back({"comparison.restricted_inapplicable", restricted.verdict == V::inapplicable, 0.0, 0.0,
                            restricted.reason});
  rep.assertions.push_back({"comparison.constant_strict", constant.verdict == V::pass && constant.min_gap > 0.0,
                            constant.min_gap, 0.0, "constant 1 above the outer model"});
  rep.table.header = {"scenario", "verdict", "min_gap"};
  for (auto [name, r] : {std::pair{"nested", &nested}, {"restricted", &restricted}, {"constant", &constant}})
    rep.table.rows.push_back({name, to_string(r->verdict), r->verdict == V::inapplicable ? "" : fmt(r->min_gap)});
  return rep;
}

// ---------------------------------------------------------------------------
// Sliding barrier against a non-alternating configuration

ExperimentReport experiment_slide(const SlideConfig& cfg, const Potential& p) {
  cfg.solver.validate();
  if (cfg.m < 4 || cfg.m % 2 != 0) fail(ErrorCode::invalid_argument, "slide: m must be even and >= 4");
  if (!(cfg.center_shift >= 0.0 && cfg.center_shift < 1.0))
    fail(ErrorCode::invalid_argument, "slide: center_shift must lie in [0, 1)");
  const CircleSolution base = build_circle(cfg.m, cfg.epsilon, cfg.n, p, cfg.solver);
  if (!base.newton.converged) fail(ErrorCode::no_convergence, "slide: base solution did not converge");

  // -|u| keeps the nodal set of u but has the same sign on both sides of every node.
  Field config = base.field;
  for (double& v : config.values) v = -std::abs(v);
  std::vector<double> angles = extract_nodal_set(base.field).coords();
  if (angles.size() < 3) fail(ErrorCode::internal, "slide: base solution has fewer than three nodes");
  const double gap = std::min(angles[1] - angles[0], angles[2] - angles[1]);
  const double delta_max = gap / 6.0;
  const double node = angles[1];

  ExperimentReport rep;
  rep.id = "slide";
  rep.config = cfg.to_json();
  rep.config["potential"] = p.to_json();
  rep.table.header = {"delta_fraction", "delta", "barrier", "touched", "offset", "interior", "touch_coord"};
  nlohmann::json list = nlohmann::json::array();
  for (double fraction : cfg.delta_fractions) {
    const double delta = fraction * delta_max;
    const std::string tag = "slide[delta=" + fmt(fraction) + "*max]";
    nlohmann::json j = {{"delta_fraction", fraction}, {"delta", delta}, {"delta_max", delta_max}, {"node", node}};
    Barrier barrier;
    try {
      barrier = build_barrier(BarrierKind::two_sided, node + cfg.center_shift * delta, delta, cfg.epsilon, p,
                              config.grid, cfg.solver);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::precondition) throw;
      j["barrier_error"] = e.what();
      list.push_back(std::move(j));
      rep.assertions.push_back({tag + ".barrier", false, delta, 0.0, e.what()});
      rep.table.rows.push_back({fmt(fraction), fmt(delta), "unavailable", "", "", "", ""});
      continue;
    }
    const SlideReport slide = slide_to_touch(config, barrier, -1, 3.0 * delta, Orientation::barrier_above);
    j["barrier"] = barrier.to_json();
    j["slide"] = slide.to_json();
    list.push_back(std::move(j));
    rep.assertions.push_back({tag + ".touch_before_2delta", slide.touched && slide.offset < 2.0 * delta,
                              slide.touched ? slide.offset : -1.0, 2.0 * delta, "first touching offset"});
    rep.assertions.push_back({tag + ".interior_touch", slide.touched && slide.interior,
                              slide.touched ? slide.boundary_distance : -1.0, config.grid.h(),
                              "distance from the touch to the slid domain boundary"});
    rep.table.rows.push_back({fmt(fraction), fmt(delta), "two_sided", slide.touched ? "true" : "false",
                              slide.touched ? fmt(slide.offset) : "", slide.interior ? "true" : "false",
                              slide.touched ? fmt(slide.touch_coord) : ""});
  }
  rep.measurements = {{"nodal_angles", angles}, {"delta_max", delta_max}, {"runs", list}};
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_experiment(const std::string& id, const nlohmann::json& config) {
  const Potential p = config.contains("potential") ? Potential::from_json(config.at("potential")) : Potential::quartic();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (id == "two-interface") rep = experiment_two_interface(TwoInterfaceConfig::from_json(config), p);
  else if (id == "m-rigidity") rep = experiment_m_rigidity(RigidityConfig::from_json(config), p);
  else if (id == "decay") rep = experiment_decay(DecayConfig::from_json(config), p);
  else if (id == "comparison") rep = experiment_comparison(ComparisonConfig::from_json(config), p);
  else if (id == "slide") rep = experiment_slide(SlideConfig::from_json(config), p);
  else fail(ErrorCode::invalid_argument, "unknown experiment '" + id + "'");
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace dwpt
