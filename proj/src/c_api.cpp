#define DWPT_BUILDING_LIBRARY 1
#include "dwpt/dwpt.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <numbers>
#include <string>

#include "dwpt/error.hpp"
#include "dwpt/experiments.hpp"
#include "dwpt/field.hpp"
#include "dwpt/nodal.hpp"
#include "dwpt/potential.hpp"
#include "dwpt/report.hpp"
#include "dwpt/snapshot.hpp"
#include "dwpt/solvers.hpp"

struct dwpt_potential {
  dwpt::Potential value;
};

struct dwpt_field {
  dwpt::Field value;
};

namespace {

thread_local std::string g_last_error;

dwpt_status set_error(dwpt_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class Fn>
dwpt_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return DWPT_OK;
  } catch (const dwpt::Error& e) {
    return set_error(static_cast<dwpt_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(DWPT_INVALID_ARGUMENT, std::string("bad JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DWPT_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DWPT_INTERNAL_ERROR, e.what());
  } catch (...) {
    return set_error(DWPT_INTERNAL_ERROR, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) dwpt::fail(dwpt::ErrorCode::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const nlohmann::json& j) {
  if (out) *out = dup_string(j.dump(2));
}

nlohmann::json parse_or_empty(const char* json) {
  if (!json || !*json) return nlohmann::json::object();
  auto j = nlohmann::json::parse(json);
  require(j.is_object(), "JSON argument must be an object");
  return j;
}

dwpt::Potential potential_or_quartic(const dwpt_potential* p) {
  return p ? p->value : dwpt::Potential::quartic();
}

dwpt::SolveConfig solver_config(const char* json) {
  const auto j = parse_or_empty(json);
  auto cfg = dwpt::SolveConfig::from_json(j);
  cfg.validate();
  return cfg;
}

dwpt_field* wrap(dwpt::Field f) { return new dwpt_field{std::move(f)}; }

}  // namespace

extern "C" {

DWPT_API const char* dwpt_version(void) { return "1.0.0"; }

DWPT_API const char* dwpt_last_error(void) { return g_last_error.c_str(); }

DWPT_API const char* dwpt_status_name(dwpt_status s) {
  switch (s) {
    case DWPT_OK: return "ok";
    case DWPT_INVALID_ARGUMENT: return "invalid_argument";
    case DWPT_PRECONDITION: return "precondition";
    case DWPT_NO_CONVERGENCE: return "no_convergence";
    case DWPT_IO_ERROR: return "io";
    case DWPT_FORMAT_ERROR: return "format";
    case DWPT_INTERNAL_ERROR: return "internal";
  }
  return "unknown";
}

DWPT_API void dwpt_string_free(char* s) { delete[] s; }

DWPT_API dwpt_status dwpt_potential_create(const char* json, dwpt_potential** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = nullptr;
    const auto j = json && *json ? nlohmann::json::parse(json) : nlohmann::json{{"kind", "quartic"}};
    *out = new dwpt_potential{dwpt::Potential::from_json(j)};
  });
}

DWPT_API void dwpt_potential_free(dwpt_potential* p) { delete p; }

DWPT_API dwpt_status dwpt_potential_eval(const dwpt_potential* p, double x, double* w, double* dw, double* d2w) {
  return guarded([&] {
    require(p != nullptr, "potential must not be NULL");
    if (w) *w = p->value.value(x);
    if (dw) *dw = p->value.d1(x);
    if (d2w) *d2w = p->value.d2(x);
  });
}

DWPT_API dwpt_status dwpt_potential_check(const dwpt_potential* p, char** report_json, int* all_pass) {
  return guarded([&] {
    require(p != nullptr, "potential must not be NULL");
    const auto rep = dwpt::check_double_well(p->value);
    nlohmann::json j = {{"verdicts", rep.to_json()}, {"all_pass", rep.all_pass()}, {"potential", p->value.to_json()}};
    if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
    emit(report_json, j);
  });
}

DWPT_API dwpt_status dwpt_field_create(const char* grid_json, double epsilon, const double* values, size_t count,
                                       dwpt_field** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(grid_json != nullptr, "grid_json must not be NULL");
    *out = nullptr;
    require(epsilon > 0.0, "epsilon must be positive");
    const auto g = dwpt::Grid::from_json(nlohmann::json::parse(grid_json));
    if (!values) {
      *out = wrap(dwpt::Field(g, epsilon));
      return;
    }
    if (count != g.size())
      dwpt::fail(dwpt::ErrorCode::invalid_argument, "value count " + std::to_string(count) +
                                                        " does not match grid size " + std::to_string(g.size()));
    *out = wrap(dwpt::Field(g, std::vector<double>(values, values + count), epsilon));
  });
}

DWPT_API void dwpt_field_free(dwpt_field* f) { delete f; }

DWPT_API size_t dwpt_field_size(const dwpt_field* f) { return f ? f->value.size() : 0; }

DWPT_API double dwpt_field_epsilon(const dwpt_field* f) { return f ? f->value.epsilon : 0.0; }

DWPT_API dwpt_status dwpt_field_values(const dwpt_field* f, double* out, size_t count) {
  return guarded([&] {
    require(f != nullptr && out != nullptr, "field and out must not be NULL");
    require(count == f->value.size(), "count must equal the field size");
    std::memcpy(out, f->value.values.data(), count * sizeof(double));
  });
}

DWPT_API dwpt_status dwpt_field_grid(const dwpt_field* f, char** grid_json) {
  return guarded([&] {
    require(f != nullptr, "field must not be NULL");
    emit(grid_json, f->value.grid.to_json());
  });
}

DWPT_API dwpt_status dwpt_field_save(const dwpt_field* f, const dwpt_potential* p, const char* config_json,
                                     const char* path) {
  return guarded([&] {
    require(f != nullptr && path != nullptr, "field and path must not be NULL");
    dwpt::Snapshot s;
    s.field = f->value;
    s.potential = potential_or_quartic(p);
    s.config_hash = dwpt::config_hash(parse_or_empty(config_json));
    dwpt::save_snapshot(s, path);
  });
}

DWPT_API dwpt_status dwpt_field_load(const char* path, dwpt_field** out, dwpt_potential** potential_out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = nullptr;
    if (potential_out) *potential_out = nullptr;
    auto s = dwpt::load_snapshot(path);
    *out = wrap(std::move(s.field));
    if (potential_out) *potential_out = new dwpt_potential{s.potential};
  });
}

DWPT_API dwpt_status dwpt_field_write_profile(const dwpt_field* f, const char* path) {
  return guarded([&] {
    require(f != nullptr && path != nullptr, "field and path must not be NULL");
    dwpt::emit_plotdata(f->value, std::filesystem::path(path));
  });
}

DWPT_API dwpt_status dwpt_energy(const dwpt_field* f, const dwpt_potential* p, double* out) {
  return guarded([&] {
    require(f != nullptr && out != nullptr, "field and out must not be NULL");
    *out = dwpt::energy(f->value, potential_or_quartic(p));
  });
}

DWPT_API dwpt_status dwpt_residual(const dwpt_field* f, const dwpt_potential* p, double* out) {
  return guarded([&] {
    require(f != nullptr && out != nullptr, "field and out must not be NULL");
    *out = dwpt::residual_norm(f->value, potential_or_quartic(p));
  });
}

DWPT_API dwpt_status dwpt_solve_model(double half_length, double epsilon, const dwpt_potential* p,
                                      const char* solver_json, dwpt_field** out, char** report_json) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(half_length > 0.0 && epsilon > 0.0, "half-length and epsilon must be positive");
    const auto cfg = solver_config(solver_json);
    auto model = dwpt::solve_dirichlet_model(half_length, epsilon, potential_or_quartic(p), cfg);
    emit(report_json, model.to_json());
    if (out) *out = wrap(std::move(model.field));
  });
}

DWPT_API dwpt_status dwpt_threshold(double half_length, const dwpt_potential* p, const char* solver_json,
                                    double rel_width, char** report_json) {
  return guarded([&] {
    require(half_length > 0.0, "half-length must be positive");
    require(rel_width > 0.0 && rel_width < 1.0, "rel_width must lie in (0, 1)");
    const auto pot = potential_or_quartic(p);
    const auto res = dwpt::existence_threshold(half_length, pot, solver_config(solver_json), rel_width);
    auto j = res.to_json();
    j["half_length"] = half_length;
    const double curvature = -pot.d2(0.0);
    if (curvature > 0.0) {
      const double predicted = 2.0 * half_length / std::numbers::pi * std::sqrt(curvature);
      j["linearized_threshold"] = predicted;
      j["relative_error"] = std::abs(res.estimate - predicted) / predicted;
    }
    emit(report_json, j);
  });
}

DWPT_API dwpt_status dwpt_build_circle(int m, double epsilon, size_t n, const dwpt_potential* p,
                                       const char* solver_json, dwpt_field** out, char** report_json) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(epsilon > 0.0, "epsilon must be positive");
    const auto pot = potential_or_quartic(p);
    auto sol = dwpt::build_circle(m, epsilon, n, pot, solver_config(solver_json));
    nlohmann::json j;
    j["m"] = m;
    j["epsilon"] = epsilon;
    j["n"] = n;
    j["model"] = sol.model.to_json();
    j["newton"] = sol.newton.to_json();
    j["energy"] = dwpt::energy(sol.field, pot);
    j["residual"] = dwpt::residual_norm(sol.field, pot);
    emit(report_json, j);
    if (out) *out = wrap(std::move(sol.field));
  });
}

DWPT_API dwpt_status dwpt_refine(const dwpt_field* in, const dwpt_potential* p, const char* solver_json,
                                 dwpt_field** out, char** report_json, int* converged) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(in != nullptr, "input field must not be NULL");
    auto res = dwpt::newton_refine(in->value, potential_or_quartic(p), solver_config(solver_json));
    if (converged) *converged = res.converged ? 1 : 0;
    emit(report_json, res.to_json());
    if (out) *out = wrap(std::move(res.field));
  });
}

DWPT_API dwpt_status dwpt_flow(const dwpt_field* in, const dwpt_potential* p, const char* solver_json, long max_steps,
                               double residual_tol, int project_unit_interval, const char* trace_csv,
                               dwpt_field** out, char** report_json) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(in != nullptr, "input field must not be NULL");
    require(max_steps > 0, "max_steps must be positive");
    require(residual_tol >= 0.0, "residual_tol must be non-negative");
    const auto pot = potential_or_quartic(p);
    dwpt::StopRule stop;
    stop.max_steps = max_steps;
    stop.residual_tol = residual_tol;
    auto trace = dwpt::gradient_flow(in->value, pot, solver_config(solver_json), stop, project_unit_interval != 0);
    nlohmann::json j;
    j["steps_taken"] = trace.steps_taken;
    j["dt"] = trace.dt;
    j["halvings"] = trace.halvings;
    j["reached_residual"] = trace.reached_residual;
    j["final_residual"] = trace.final_residual;
    j["initial_energy"] = dwpt::energy(in->value, pot);
    j["final_energy"] = dwpt::energy(trace.final_field, pot);
    j["angle_drift"] = trace.angle_drift();
    j["final_angles"] = trace.angles.empty() ? std::vector<double>{} : trace.angles.back();
    if (trace_csv) dwpt::emit_plotdata(trace, std::filesystem::path(trace_csv));
    emit(report_json, j);
    if (out) *out = wrap(std::move(trace.final_field));
  });
}

DWPT_API dwpt_status dwpt_analyze(const dwpt_field* f, const dwpt_potential* p, const char* options_json,
                                  const char* decay_csv, char** report_json, int* pass) {
  return guarded([&] {
    require(f != nullptr, "field must not be NULL");
    const auto opts = parse_or_empty(options_json);
    const double congruence_tol = opts.value("congruence_tol", 1e-4);
    const double symmetry_tol = opts.value("symmetry_tol", 1e-7);
    const dwpt::Field& u = f->value;
    const dwpt::Grid& g = u.grid;
    const auto pot = potential_or_quartic(p);

    nlohmann::json j;
    j["grid"] = g.to_json();
    j["epsilon"] = u.epsilon;
    j["energy"] = dwpt::energy(u, pot);
    j["residual"] = dwpt::residual_norm(u, pot);

    const auto ns = dwpt::extract_nodal_set(u);
    const bool torus = g.kind() == dwpt::GridKind::torus;
    const auto angles = torus ? dwpt::fiber_angles(ns, 4.0 * g.h()) : ns.coords();
    j["nodal"] = {{"count", angles.size()}, {"coords", angles}, {"raw_points", ns.size()}};

    bool ok = true;
    nlohmann::json checks = nlohmann::json::object();
    if (g.periodic() && angles.size() >= 2) {
      const auto cong = dwpt::check_congruent_intervals(angles, congruence_tol, g.length());
      checks["congruence"] = cong.to_json();
      ok = ok && cong.pass;

      const auto alt = torus ? dwpt::check_alternation(u) : dwpt::check_alternation(u, ns);
      checks["alternation"] = alt.to_json();
      ok = ok && alt.alternates;

      const int m = opts.value("m", static_cast<int>(angles.size()));
      if (m >= 2 && m % 2 == 0 && g.n() % static_cast<std::size_t>(m) == 0) {
        const auto sym = dwpt::check_rotation_symmetry(u, m, symmetry_tol);
        checks["rotation_symmetry"] = sym.to_json();
        ok = ok && sym.pass;
      } else {
        checks["rotation_symmetry"] = {{"skipped", "needs an even m dividing the fiber point count"}, {"m", m}};
      }

      const auto slice = torus ? dwpt::fiber_slice(u, 0) : u;
      const auto local = dwpt::check_local_symmetries(slice, dwpt::extract_nodal_set(slice), symmetry_tol);
      checks["local_symmetry"] = local.to_json();
      ok = ok && local.pass;
    }
    j["checks"] = checks;

    if (!ns.empty()) {
      try {
        const auto fit = dwpt::fit_decay(u, ns);
        auto d = fit.to_json();
        d["kappa_times_eps"] = fit.kappa * u.epsilon;
        j["decay"] = d;
        if (decay_csv) dwpt::emit_plotdata(fit, std::filesystem::path(decay_csv));
      } catch (const dwpt::Error& e) {
        j["decay"] = {{"unavailable", e.what()}};
      }
    }
    j["pass"] = ok;
    if (pass) *pass = ok ? 1 : 0;
    emit(report_json, j);
  });
}

DWPT_API dwpt_status dwpt_experiment_run(const char* id, const char* config_json, const char* csv_path,
                                         char** report_json, int* passed, double* runtime_seconds) {
  return guarded([&] {
    require(id != nullptr, "experiment id must not be NULL");
    const auto rep = dwpt::run_experiment(id, parse_or_empty(config_json));
    if (csv_path) dwpt::emit_plotdata(rep, std::filesystem::path(csv_path));
    if (passed) *passed = rep.pass() ? 1 : 0;
    if (runtime_seconds) *runtime_seconds = rep.runtime_seconds;
    emit(report_json, rep.to_json());
  });
}

}  // extern "C"
