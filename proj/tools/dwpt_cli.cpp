// dwpt: command-line driver over the C interface.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwpt/dwpt.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

struct Failure : std::runtime_error {
  int exit_code;
  Failure(int code, const std::string& what) : std::runtime_error(what), exit_code(code) {}
};

void check(dwpt_status s, const std::string& context) {
  if (s == DWPT_OK) return;
  const int code = s == DWPT_INVALID_ARGUMENT ? kExitUsage : kExitAssertion;
  throw Failure(code, context + " failed (" + dwpt_status_name(s) + "): " + dwpt_last_error());
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { dwpt_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
  json parsed() const { return json::parse(str()); }
};

using PotentialPtr = std::unique_ptr<dwpt_potential, decltype(&dwpt_potential_free)>;
using FieldPtr = std::unique_ptr<dwpt_field, decltype(&dwpt_field_free)>;

FieldPtr adopt(dwpt_field* f) { return FieldPtr(f, &dwpt_field_free); }

struct Globals {
  std::size_t grid_n = 0;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool json = false;
  std::string potential = "quartic";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure(kExitUsage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "quartic", an inline JSON object, or a path to a JSON file.
json potential_json(const std::string& text) {
  if (text == "quartic") return {{"kind", "quartic"}};
  if (!text.empty() && text.front() == '{') return json::parse(text);
  return json::parse(read_file(text));
}

PotentialPtr make_potential(const json& desc) {
  dwpt_potential* p = nullptr;
  check(dwpt_potential_create(desc.dump().c_str(), &p), "potential");
  return PotentialPtr(p, &dwpt_potential_free);
}

std::string solver_json(const Globals& g) {
  json s = json::object();
  if (g.tol) s["tol_grad"] = *g.tol;
  return s.dump();
}

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw Failure(kExitAssertion, "cannot write '" + path.string() + "'");
}

// Writes the report next to the other outputs and prints either the JSON or a summary.
void publish(const Globals& g, const std::string& name, const json& report, const std::string& summary) {
  write_text(out_path(g, name + ".json"), report.dump(2));
  if (g.json)
    std::cout << report.dump(2) << '\n';
  else
    std::cout << summary << '\n';
}

FieldPtr load_field(const std::string& path, PotentialPtr* potential) {
  dwpt_field* f = nullptr;
  dwpt_potential* p = nullptr;
  check(dwpt_field_load(path.c_str(), &f, potential ? &p : nullptr), "load '" + path + "'");
  if (potential) *potential = PotentialPtr(p, &dwpt_potential_free);
  return adopt(f);
}

void save_field(const Globals& g, const dwpt_field* f, const dwpt_potential* p, const json& config,
                const std::string& stem) {
  const auto snap = out_path(g, stem + ".snap");
  check(dwpt_field_save(f, p, config.dump().c_str(), snap.c_str()), "save snapshot");
  check(dwpt_field_write_profile(f, out_path(g, stem + "_profile.csv").c_str()), "write profile");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int cmd_check_potential(const Globals& g, const std::string& kind, const std::vector<double>& coeffs,
                        const std::string& points_file) {
  json desc;
  if (kind == "quartic") {
    desc = {{"kind", "quartic"}};
  } else if (kind == "polynomial") {
    if (coeffs.empty()) throw Failure(kExitUsage, "--kind polynomial needs --coeffs");
    desc = {{"kind", "polynomial"}, {"coefficients", coeffs}};
  } else if (kind == "table") {
    if (points_file.empty()) throw Failure(kExitUsage, "--kind table needs --points");
    desc = {{"kind", "table"}, {"points", json::parse(read_file(points_file))}};
  } else {
    desc = potential_json(g.potential);
  }
  auto p = make_potential(desc);
  OwnedString report;
  int all_pass = 0;
  check(dwpt_potential_check(p.get(), &report.ptr, &all_pass), "check-potential");
  const json r = report.parsed();
  std::string summary;
  for (const auto& v : r.at("verdicts"))
    summary += "axiom " + std::to_string(v.at("axiom").get<int>()) + ": " +
               (v.at("pass").get<bool>() ? "pass" : "FAIL at x = " + fmt(v.at("witness").get<double>())) + "\n";
  summary += all_pass ? "all axioms hold" : "axiom check failed";
  publish(g, "check_potential", r, summary);
  return all_pass ? kExitOk : kExitAssertion;
}

int cmd_solve_model(const Globals& g, double l, double eps) {
  auto p = make_potential(potential_json(g.potential));
  dwpt_field* raw = nullptr;
  OwnedString report;
  check(dwpt_solve_model(l, eps, p.get(), solver_json(g).c_str(), &raw, &report.ptr), "solve-model");
  auto f = adopt(raw);
  const json r = report.parsed();
  save_field(g, f.get(), p.get(), {{"command", "solve-model"}, {"l", l}, {"eps", eps}}, "model");
  publish(g, "solve_model", r,
          "status " + r.at("status").get<std::string>() + ", energy " + fmt(r.at("energy").get<double>()));
  return kExitOk;
}

int cmd_threshold(const Globals& g, double l, double rel_width) {
  auto p = make_potential(potential_json(g.potential));
  OwnedString report;
  check(dwpt_threshold(l, p.get(), solver_json(g).c_str(), rel_width, &report.ptr), "threshold");
  const json r = report.parsed();
  std::string summary = "eps* ~ " + fmt(r.at("estimate").get<double>());
  if (r.contains("linearized_threshold"))
    summary += " (linearized " + fmt(r.at("linearized_threshold").get<double>()) + ")";
  publish(g, "threshold", r, summary);
  return kExitOk;
}

int cmd_build_circle(const Globals& g, int m, double eps) {
  auto p = make_potential(potential_json(g.potential));
  const std::size_t n = g.grid_n ? g.grid_n : 512;
  dwpt_field* raw = nullptr;
  OwnedString report;
  check(dwpt_build_circle(m, eps, n, p.get(), solver_json(g).c_str(), &raw, &report.ptr), "build-circle");
  auto f = adopt(raw);
  const json r = report.parsed();
  save_field(g, f.get(), p.get(), {{"command", "build-circle"}, {"m", m}, {"eps", eps}, {"n", n}},
             "circle_m" + std::to_string(m));
  const bool converged = r.at("newton").at("converged").get<bool>();
  publish(g, "build_circle", r,
          std::string(converged ? "converged" : "NOT converged") + ", residual " + fmt(r.at("residual").get<double>()));
  return converged ? kExitOk : kExitAssertion;
}

int cmd_refine(const Globals& g, const std::string& in) {
  PotentialPtr p(nullptr, &dwpt_potential_free);
  auto f = load_field(in, &p);
  dwpt_field* raw = nullptr;
  OwnedString report;
  int converged = 0;
  check(dwpt_refine(f.get(), p.get(), solver_json(g).c_str(), &raw, &report.ptr, &converged), "refine");
  auto refined = adopt(raw);
  const json r = report.parsed();
  save_field(g, refined.get(), p.get(), {{"command", "refine"}, {"in", in}}, "refined");
  publish(g, "refine", r,
          std::string(converged ? "converged" : "NOT converged") + " after " +
              std::to_string(r.at("iterations").get<int>()) + " Newton iterations");
  return converged ? kExitOk : kExitAssertion;
}

int cmd_flow(const Globals& g, const std::string& in, long steps, double residual, bool project) {
  PotentialPtr p(nullptr, &dwpt_potential_free);
  auto f = load_field(in, &p);
  dwpt_field* raw = nullptr;
  OwnedString report;
  const auto trace = out_path(g, "flow_trace.csv");
  check(dwpt_flow(f.get(), p.get(), solver_json(g).c_str(), steps, residual, project ? 1 : 0, trace.c_str(), &raw,
                  &report.ptr),
        "flow");
  auto flowed = adopt(raw);
  const json r = report.parsed();
  save_field(g, flowed.get(), p.get(), {{"command", "flow"}, {"in", in}, {"steps", steps}}, "flowed");
  publish(g, "flow", r,
          std::to_string(r.at("steps_taken").get<long>()) + " steps, residual " +
              fmt(r.at("final_residual").get<double>()) + ", energy " + fmt(r.at("final_energy").get<double>()));
  return kExitOk;
}

int cmd_analyze(const Globals& g, const std::string& in, int m) {
  PotentialPtr p(nullptr, &dwpt_potential_free);
  auto f = load_field(in, &p);
  json opts = json::object();
  if (m > 0) opts["m"] = m;
  OwnedString report;
  int pass = 0;
  const auto decay = out_path(g, "decay.csv");
  check(dwpt_analyze(f.get(), p.get(), opts.dump().c_str(), decay.c_str(), &report.ptr, &pass), "analyze");
  const json r = report.parsed();
  std::string summary = std::to_string(r.at("nodal").at("count").get<std::size_t>()) + " nodal points";
  for (const auto& [name, c] : r.at("checks").items()) {
    const bool ok = c.value("pass", c.value("alternates", true));
    summary += "\n" + name + ": " + (c.contains("skipped") ? "skipped" : ok ? "pass" : "FAIL");
  }
  if (r.contains("decay") && r.at("decay").contains("kappa_times_eps"))
    summary += "\ndecay kappa*eps = " + fmt(r.at("decay").at("kappa_times_eps").get<double>());
  publish(g, "analysis", r, summary);
  return pass ? kExitOk : kExitAssertion;
}


struct ExperimentArgs {
  std::string id;
  std::string config_file;
  int m = 0;
  std::vector<double> epsilons;
  std::size_t seed_count = 0;
};

std::vector<std::uint64_t> seed_list(const Globals& g, std::size_t count) {
  std::vector<std::uint64_t> seeds;
  const std::uint64_t first = g.seed.value_or(1);
  for (std::size_t k = 0; k < count; ++k) seeds.push_back(first + k);
  return seeds;
}

// Command-line flags layered over the optional config file.
json experiment_config(const Globals& g, const ExperimentArgs& a) {
  json cfg = a.config_file.empty() ? json::object() : json::parse(read_file(a.config_file));
  if (!cfg.is_object()) throw Failure(kExitUsage, "experiment config must be a JSON object");
  if (!cfg.contains("potential")) cfg["potential"] = potential_json(g.potential);
  const bool single_eps = a.id == "comparison" || a.id == "slide";
  if (!a.epsilons.empty()) {
    if (single_eps) {
      if (a.epsilons.size() != 1) throw Failure(kExitUsage, a.id + " takes a single --eps");
      cfg["epsilon"] = a.epsilons.front();
    } else {
      cfg["epsilons"] = a.epsilons;
    }
  }
  if (a.m != 0) {
    if (a.id != "m-rigidity" && a.id != "slide") throw Failure(kExitUsage, "--m applies to m-rigidity and slide");
    cfg["m"] = a.m;
  }
  const bool seeded = a.id == "two-interface" || a.id == "m-rigidity";
  if (a.seed_count || g.seed) {
    if (!seeded) throw Failure(kExitUsage, "--seed/--seeds apply to two-interface and m-rigidity");
    cfg["seeds"] = seed_list(g, a.seed_count ? a.seed_count : 20);
  }
  if (g.grid_n) cfg[a.id == "m-rigidity" ? "circle_n" : "n"] = g.grid_n;
  if (g.tol) cfg["solver"]["tol_grad"] = *g.tol;
  return cfg;
}

std::string assertion_summary(const json& report) {
  std::string s;
  for (const auto& a : report.at("assertions"))
    s += (a.at("pass").get<bool>() ? "PASS " : "FAIL ") + a.at("name").get<std::string>() + "  (measured " +
         fmt(a.at("measured").get<double>()) + ", tolerance " + fmt(a.at("tolerance").get<double>()) + ")\n";
  return s + (report.at("pass").get<bool>() ? "experiment passed" : "experiment FAILED");
}

int cmd_experiment(const Globals& g, const ExperimentArgs& a) {
  const json cfg = experiment_config(g, a);
  const auto csv = out_path(g, a.id + ".csv");
  OwnedString report;
  int passed = 0;
  double runtime = 0.0;
  check(dwpt_experiment_run(a.id.c_str(), cfg.dump().c_str(), csv.c_str(), &report.ptr, &passed, &runtime),
        "experiment " + a.id);
  const json r = report.parsed();
  publish(g, a.id, r, assertion_summary(r) + " in " + fmt(runtime) + " s");
  return passed ? kExitOk : kExitAssertion;
}

// One experiment per (eps, seed) pair; the per-run CSV tables are concatenated.
int cmd_sweep(const Globals& g, const ExperimentArgs& a) {
  if (a.id != "two-interface" && a.id != "m-rigidity")
    throw Failure(kExitUsage, "sweep runs two-interface or m-rigidity");
  if (a.epsilons.empty()) throw Failure(kExitUsage, "sweep needs --eps");
  const auto seeds = seed_list(g, a.seed_count ? a.seed_count : 20);
  ExperimentArgs base = a;
  base.epsilons.clear();
  base.seed_count = 0;
  Globals no_seed = g;
  no_seed.seed.reset();
  json base_cfg = experiment_config(no_seed, base);
  base_cfg["include_control"] = false;

  const auto run_dir = out_path(g, "sweep_" + a.id);
  fs::create_directories(run_dir);
  std::ofstream merged(out_path(g, "sweep_" + a.id + ".csv"));
  json summary = {{"experiment", a.id}, {"runs", json::array()}, {"format_version", 1}};
  bool all_pass = true;
  bool header_written = false;
  for (double eps : a.epsilons) {
    for (std::uint64_t seed : seeds) {
      json cfg = base_cfg;
      cfg["epsilons"] = {eps};
      cfg["seeds"] = {seed};
      const std::string stem = "eps" + fmt(eps) + "_seed" + std::to_string(seed);
      const auto csv = run_dir / (stem + ".csv");
      OwnedString report;
      int passed = 0;
      check(dwpt_experiment_run(a.id.c_str(), cfg.dump().c_str(), csv.c_str(), &report.ptr, &passed, nullptr),
            "sweep run " + stem);
      write_text(run_dir / (stem + ".json"), report.str());
      std::ifstream in(csv);
      std::string line;
      for (bool first = true; std::getline(in, line); first = false) {
        if (first && header_written) continue;
        merged << line << '\n';
        header_written = true;
      }
      summary["runs"].push_back({{"epsilon", eps}, {"seed", seed}, {"pass", passed != 0}});
      all_pass = all_pass && passed;
      if (!g.json) std::cout << (passed ? "PASS " : "FAIL ") << a.id << " eps=" << fmt(eps) << " seed=" << seed << '\n';
    }
  }
  summary["pass"] = all_pass;
  publish(g, "sweep_" + a.id, summary, all_pass ? "sweep passed" : "sweep FAILED");
  return all_pass ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-well phase-transition laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--grid-n", g.grid_n, "Grid points along the fiber (where the command takes a grid)");
  app.add_option("--out", g.out, "Output directory for reports, snapshots and CSV")->capture_default_str();
  app.add_option("--seed", g.seed, "First seed (seeded experiments and sweeps)");
  app.add_option("--tol", g.tol, "Residual tolerance for Newton and flow stopping")->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "Print the JSON report on stdout");
  app.add_option("--potential", g.potential, "quartic, an inline JSON object, or a JSON file")
      ->capture_default_str();

  std::function<int()> action;

  auto* check_pot = app.add_subcommand("check-potential", "Verify the double-well axioms");
  std::string kind = "quartic";
  std::vector<double> coeffs;
  std::string points_file;
  check_pot->add_option("--kind", kind, "quartic | polynomial | table | custom (uses --potential)")
      ->check(CLI::IsMember({"quartic", "polynomial", "table", "custom"}))
      ->capture_default_str();
  check_pot->add_option("--coeffs", coeffs, "Polynomial coefficients c0 c1 ...");
  check_pot->add_option("--points", points_file, "JSON file with [[x, W], ...] samples");
  check_pot->callback([&] { action = [&] { return cmd_check_potential(g, kind, coeffs, points_file); }; });

  double l = 0.0, eps = 0.0, rel_width = 1e-3;
  auto* model = app.add_subcommand("solve-model", "Positive Dirichlet solution on [-l, l]");
  model->add_option("--l", l, "Half-length")->required()->check(CLI::PositiveNumber);
  model->add_option("--eps", eps, "Epsilon")->required()->check(CLI::PositiveNumber);
  model->callback([&] { action = [&] { return cmd_solve_model(g, l, eps); }; });

  auto* threshold = app.add_subcommand("threshold", "Largest epsilon with a positive model solution");
  threshold->add_option("--l", l, "Half-length")->required()->check(CLI::PositiveNumber);
  threshold->add_option("--rel-width", rel_width, "Relative bracket width")->capture_default_str();
  threshold->callback([&] { action = [&] { return cmd_threshold(g, l, rel_width); }; });

  int m = 0;
  auto* circle = app.add_subcommand("build-circle", "Reflected model solution with m nodal points");
  circle->add_option("--m", m, "Number of nodal points (even)")->required();
  circle->add_option("--eps", eps, "Epsilon")->required()->check(CLI::PositiveNumber);
  circle->callback([&] { action = [&] { return cmd_build_circle(g, m, eps); }; });

  std::string in;
  auto* refine = app.add_subcommand("refine", "Newton-refine a snapshot");
  refine->add_option("--in", in, "Snapshot file")->required();
  refine->callback([&] { action = [&] { return cmd_refine(g, in); }; });

  long steps = 100000;
  double residual = 1e-9;
  bool project = false;
  auto* flow = app.add_subcommand("flow", "Semi-implicit gradient flow from a snapshot");
  flow->add_option("--in", in, "Snapshot file")->required();
  flow->add_option("--steps", steps, "Maximum steps")->capture_default_str();
  flow->add_option("--residual", residual, "Stop once the residual reaches this")->capture_default_str();
  flow->add_flag("--project", project, "Project onto [0, 1] after each step");
  flow->callback([&] { action = [&] { return cmd_flow(g, in, steps, residual, project); }; });

  auto* analyze = app.add_subcommand("analyze", "Nodal set, congruence, alternation, symmetry and decay");
  analyze->add_option("--in", in, "Snapshot file")->required();
  analyze->add_option("--m", m, "Rotation order for the symmetry check (default: nodal count)");
  analyze->callback([&] { action = [&] { return cmd_analyze(g, in, m); }; });

  ExperimentArgs ex;
  const std::vector<std::string> ids{"two-interface", "m-rigidity", "decay", "comparison", "slide"};
  auto* experiment = app.add_subcommand("experiment", "Run a named experiment");
  experiment->add_option("id", ex.id, "Experiment")->required()->check(CLI::IsMember(ids));
  experiment->add_option("--config", ex.config_file, "JSON config file (e.g. an echoed config)");
  experiment->add_option("--m", ex.m, "Nodal count");
  experiment->add_option("--eps", ex.epsilons, "Epsilon values");
  experiment->add_option("--seeds", ex.seed_count, "Number of seeds, counting up from --seed");
  experiment->callback([&] { action = [&] { return cmd_experiment(g, ex); }; });

  auto* sweep = app.add_subcommand("sweep", "Cartesian epsilon x seed grid of single runs");
  sweep->add_option("--experiment", ex.id, "two-interface or m-rigidity")
      ->required()
      ->check(CLI::IsMember({"two-interface", "m-rigidity"}));
  sweep->add_option("--config", ex.config_file, "Base JSON config file");
  sweep->add_option("--m", ex.m, "Nodal count (m-rigidity)");
  sweep->add_option("--eps", ex.epsilons, "Epsilon values")->required();
  sweep->add_option("--seeds", ex.seed_count, "Number of seeds, counting up from --seed");
  sweep->callback([&] { action = [&] { return cmd_sweep(g, ex); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssertion;
  }
}
