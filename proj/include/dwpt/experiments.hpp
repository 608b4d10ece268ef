#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "dwpt/field.hpp"
#include "dwpt/potential.hpp"
#include "dwpt/solvers.hpp"

namespace dwpt {

/// A named check with the quantity it measured and the bound it was held to.
struct Assertion {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  nlohmann::json to_json() const;
};

/// Tabular measurements for CSV output.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
  std::string id;
  nlohmann::json config;                                   // full echo, enough to replay
  nlohmann::json measurements = nlohmann::json::object();
  std::vector<Assertion> assertions;
  Table table;
  double runtime_seconds = 0.0;  // wall clock; kept out of to_json()

  bool pass() const;
  const Assertion* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Comparison

/// Flat grid indices, sorted and unique.
using IndexSet = std::vector<std::size_t>;

/// Fiber indices whose (lifted) coordinate lies in [lo, hi], wrapped on
/// periodic grids and extended across the second torus direction.
IndexSet fiber_index_set(const Grid& g, double lo, double hi);

/// Points of the set with a grid neighbour outside it. Interval end points
/// always count as boundary.
IndexSet boundary_of(const Grid& g, const IndexSet& set);

struct ComparisonReport {
  enum class Verdict { pass, fail, inapplicable };
  Verdict verdict = Verdict::inapplicable;
  std::string reason;          // why the inputs were inapplicable
  double min_gap = 0.0;        // min over interior points of u - v
  std::size_t location = 0;    // flat index of the minimum
  double location_coord = 0.0;
  std::size_t interior_points = 0;
  nlohmann::json to_json() const;
};
std::string to_string(ComparisonReport::Verdict v);

/// Strict ordering u > v on the interior of `domain` for two critical points
/// with u > 0 on the domain and v = 0 on its boundary. Inputs that break these
/// preconditions come back inapplicable.
ComparisonReport comparison_test(const Field& u, const Field& v, const IndexSet& domain, const Potential& p,
                                 double critical_tol = 1e-8, double boundary_tol = 1e-10);

// ---------------------------------------------------------------------------
// Barriers and sliding

enum class BarrierKind { two_sided, left_reflected };
std::string to_string(BarrierKind k);
BarrierKind barrier_kind_from_string(const std::string& s);

/// A model solution glued by odd reflections, placed on a periodic grid.
///
/// two_sided: the model on [c - l, c + l] with negative reflected lobes on
/// both sides; domain [c - 3l, c + 3l].
/// left_reflected: the model on [c, c + l] and its negative reflection on
/// [c - l, c]; domain [c - l, c + l].
struct Barrier {
  BarrierKind kind = BarrierKind::two_sided;
  double center = 0.0;
  double length = 0.0;
  double epsilon = 0.0;
  ModelSolution model;
  double domain_lo = 0.0, domain_hi = 0.0;  // lifted fiber coordinates
  Field field;     // sampled on the target grid, zero off the domain
  IndexSet domain;

  /// Value at a lifted fiber coordinate inside [domain_lo, domain_hi].
  double value(double theta) const;
  nlohmann::json to_json() const;
};

Barrier build_barrier(BarrierKind kind, double center, double length, double eps, const Potential& p,
                      const Grid& target, const SolveConfig& cfg = {});

enum class Orientation { barrier_above, barrier_below };

struct SlideReport {
  bool touched = false;
  double offset = 0.0;
  long steps = 0;
  double step_size = 0.0;
  double touch_coord = 0.0;  // fiber coordinate of the touching point (wrapped)
  double touch_coord2 = 0.0;
  double boundary_distance = 0.0;  // from the touch to the nearer end of the slid domain
  bool interior = false;
  double initial_min_gap = 0.0;
  double max_offset = 0.0;
  nlohmann::json to_json() const;
};

/// Moves the barrier along the fiber in grid steps (direction -1 is left)
/// until the ordering against u first fails. Throws a precondition error when
/// the ordering is not strict at offset zero.
SlideReport slide_to_touch(const Field& u, const Barrier& b, int direction, double max_offset,
                           Orientation orientation = Orientation::barrier_above);

// ---------------------------------------------------------------------------
// Experiments

std::vector<std::uint64_t> default_seeds(std::size_t count = 20);

struct TwoInterfaceConfig {
  std::vector<double> epsilons{0.15, 0.25, 0.6};
  std::vector<std::uint64_t> seeds = default_seeds();
  std::size_t n = 512;
  double phi_min = 0.6 * std::numbers::pi;
  double phi_max = 1.4 * std::numbers::pi;
  bool negate = false;           // run on -u0
  bool include_control = true;   // one extra run per eps at phi = pi
  long flow_steps = 200;         // short relaxation; longer flows let the interfaces annihilate
  double flow_residual = 1e-9;
  double antipodal_tol = 1e-4;
  double symmetry_tol = 1e-7;
  SolveConfig solver;

  nlohmann::json to_json() const;
  static TwoInterfaceConfig from_json(const nlohmann::json& j);
};

struct RigidityConfig {
  int m = 4;
  std::vector<double> epsilons{0.1, 0.15};
  std::vector<std::uint64_t> seeds = default_seeds();
  double perturbation = 0.3;
  bool circle = true;
  bool torus = true;
  bool include_control = true;   // one unperturbed run per geometry and eps
  std::size_t circle_n = 512;
  std::size_t torus_n = 256, torus_n2 = 64;
  double torus_noise = 1e-3;
  double torus_points_per_eps = 4.0;
  long circle_flow_steps = 20000;
  long torus_flow_steps = 2000;
  double flow_residual = 1e-9;
  double congruence_tol = 1e-4;
  double symmetry_tol = 1e-7;
  SolveConfig solver;

  void validate() const;  // m even and >= 4, grid sizes divisible by m
  nlohmann::json to_json() const;
  static RigidityConfig from_json(const nlohmann::json& j);
};

struct DecayConfig {
  std::vector<double> epsilons{0.05, 0.025};
  std::size_t n = 2048;
  double rate_band = 0.25;   // allowed relative deviation of kappa * eps
  SolveConfig solver;

  nlohmann::json to_json() const;
  static DecayConfig from_json(const nlohmann::json& j);
};

struct ComparisonConfig {
  double epsilon = 0.1;
  double outer_half_length = std::numbers::pi / 2;
  double inner_half_length = std::numbers::pi / 4;
  std::size_t n = 1025;   // outer grid points; (n - 1) must be divisible by 4
  SolveConfig solver;

  nlohmann::json to_json() const;
  static ComparisonConfig from_json(const nlohmann::json& j);
};

struct SlideConfig {
  int m = 4;
  double epsilon = 0.1;
  std::size_t n = 512;
  std::vector<double> delta_fractions{0.5, 0.25};  // of the largest admissible delta
  double center_shift = 1.0 / 3.0;                 // barrier centre offset, in units of delta
  SolveConfig solver;

  nlohmann::json to_json() const;
  static SlideConfig from_json(const nlohmann::json& j);
};

ExperimentReport experiment_two_interface(const TwoInterfaceConfig& cfg, const Potential& p);
ExperimentReport experiment_m_rigidity(const RigidityConfig& cfg, const Potential& p);
ExperimentReport experiment_decay(const DecayConfig& cfg, const Potential& p);
ExperimentReport experiment_comparison(const ComparisonConfig& cfg, const Potential& p);
ExperimentReport experiment_slide(const SlideConfig& cfg, const Potential& p);

/// Runs an experiment from its id ("two-interface", "m-rigidity", "decay",
/// "comparison", "slide") and a config object; the potential is read from
/// config["potential"] (quartic when absent).
ExperimentReport run_experiment(const std::string& id, const nlohmann::json& config);

/// Seeded initial condition: odd-glued heteroclinic profiles between the given
/// fiber angles, positive on the arc that starts at the first sorted angle.
Field glued_profile(const Grid& g, double eps, std::vector<double> angles);

}  // namespace dwpt
