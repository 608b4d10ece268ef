#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dwpt/field.hpp"

namespace dwpt {

/// A zero of a field located on a grid edge (or exactly at a grid point).
struct NodalPoint {
  double coord = 0.0;   // fiber coordinate: angle on circle/torus, x on interval
  double coord2 = 0.0;  // torus second coordinate, 0 otherwise
  int axis = 0;         // edge direction the zero was found on (0 fiber, 1 second)
  int direction = 0;    // +1 for -/+ crossing along the axis, -1 for +/-, 0 tangential
};

struct NodalSet {
  GridKind kind = GridKind::circle;
  double length = kTwoPi;   // circumference (periodic) or half-length (interval)
  double length2 = 0.0;
  std::vector<NodalPoint> points;  // sorted by (coord, coord2)

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  std::vector<double> coords() const;
};

/// Scans grid edges for sign changes and locates each crossing by linear
/// interpolation. Exact zeros at grid points are reported once.
NodalSet extract_nodal_set(const Field& f);

/// Symmetric Hausdorff distance (wrap-aware on periodic grids, product metric
/// on the torus). Both empty gives 0; exactly one empty gives +infinity.
double hausdorff(const NodalSet& a, const NodalSet& b);

inline bool is_empty_vs_nonempty(double hausdorff_distance) {
  return hausdorff_distance == std::numeric_limits<double>::infinity();
}

/// Distance from a point to a nonempty nodal set.
double distance_to_set(const NodalSet& s, double coord, double coord2 = 0.0);

/// Groups a torus nodal cloud into fiber circles {theta_k} x M: points are
/// sorted by fiber angle and split wherever the circular gap exceeds
/// `gap_threshold`. Returns the circular mean angle of each cluster, sorted.
/// For circle nodal sets this is just the angle list.
std::vector<double> fiber_angles(const NodalSet& s, double gap_threshold);

struct CongruenceReport {
  std::vector<double> spacings;
  double mean = 0.0;
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;
  double tolerance = 1e-5;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Spacings between successive angles (with wrap-around) and their deviation
/// from the mean. Requires at least two angles.
CongruenceReport check_congruent_intervals(const std::vector<double>& angles, double tolerance = 1e-5,
                                           double circumference = kTwoPi);
CongruenceReport check_congruent_intervals(const NodalSet& ns, double tolerance = 1e-5);

struct AlternationReport {
  bool alternates = false;
  bool indeterminate = false;
  std::vector<int> arc_signs;
  nlohmann::json to_json() const;
};

/// Signs of the field at the midpoints of successive inter-nodal arcs of a
/// circle field; alternation must hold around the whole circle.
AlternationReport check_alternation(const Field& f, const NodalSet& ns);
/// Torus version: every fiber slice {y = y_j} must alternate.
AlternationReport check_alternation(const Field& f);

struct SymmetryReport {
  int m = 0;
  long shift_steps = 0;
  double sign_flip_residual = 0.0;  // max |u(theta + 2pi/m) + u(theta)|
  double plain_residual = 0.0;      // max |u(theta + 4pi/m) - u(theta)|
  double tolerance = 1e-7;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Rotation by 2pi/m along the fiber. Requires m even, m >= 2, n divisible by m.
SymmetryReport check_rotation_symmetry(const Field& f, int m, double tolerance = 1e-7);

/// Odd symmetry about each zero and even symmetry about each extremum between
/// successive zeros, measured with trigonometric interpolation of the circle
/// field (exact at grid-aligned symmetry centres).
struct LocalSymmetryReport {
  double odd_defect = 0.0;
  double even_defect = 0.0;
  double tolerance = 1e-7;
  bool pass = false;
  nlohmann::json to_json() const;
};
LocalSymmetryReport check_local_symmetries(const Field& f, const NodalSet& ns, double tolerance = 1e-7);

/// Trigonometric interpolant of a circle field, evaluated anywhere.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& f);
  double operator()(double theta) const;

 private:
  double circumference_;
  std::size_t n_;
  std::vector<double> a_, b_;  // cosine / sine coefficients
};

struct DecayFit {
  double kappa = 0.0;
  double c_fit = 0.0;        // exp(intercept) of the least-squares line
  double rms_residual = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  std::size_t points_used = 0;
  // Every grid point: distance to nodal set, |u^2 - 1|.
  std::vector<double> distance, gap;
  nlohmann::json to_json() const;
};

/// Least-squares fit of log|u^2 - 1| against the distance to the nodal set
/// over distances in [2 eps, d_max - eps], where d_max is the largest
/// distance on the grid. Samples at the round-off floor are excluded.
DecayFit fit_decay(const Field& f, const NodalSet& ns);

/// Round-off floor below which |u^2 - 1| carries no information.
inline constexpr double kDecayFloor = 1e-13;

/// Slices the torus field along the fiber at second index j.
Field fiber_slice(const Field& f, std::size_t j);

}  // namespace dwpt
