#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

namespace dwpt {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Minimum number of grid points per unit of epsilon required by the solvers.
inline constexpr double kPointsPerEpsilon = 8.0;

enum class GridKind { interval, circle, torus };

std::string to_string(GridKind k);
GridKind grid_kind_from_string(const std::string& s);

/// Uniform grid on [-l, l] (Dirichlet, endpoints included), on the circle of
/// circumference `length`, or on the flat torus length x length2.
///
/// Torus storage is row-major with the S^1 fiber angle as the slow index:
/// value(i, j) = values[i * n2 + j], theta = i * h, y = j * h2.
class Grid {
 public:
  Grid() = default;  // empty placeholder; use the factories below
  static Grid interval(std::size_t n, double half_length);
  static Grid circle(std::size_t n, double circumference = kTwoPi);
  static Grid torus(std::size_t n, std::size_t n2, double circumference = kTwoPi,
                    double length2 = kTwoPi);
  /// Interval grid with a prescribed spacing: 2 * half_length must be a whole
  /// number of steps (to 1e-9 relative).
  static Grid interval_with_spacing(double half_length, double h);

  GridKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return kind_ == GridKind::torus ? n_ * n2_ : n_; }

  /// Interval: half-length l; periodic kinds: circumference along the fiber.
  double length() const { return length_; }
  double length2() const { return length2_; }
  double h() const { return h_; }
  double h2() const { return h2_; }
  bool periodic() const { return kind_ != GridKind::interval; }

  /// Fiber coordinate of (fiber) index i: x in [-l, l] or theta in [0, L).
  double coord(std::size_t i) const;
  double coord2(std::size_t j) const { return static_cast<double>(j) * h2_; }

  /// Quadrature weight at flat index k (trapezoid on intervals).
  double weight(std::size_t k) const;
  const std::vector<double>& weights() const { return weights_; }

  /// Largest spacing in any direction that carries the interface profile.
  double fiber_spacing() const { return h_; }

  /// True when eps / h >= points_per_eps along the fiber.
  bool resolves(double eps, double points_per_eps = kPointsPerEpsilon) const;
  /// Throws a precondition error if the resolution rule fails.
  void require_resolution(double eps, double points_per_eps = kPointsPerEpsilon) const;

  nlohmann::json to_json() const;
  static Grid from_json(const nlohmann::json& j);

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  void build_weights();

  GridKind kind_ = GridKind::circle;
  std::size_t n_ = 0, n2_ = 1;
  double length_ = 0.0, length2_ = 0.0;
  double h_ = 0.0, h2_ = 0.0;
  std::vector<double> weights_;
};

/// Wrap-aware distance on a circle of the given circumference.
double circle_distance(double a, double b, double circumference = kTwoPi);

/// Reduce an angle to [0, circumference).
double wrap_angle(double a, double circumference = kTwoPi);

}  // namespace dwpt
