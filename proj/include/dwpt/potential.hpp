#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace dwpt {

/// A smooth even double-well potential W together with its first two
/// derivatives. Immutable after construction.
class Potential {
 public:
  enum class Kind { quartic, table, polynomial };

  /// W(x) = (1 - x^2)^2 / 4.
  static Potential quartic();

  /// Natural cubic spline through the sample points (sorted by x, at least
  /// four distinct abscissae). Outside the table the end cubic is continued.
  static Potential table(std::vector<std::pair<double, double>> points);

  /// W(x) = sum_k coeffs[k] x^k.
  static Potential polynomial(std::vector<double> coeffs);

  /// {"kind": "quartic"} | {"kind": "table", "points": [[x, W], ...]}
  /// | {"kind": "polynomial", "coefficients": [c0, c1, ...]}
  static Potential from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  std::string name() const;

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

 private:
  struct Spline {
    std::vector<double> x, y, m;  // m = second derivatives at knots
    std::size_t segment(double t) const;
  };

  Potential() = default;

  Kind kind_ = Kind::quartic;
  std::vector<double> coeffs_;
  std::shared_ptr<const Spline> spline_;
};

struct AxiomVerdict {
  int axiom = 0;           // 1..4
  std::string statement;
  bool pass = false;
  double witness = 0.0;    // sample point where the check failed (if any)
  double measured = 0.0;   // offending value at the witness
};

struct AxiomReport {
  std::vector<AxiomVerdict> verdicts;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

/// Dense-sample verification of the double-well axioms:
///   (1) W >= 0 with equality exactly at +-1, (2) W even, (3) W''(+-1) > 0,
///   (4) W'(x)/x increasing on (0, 1) and decreasing on (-1, 0).
/// Sampling is on [-2, 2] with `sample_count` points for (1) and (2); the
/// monotonicity check uses 10^4 points per half-interval.
AxiomReport check_double_well(const Potential& p, int sample_count = 10001);

}  // namespace dwpt
