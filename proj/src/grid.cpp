#include "dwpt/grid.hpp"

#include <cmath>
#include <sstream>

#include "dwpt/error.hpp"

namespace dwpt {

namespace {

constexpr std::size_t kMinPoints = 16;

void check_common(std::size_t n, double length, const char* what) {
  if (n < kMinPoints) {
    std::ostringstream os;
    os << what << " grid needs n >= " << kMinPoints << ", got " << n;
    fail(ErrorCode::invalid_argument, os.str());
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    std::ostringstream os;
    os << what << " grid needs a positive length, got " << length;
    fail(ErrorCode::invalid_argument, os.str());
  }
}

}  // namespace

std::string to_string(GridKind k) {
  switch (k) {
    case GridKind::interval: return "interval";
    case GridKind::circle: return "circle";
    case GridKind::torus: return "torus";
  }
  return "unknown";
}

GridKind grid_kind_from_string(const std::string& s) {
  if (s == "interval") return GridKind::interval;
  if (s == "circle") return GridKind::circle;
  if (s == "torus") return GridKind::torus;
  fail(ErrorCode::invalid_argument, "unknown grid kind: " + s);
}

Grid Grid::interval(std::size_t n, double half_length) {
  check_common(n, half_length, "interval");
  Grid g;
  g.kind_ = GridKind::interval;
  g.n_ = n;
  g.length_ = half_length;
  g.h_ = 2.0 * half_length / static_cast<double>(n - 1);
  g.build_weights();
  return g;
}

Grid Grid::interval_with_spacing(double half_length, double h) {
  if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "spacing must be positive");
  const double steps = 2.0 * half_length / h;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream os;
    os << "interval length " << 2.0 * half_length << " is not a whole number of steps " << h;
    fail(ErrorCode::invalid_argument, os.str());
  }
  return interval(static_cast<std::size_t>(rounded) + 1, half_length);
}

Grid Grid::circle(std::size_t n, double circumference) {
  check_common(n, circumference, "circle");
  Grid g;
  g.kind_ = GridKind::circle;
  g.n_ = n;
  g.length_ = circumference;
  g.h_ = circumference / static_cast<double>(n);
  g.build_weights();
  return g;
}

Grid Grid::torus(std::size_t n, std::size_t n2, double circumference, double length2) {
  check_common(n, circumference, "torus");
  check_common(n2, length2, "torus");
  Grid g;
  g.kind_ = GridKind::torus;
  g.n_ = n;
  g.n2_ = n2;
  g.length_ = circumference;
  g.length2_ = length2;
  g.h_ = circumference / static_cast<double>(n);
  g.h2_ = length2 / static_cast<double>(n2);
  g.build_weights();
  return g;
}

void Grid::build_weights() {
  switch (kind_) {
    case GridKind::interval:
      weights_.assign(n_, h_);
      weights_.front() = weights_.back() = 0.5 * h_;
      break;
    case GridKind::circle:
      weights_.assign(n_, h_);
      break;
    case GridKind::torus:
      weights_.assign(n_ * n2_, h_ * h2_);
      break;
  }
}

double Grid::coord(std::size_t i) const {
  if (kind_ == GridKind::interval) {
    // Exact endpoints; symmetric about the midpoint.
    if (i == n_ - 1) return length_;
    return -length_ + static_cast<double>(i) * h_;
  }
  return static_cast<double>(i) * h_;
}

double Grid::weight(std::size_t k) const { return weights_[k]; }

bool Grid::resolves(double eps, double points_per_eps) const {
  return eps / h_ >= points_per_eps * (1.0 - 1e-12);
}

void Grid::require_resolution(double eps, double points_per_eps) const {
  if (!resolves(eps, points_per_eps)) {
    std::ostringstream os;
    os << "resolution rule violated: eps/h = " << eps / h_ << " < " << points_per_eps
       << " (eps = " << eps << ", h = " << h_ << ")";
    fail(ErrorCode::precondition, os.str());
  }
}

nlohmann::json Grid::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind_)}, {"n", n_}, {"length", length_}};
  if (kind_ == GridKind::torus) {
    j["n2"] = n2_;
    j["length2"] = length2_;
  }
  return j;
}

Grid Grid::from_json(const nlohmann::json& j) {
  const GridKind k = grid_kind_from_string(j.at("kind").get<std::string>());
  const auto n = j.at("n").get<std::size_t>();
  const double len = j.value("length", k == GridKind::interval ? std::numbers::pi / 2 : kTwoPi);
  switch (k) {
    case GridKind::interval: return interval(n, len);
    case GridKind::circle: return circle(n, len);
    case GridKind::torus:
      return torus(n, j.at("n2").get<std::size_t>(), len, j.value("length2", kTwoPi));
  }
  fail(ErrorCode::internal, "unreachable");
}

bool operator==(const Grid& a, const Grid& b) {
  return a.kind_ == b.kind_ && a.n_ == b.n_ && a.n2_ == b.n2_ && a.length_ == b.length_ &&
         a.length2_ == b.length2_ && a.h_ == b.h_;
}

double wrap_angle(double a, double circumference) {
  double r = std::fmod(a, circumference);
  if (r < 0.0) r += circumference;
  if (r >= circumference) r -= circumference;
  return r;
}

double circle_distance(double a, double b, double circumference) {
  const double d = std::abs(wrap_angle(a, circumference) - wrap_angle(b, circumference));
  return std::min(d, circumference - d);
}

}  // namespace dwpt
