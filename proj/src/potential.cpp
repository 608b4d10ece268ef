#include "dwpt/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwpt/error.hpp"

namespace dwpt {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kEvenTol = 1e-12;
constexpr double kCurvatureTol = 1e-10;
constexpr double kMonotoneTol = 1e-10;
constexpr int kMonotoneSamples = 10000;

}  // namespace

Potential Potential::quartic() {
  Potential p;
  p.kind_ = Kind::quartic;
  return p;
}

Potential Potential::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) fail(ErrorCode::invalid_argument, "polynomial potential needs coefficients");
  Potential p;
  p.kind_ = Kind::polynomial;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Potential Potential::table(std::vector<std::pair<double, double>> points) {
  std::sort(points.begin(), points.end());
  if (points.size() < 4) fail(ErrorCode::invalid_argument, "table potential needs at least 4 points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first))
      fail(ErrorCode::invalid_argument, "table potential abscissae must be distinct");
  }
  for (const auto& [x, w] : points) {
    if (!std::isfinite(x) || !std::isfinite(w))
      fail(ErrorCode::invalid_argument, "table potential has non-finite entries");
  }

  auto s = std::make_shared<Spline>();
  const std::size_t n = points.size();
  s->x.resize(n);
  s->y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s->x[i] = points[i].first;
    s->y[i] = points[i].second;
  }

  // Natural spline: tridiagonal system for interior second derivatives.
  s->m.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = s->x[i] - s->x[i - 1];
    const double h1 = s->x[i + 1] - s->x[i];
    const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
    const double rhs = (s->y[i + 1] - s->y[i]) / h1 - (s->y[i] - s->y[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    s->m[i] = d[i] - c[i] * s->m[i + 1];
  }

  Potential p;
  p.kind_ = Kind::table;
  p.spline_ = std::move(s);
  return p;
}

std::size_t Potential::Spline::segment(double t) const {
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return 0;
  return std::min(i - 1, x.size() - 2);
}

Potential Potential::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    fail(ErrorCode::invalid_argument, "potential descriptor must be an object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quartic") return quartic();
  if (kind == "table") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : j.at("points")) {
      if (!row.is_array() || row.size() != 2)
        fail(ErrorCode::invalid_argument, "table points must be [x, W(x)] pairs");
      pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return table(std::move(pts));
  }
  if (kind == "polynomial") return polynomial(j.at("coefficients").get<std::vector<double>>());
  fail(ErrorCode::invalid_argument, "unknown potential kind: " + kind);
}

nlohmann::json Potential::to_json() const {
  switch (kind_) {
    case Kind::quartic:
      return {{"kind", "quartic"}};
    case Kind::polynomial:
      return {{"kind", "polynomial"}, {"coefficients", coeffs_}};
    case Kind::table: {
      nlohmann::json pts = nlohmann::json::array();
      for (std::size_t i = 0; i < spline_->x.size(); ++i) pts.push_back({spline_->x[i], spline_->y[i]});
      return {{"kind", "table"}, {"points", pts}};
    }
  }
  return {};
}

std::string Potential::name() const {
  switch (kind_) {
    case Kind::quartic: return "quartic";
    case Kind::table: return "table";
    case Kind::polynomial: return "polynomial";
  }
  return "unknown";
}

double Potential::value(double x) const {
  switch (kind_) {
    case Kind::quartic: {
      const double a = 1.0 - x * x;
      return 0.25 * a * a;
    }
    case Kind::polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Kind::table: {
      const auto& s = *spline_;
      const std::size_t i = s.segment(x);
      const double h = s.x[i + 1] - s.x[i];
      const double a = (s.x[i + 1] - x) / h, b = (x - s.x[i]) / h;
      return a * s.y[i] + b * s.y[i + 1] +
             ((a * a * a - a) * s.m[i] + (b * b * b - b) * s.m[i + 1]) * h * h / 6.0;
    }
  }
  return 0.0;
}

double Potential::d1(double x) const {
  switch (kind_) {
    case Kind::quartic:
      return x * x * x - x;
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs_[k];
      return acc;
    }
    case Kind::table: {
      const auto& s = *spline_;
      const std::size_t i = s.segment(x);
      const double h = s.x[i + 1] - s.x[i];
      const double a = (s.x[i + 1] - x) / h, b = (x - s.x[i]) / h;
      return (s.y[i + 1] - s.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * s.m[i] +
             (3.0 * b * b - 1.0) / 6.0 * h * s.m[i + 1];
    }
  }
  return 0.0;
}

double Potential::d2(double x) const {
  switch (kind_) {
    case Kind::quartic:
      return 3.0 * x * x - 1.0;
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 2;)
        acc = acc * x + static_cast<double>(k * (k - 1)) * coeffs_[k];
      return acc;
    }
    case Kind::table: {
      const auto& s = *spline_;
      const std::size_t i = s.segment(x);
      const double h = s.x[i + 1] - s.x[i];
      const double a = (s.x[i + 1] - x) / h, b = (x - s.x[i]) / h;
      return a * s.m[i] + b * s.m[i + 1];
    }
  }
  return 0.0;
}

bool AxiomReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const AxiomVerdict& v) { return v.pass; });
}

nlohmann::json AxiomReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : verdicts) {
    nlohmann::json row = {{"axiom", v.axiom}, {"statement", v.statement}, {"pass", v.pass}};
    if (!v.pass) {
      row["witness"] = v.witness;
      row["measured"] = v.measured;
    }
    out.push_back(std::move(row));
  }
  return out;
}

AxiomReport check_double_well(const Potential& p, int sample_count) {
  if (sample_count < 100) fail(ErrorCode::invalid_argument, "check_double_well needs at least 100 samples");

  AxiomReport report;
  const double lo = -2.0, hi = 2.0;
  const double dx = (hi - lo) / (sample_count - 1);

  // (1) W >= 0, vanishing exactly at the wells.
  {
    AxiomVerdict v{1, "W(x) >= 0 with equality iff x = +-1", true, 0.0, 0.0};
    for (double well : {-1.0, 1.0}) {
      const double w = p.value(well);
      if (std::abs(w) > kZeroTol) {
        v = {1, v.statement, false, well, w};
        break;
      }
    }
    if (v.pass) {
      // Away from the wells W must be strictly positive.
      for (int i = 0; i < sample_count; ++i) {
        const double x = lo + i * dx;
        const double w = p.value(x);
        const bool near_well = std::abs(std::abs(x) - 1.0) < 0.5 * dx;
        if (w < -kZeroTol || (!near_well && w <= 0.0)) {
          v = {1, v.statement, false, x, w};
          break;
        }
      }
    }
    report.verdicts.push_back(v);
  }

  // (2) evenness.
  {
    AxiomVerdict v{2, "W(x) = W(-x)", true, 0.0, 0.0};
    for (int i = 0; i < sample_count; ++i) {
      const double x = lo + i * dx;
      const double a = p.value(x), b = p.value(-x);
      const double defect = std::abs(a - b);
      if (defect > kEvenTol * (1.0 + std::abs(a))) {
        v = {2, v.statement, false, x, defect};
        break;
      }
    }
    report.verdicts.push_back(v);
  }

  // (3) nondegenerate wells.
  {
    AxiomVerdict v{3, "W''(+-1) > 0", true, 0.0, 0.0};
    for (double well : {1.0, -1.0}) {
      const double c = p.d2(well);
      if (!(c > kCurvatureTol)) {
        v = {3, v.statement, false, well, c};
        break;
      }
    }
    report.verdicts.push_back(v);
  }

  // (4) W'(x)/x increasing on (0,1), decreasing on (-1,0).
  {
    AxiomVerdict v{4, "W'(x)/x increasing on (0,1) and decreasing on (-1,0)", true, 0.0, 0.0};
    const double step = 1.0 / (kMonotoneSamples + 1);
    auto ratio = [&](double x) { return p.d1(x) / x; };
    double prev_pos = ratio(step), prev_neg = ratio(-step);
    for (int i = 2; i <= kMonotoneSamples && v.pass; ++i) {
      const double x = i * step;
      const double rp = ratio(x), rn = ratio(-x);
      if (rp - prev_pos < -kMonotoneTol) v = {4, v.statement, false, x, rp - prev_pos};
      // Moving left on (-1, 0) the ratio must increase, i.e. decrease to the right.
      else if (rn - prev_neg < -kMonotoneTol) v = {4, v.statement, false, -x, rn - prev_neg};
      prev_pos = rp;
      prev_neg = rn;
    }
    report.verdicts.push_back(v);
  }

  return report;
}

}  // namespace dwpt
