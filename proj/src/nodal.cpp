#include "dwpt/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwpt/error.hpp"

namespace dwpt {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Zeros along one 1-D line of samples. `at(i)` gives the sample, `coord(i)` its
// coordinate, `periodic` wraps the last edge. Emits (coordinate, direction).
template <class At, class Emit>
void scan_line(std::size_t n, bool periodic, double h, At&& at, Emit&& emit) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = at(i);
    if (a == 0.0) {
      // Exact zero at a grid point: classify by its neighbours.
      const bool has_l = periodic || i > 0, has_r = periodic || i + 1 < n;
      const double l = has_l ? at(i == 0 ? n - 1 : i - 1) : 0.0;
      const double r = has_r ? at(i + 1 == n ? 0 : i + 1) : 0.0;
      int dir = 0;
      if (sign_of(l) < 0 && sign_of(r) > 0) dir = 1;
      else if (sign_of(l) > 0 && sign_of(r) < 0) dir = -1;
      emit(static_cast<double>(i) * h, dir);
      continue;
    }
    if (i + 1 == n && !periodic) break;
    const double b = at(i + 1 == n ? 0 : i + 1);
    if (b == 0.0) continue;  // reported as an exact zero at i + 1
    if ((a < 0.0) != (b < 0.0)) {
      const double t = a / (a - b);
      emit((static_cast<double>(i) + t) * h, a < 0.0 ? 1 : -1);
    }
  }
}

}  // namespace

std::vector<double> NodalSet::coords() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.coord);
  return out;
}

NodalSet extract_nodal_set(const Field& f) {
  const Grid& g = f.grid;
  NodalSet ns;
  ns.kind = g.kind();
  ns.length = g.length();
  const auto& u = f.values;
  switch (g.kind()) {
    case GridKind::interval:
      scan_line(g.n(), false, g.h(), [&](std::size_t i) { return u[i]; }, [&](double x, int dir) {
        ns.points.push_back({x - g.length(), 0.0, 0, dir});
      });
      // The last grid point sits exactly at +l.
      for (auto& p : ns.points)
        if (std::abs(p.coord - g.length()) < 1e-12 * g.length()) p.coord = g.length();
      break;
    case GridKind::circle:
      scan_line(g.n(), true, g.h(), [&](std::size_t i) { return u[i]; }, [&](double x, int dir) {
        ns.points.push_back({wrap_angle(x, g.length()), 0.0, 0, dir});
      });
      break;
    case GridKind::torus: {
      ns.length2 = g.length2();
      const std::size_t n = g.n(), n2 = g.n2();
      // Fiber-direction edges, one line per second index j.
      for (std::size_t j = 0; j < n2; ++j) {
        const double y = g.coord2(j);
        scan_line(n, true, g.h(), [&](std::size_t i) { return u[i * n2 + j]; }, [&](double x, int dir) {
          ns.points.push_back({wrap_angle(x, g.length()), y, 0, dir});
        });
      }
      // Second-direction edges; exact grid zeros were already reported above.
      for (std::size_t i = 0; i < n; ++i) {
        const double th = g.coord(i);
        const double* row = u.data() + i * n2;
        for (std::size_t j = 0; j < n2; ++j) {
          const double a = row[j], b = row[j + 1 == n2 ? 0 : j + 1];
          if (a == 0.0 || b == 0.0) continue;
          if ((a < 0.0) != (b < 0.0)) {
            const double t = a / (a - b);
            ns.points.push_back({th, wrap_angle((static_cast<double>(j) + t) * g.h2(), g.length2()), 1,
                                 a < 0.0 ? 1 : -1});
          }
        }
      }
      break;
    }
  }
  std::sort(ns.points.begin(), ns.points.end(), [](const NodalPoint& a, const NodalPoint& b) {
    return a.coord != b.coord ? a.coord < b.coord : a.coord2 < b.coord2;
  });
  return ns;
}

namespace {

double point_distance(const NodalSet& s, const NodalPoint& a, double c, double c2) {
  switch (s.kind) {
    case GridKind::interval: return std::abs(a.coord - c);
    case GridKind::circle: return circle_distance(a.coord, c, s.length);
    case GridKind::torus: {
      const double d1 = circle_distance(a.coord, c, s.length);
      const double d2 = circle_distance(a.coord2, c2, s.length2);
      return std::hypot(d1, d2);
    }
  }
  return 0.0;
}

double one_sided(const NodalSet& a, const NodalSet& b) {
  double worst = 0.0;
  for (const auto& p : a.points) worst = std::max(worst, distance_to_set(b, p.coord, p.coord2));
  return worst;
}

}  // namespace

double distance_to_set(const NodalSet& s, double coord, double coord2) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.points) best = std::min(best, point_distance(s, p, coord, coord2));
  return best;
}

double hausdorff(const NodalSet& a, const NodalSet& b) {
  if (a.kind != b.kind) fail(ErrorCode::invalid_argument, "hausdorff: nodal sets live on different grid kinds");
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(one_sided(a, b), one_sided(b, a));
}

std::vector<double> fiber_angles(const NodalSet& s, double gap_threshold) {
  if (s.kind != GridKind::torus) return s.coords();
  std::vector<double> th = s.coords();  // already sorted
  if (th.empty()) return {};
  const double L = s.length;
  // Start a cluster after the largest circular gap so no cluster straddles it.
  std::size_t start = 0;
  double biggest = -1.0;
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double next = k + 1 < th.size() ? th[k + 1] : th[0] + L;
    if (next - th[k] > biggest) {
      biggest = next - th[k];
      start = (k + 1) % th.size();
    }
  }
  if (biggest <= gap_threshold) return {};  // nodal set spread over the whole fiber

  std::vector<double> out;
  double sx = 0.0, sy = 0.0;
  std::size_t count = 0;
  auto flush = [&] {
    if (count == 0) return;
    out.push_back(wrap_angle(std::atan2(sy, sx) * L / kTwoPi, L));
    sx = sy = 0.0;
    count = 0;
  };
  for (std::size_t step = 0; step < th.size(); ++step) {
    const std::size_t k = (start + step) % th.size();
    if (count > 0) {
      const std::size_t prev = (k + th.size() - 1) % th.size();
      double gap = th[k] - th[prev];
      if (gap < 0.0) gap += L;
      if (gap > gap_threshold) flush();
    }
    const double phase = th[k] * kTwoPi / L;
    sx += std::cos(phase);
    sy += std::sin(phase);
    ++count;
  }
  flush();
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json CongruenceReport::to_json() const {
  return {{"spacings", spacings},         {"mean", mean},
          {"max_abs_deviation", max_abs_deviation}, {"max_rel_deviation", max_rel_deviation},
          {"tolerance", tolerance},       {"pass", pass}};
}

CongruenceReport check_congruent_intervals(const std::vector<double>& angles, double tolerance,
                                           double circumference) {
  if (angles.size() < 2) {
    std::ostringstream os;
    os << "congruence check needs at least 2 nodal points, got " << angles.size();
    fail(ErrorCode::precondition, os.str());
  }
  std::vector<double> th = angles;
  std::sort(th.begin(), th.end());
  CongruenceReport r;
  r.tolerance = tolerance;
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double next = k + 1 < th.size() ? th[k + 1] : th[0] + circumference;
    r.spacings.push_back(next - th[k]);
  }
  r.mean = circumference / static_cast<double>(th.size());
  for (double s : r.spacings) r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(s - r.mean));
  r.max_rel_deviation = r.max_abs_deviation / r.mean;
  r.pass = r.max_rel_deviation <= tolerance;
  return r;
}

CongruenceReport check_congruent_intervals(const NodalSet& ns, double tolerance) {
  if (ns.kind == GridKind::interval) fail(ErrorCode::invalid_argument, "congruence check needs a periodic nodal set");
  return check_congruent_intervals(ns.coords(), tolerance, ns.length);
}

nlohmann::json AlternationReport::to_json() const {
  return {{"alternates", alternates}, {"indeterminate", indeterminate}, {"arc_signs", arc_signs}};
}

namespace {

double interpolate_circle(const Field& f, double theta) {
  const Grid& g = f.grid;
  const double x = wrap_angle(theta, g.length()) / g.h();
  const auto i = static_cast<std::size_t>(std::floor(x)) % g.n();
  const double t = x - std::floor(x);
  const std::size_t j = (i + 1) % g.n();
  return (1.0 - t) * f.values[i] + t * f.values[j];
}

}  // namespace

AlternationReport check_alternation(const Field& f, const NodalSet& ns) {
  if (f.grid.kind() != GridKind::circle) fail(ErrorCode::invalid_argument, "check_alternation(field, set) needs a circle field");
  if (ns.empty()) fail(ErrorCode::precondition, "check_alternation needs a nonempty nodal set");
  AlternationReport r;
  const auto th = ns.coords();
  const double L = f.grid.length();
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double next = k + 1 < th.size() ? th[k + 1] : th[0] + L;
    const double v = interpolate_circle(f, 0.5 * (th[k] + next));
    if (std::abs(v) < 1e-8) r.indeterminate = true;
    r.arc_signs.push_back(sign_of(v));
  }
  r.alternates = !r.indeterminate;
  const std::size_t m = r.arc_signs.size();
  // A single arc (one nodal point) cannot alternate with itself.
  if (m < 2) r.alternates = false;
  for (std::size_t k = 0; k < m && r.alternates; ++k)
    if (r.arc_signs[k] == r.arc_signs[(k + 1) % m]) r.alternates = false;
  return r;
}

Field fiber_slice(const Field& f, std::size_t j) {
  if (f.grid.kind() != GridKind::torus) fail(ErrorCode::invalid_argument, "fiber_slice needs a torus field");
  const Grid& g = f.grid;
  Field out(Grid::circle(g.n(), g.length()), f.epsilon);
  for (std::size_t i = 0; i < g.n(); ++i) out.values[i] = f.values[i * g.n2() + j];
  return out;
}

AlternationReport check_alternation(const Field& f) {
  if (f.grid.kind() == GridKind::circle) return check_alternation(f, extract_nodal_set(f));
  if (f.grid.kind() != GridKind::torus) fail(ErrorCode::invalid_argument, "check_alternation needs a periodic field");
  AlternationReport all;
  all.alternates = true;
  for (std::size_t j = 0; j < f.grid.n2(); ++j) {
    const Field s = fiber_slice(f, j);
    const NodalSet ns = extract_nodal_set(s);
    if (ns.empty()) {
      all.alternates = false;
      continue;
    }
    const AlternationReport r = check_alternation(s, ns);
    if (j == 0) all.arc_signs = r.arc_signs;
    all.indeterminate = all.indeterminate || r.indeterminate;
    all.alternates = all.alternates && r.alternates;
  }
  return all;
}

nlohmann::json SymmetryReport::to_json() const {
  return {{"m", m},
          {"shift_steps", shift_steps},
          {"sign_flip_residual", sign_flip_residual},
          {"plain_residual", plain_residual},
          {"tolerance", tolerance},
          {"pass", pass}};
}

SymmetryReport check_rotation_symmetry(const Field& f, int m, double tolerance) {
  const Grid& g = f.grid;
  if (!g.periodic()) fail(ErrorCode::invalid_argument, "rotation symmetry needs a periodic field");
  if (m < 2 || m % 2 != 0) {
    std::ostringstream os;
    os << "rotation symmetry needs an even m >= 2, got " << m;
    fail(ErrorCode::invalid_argument, os.str());
  }
  if (g.n() % static_cast<std::size_t>(m) != 0) {
    std::ostringstream os;
    os << "grid size " << g.n() << " is not divisible by m = " << m;
    fail(ErrorCode::precondition, os.str());
  }
  SymmetryReport r;
  r.m = m;
  r.tolerance = tolerance;
  r.shift_steps = static_cast<long>(g.n()) / m;
  const Field once = rotate(f, -r.shift_steps);      // once(theta) = f(theta + 2pi/m)
  const Field twice = rotate(f, -2 * r.shift_steps);
  for (std::size_t k = 0; k < f.size(); ++k) {
    r.sign_flip_residual = std::max(r.sign_flip_residual, std::abs(once.values[k] + f.values[k]));
    r.plain_residual = std::max(r.plain_residual, std::abs(twice.values[k] - f.values[k]));
  }
  r.pass = r.sign_flip_residual <= tolerance;
  return r;
}

TrigInterpolant::TrigInterpolant(const Field& f)
    : circumference_(f.grid.length()), n_(f.grid.n()) {
  if (f.grid.kind() != GridKind::circle) fail(ErrorCode::invalid_argument, "trigonometric interpolation needs a circle field");
  const std::size_t half = n_ / 2;
  std::vector<double> ct(n_), st(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double ph = kTwoPi * static_cast<double>(i) / static_cast<double>(n_);
    ct[i] = std::cos(ph);
    st[i] = std::sin(ph);
  }
  a_.assign(half + 1, 0.0);
  b_.assign(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t idx = (k * i) % n_;
      sa += f.values[i] * ct[idx];
      sb += f.values[i] * st[idx];
    }
    a_[k] = 2.0 * sa / static_cast<double>(n_);
    b_[k] = 2.0 * sb / static_cast<double>(n_);
  }
  a_[0] *= 0.5;
  if (n_ % 2 == 0) {
    a_[half] *= 0.5;
    b_[half] = 0.0;
  }
}

double TrigInterpolant::operator()(double theta) const {
  const double w = kTwoPi * theta / circumference_;
  // Chebyshev-style recurrence for cos(k w), sin(k w).
  const double c1 = std::cos(w), s1 = std::sin(w);
  double ck = 1.0, sk = 0.0, acc = a_[0];
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
    acc += a_[k] * ck + b_[k] * sk;
  }
  return acc;
}

nlohmann::json LocalSymmetryReport::to_json() const {
  return {{"odd_defect", odd_defect}, {"even_defect", even_defect}, {"tolerance", tolerance}, {"pass", pass}};
}

LocalSymmetryReport check_local_symmetries(const Field& f, const NodalSet& ns, double tolerance) {
  if (ns.size() < 2) fail(ErrorCode::precondition, "local symmetry check needs at least 2 nodal points");
  const TrigInterpolant u(f);
  const double L = f.grid.length();
  const double h = f.grid.h();
  // Symmetry centres are the zeros of the interpolant itself; the linear
  // crossing estimate is only used to pick the bracketing grid edge.
  std::vector<double> th = ns.coords();
  for (double& t : th) {
    double lo = std::floor(t / h) * h, hi = lo + h;
    double ulo = u(lo), uhi = u(hi);
    if (ulo == 0.0 || uhi == 0.0 || (ulo > 0.0) == (uhi > 0.0)) continue;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi), um = u(mid);
      if (um == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((um > 0.0) == (ulo > 0.0)) {
        lo = mid;
        ulo = um;
      } else {
        hi = mid;
      }
    }
    t = 0.5 * (lo + hi);
  }
  std::sort(th.begin(), th.end());
  constexpr int kOffsets = 24;
  LocalSymmetryReport r;
  r.tolerance = tolerance;
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double next = k + 1 < th.size() ? th[k + 1] : th[0] + L;
    const double prev = k > 0 ? th[k - 1] : th.back() - L;
    const double reach = 0.5 * std::min(next - th[k], th[k] - prev);
    const double mid = 0.5 * (th[k] + next), half = 0.5 * (next - th[k]);
    for (int s = 1; s <= kOffsets; ++s) {
      const double d = reach * s / kOffsets;
      r.odd_defect = std::max(r.odd_defect, std::abs(u(th[k] + d) + u(th[k] - d)));
      const double e = half * s / kOffsets;
      r.even_defect = std::max(r.even_defect, std::abs(u(mid + e) - u(mid - e)));
    }
  }
  r.pass = r.odd_defect <= tolerance && r.even_defect <= tolerance;
  return r;
}

nlohmann::json DecayFit::to_json() const {
  return {{"kappa", kappa},         {"C", c_fit},           {"rms_residual", rms_residual},
          {"window", {window_lo, window_hi}}, {"points_used", points_used}};
}

DecayFit fit_decay(const Field& f, const NodalSet& ns) {
  if (ns.empty()) fail(ErrorCode::precondition, "fit_decay needs a nonempty nodal set");
  const Grid& g = f.grid;
  DecayFit fit;
  fit.distance.resize(f.size());
  fit.gap.resize(f.size());
  const std::size_t n2 = g.kind() == GridKind::torus ? g.n2() : 1;
  double dmax = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t k = i * n2 + j;
      const double c = g.coord(i);
      fit.distance[k] = distance_to_set(ns, c, g.kind() == GridKind::torus ? g.coord2(j) : 0.0);
      const double u = f.values[k];
      fit.gap[k] = std::abs(u * u - 1.0);
      dmax = std::max(dmax, fit.distance[k]);
    }
  }
  fit.window_lo = 2.0 * f.epsilon;
  fit.window_hi = dmax - f.epsilon;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double d = fit.distance[k];
    if (d < fit.window_lo || d > fit.window_hi || fit.gap[k] <= kDecayFloor) continue;
    const double y = std::log(fit.gap[k]);
    sx += d;
    sy += y;
    sxx += d * d;
    sxy += d * y;
    ++cnt;
  }
  if (cnt < 10) {
    std::ostringstream os;
    os << "fit_decay: only " << cnt << " points in the window [" << fit.window_lo << ", " << fit.window_hi << "]";
    fail(ErrorCode::precondition, os.str());
  }
  const double nn = static_cast<double>(cnt);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / nn;
  fit.kappa = -slope;
  fit.c_fit = std::exp(intercept);
  fit.points_used = cnt;

  double ss = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double d = fit.distance[k];
    if (d < fit.window_lo || d > fit.window_hi || fit.gap[k] <= kDecayFloor) continue;
    const double r = std::log(fit.gap[k]) - (intercept + slope * d);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / nn);
  return fit;
}

}  // namespace dwpt
