#include "dwpt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "dwpt/error.hpp"

namespace dwpt {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quoted(cells[i]);
  out << '\n';
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
  row(out, t.header);
  for (const auto& r : t.rows) row(out, r);
}

void emit_plotdata(std::ostream& out, const Field& f) {
  const Grid& g = f.grid;
  if (g.kind() == GridKind::torus) {
    out << "theta,y,value\n";
    for (std::size_t i = 0; i < g.n(); ++i)
      for (std::size_t j = 0; j < g.n2(); ++j)
        out << num(g.coord(i)) << ',' << num(g.coord2(j)) << ',' << num(f.values[i * g.n2() + j]) << '\n';
    return;
  }
  out << (g.kind() == GridKind::interval ? "x" : "theta") << ",value\n";
  for (std::size_t i = 0; i < g.n(); ++i) out << num(g.coord(i)) << ',' << num(f.values[i]) << '\n';
}

void emit_plotdata(std::ostream& out, const DecayFit& fit) {
  out << "# C=" << num(fit.c_fit) << ", kappa=" << num(fit.kappa) << '\n';
  out << "distance,log_gap,fitted\n";
  const double log_c = std::log(fit.c_fit);
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < fit.gap.size(); ++k)
    if (fit.gap[k] > 0.0) order.push_back(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fit.distance[a] < fit.distance[b]; });
  for (std::size_t k : order)
    out << num(fit.distance[k]) << ',' << num(std::log(fit.gap[k])) << ',' << num(log_c - fit.kappa * fit.distance[k])
        << '\n';
}

void emit_plotdata(std::ostream& out, const FlowTrace& trace) {
  std::size_t width = 0;
  for (const auto& a : trace.angles) width = std::max(width, a.size());
  out << "step,energy";
  for (std::size_t k = 0; k < width; ++k) out << ",angle_" << k + 1;
  out << '\n';
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    out << trace.steps[s] << ',' << num(trace.energies[s]);
    const auto& a = trace.angles[s];
    for (std::size_t k = 0; k < width; ++k) out << ',' << (k < a.size() ? num(a[k]) : "");
    out << '\n';
  }
}

void emit_plotdata(std::ostream& out, const ExperimentReport& report) { write_csv(out, report.table); }

template <class T>
void emit_plotdata(const T& item, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  emit_plotdata(out, item);
  out.flush();
  if (!out) fail(ErrorCode::io, "write to '" + path.string() + "' failed");
}

template void emit_plotdata<Field>(const Field&, const std::filesystem::path&);
template void emit_plotdata<DecayFit>(const DecayFit&, const std::filesystem::path&);
template void emit_plotdata<FlowTrace>(const FlowTrace&, const std::filesystem::path&);
template void emit_plotdata<ExperimentReport>(const ExperimentReport&, const std::filesystem::path&);

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) fail(ErrorCode::io, "write to '" + path.string() + "' failed");
}

}  // namespace dwpt
