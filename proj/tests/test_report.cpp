#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dwpt/error.hpp"
#include "dwpt/report.hpp"

using namespace dwpt;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t columns(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("profile csv has one row per grid point") {
    const auto g = Grid::circle(64);
    const Field f = sample_fiber(g, 0.1, [](double t) { return std::sin(2 * t); });
    std::ostringstream out;
    emit_plotdata(out, f);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 65);
    CHECK(rows[0] == "theta,value");
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(columns(rows[k]) == 2);
    CHECK(std::stod(rows[17].substr(rows[17].find(',') + 1)) == doctest::Approx(std::sin(2 * g.coord(16))));

    std::ostringstream torus;
    emit_plotdata(torus, sample_fiber(Grid::torus(16, 16, kTwoPi, 1.0), 0.3, [](double t) { return t; }));
    const auto trows = lines_of(torus.str());
    CHECK(trows.size() == 257);
    CHECK(trows[0] == "theta,y,value");
  }

  TEST_CASE("decay csv carries the fitted constants in a comment") {
    DecayFit fit;
    fit.kappa = 14.0;
    fit.c_fit = 2.5;
    fit.distance = {0.3, 0.1, 0.2, 0.0};
    fit.gap = {std::exp(-4.0), std::exp(-1.0), std::exp(-2.5), 0.0};
    std::ostringstream out;
    emit_plotdata(out, fit);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].rfind("# C=2.5", 0) == 0);
    CHECK(rows[0].find("kappa=14") != std::string::npos);
    CHECK(rows[1] == "distance,log_gap,fitted");
    CHECK(rows[2].rfind("0.10000000000000001,-1,", 0) == 0);
    for (std::size_t k = 2; k < rows.size(); ++k) CHECK(columns(rows[k]) == 3);
  }

  TEST_CASE("flow trace csv") {
    FlowTrace t;
    t.steps = {0, 10};
    t.energies = {2.0, 1.5};
    t.angles = {{0.1, 3.2}, {0.2}};
    std::ostringstream out;
    emit_plotdata(out, t);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "step,energy,angle_1,angle_2");
    CHECK(rows[2] == "10,1.5,0.20000000000000001,");
  }

  TEST_CASE("census table writes one row per run and quotes awkward cells") {
    ExperimentReport rep;
    rep.table.header = {"seed", "epsilon", "geometry", "outcome", "nodal_count", "max_spacing_deviation"};
    rep.table.rows = {{"1", "0.1", "circle", "converged_symmetric", "4", "1e-12"},
                      {"2", "0.1", "torus", "non_converged", "0", ""},
                      {"3", "0.15", "circle", "note, with \"quotes\"", "4", ""}};
    std::ostringstream out;
    emit_plotdata(out, rep);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "seed,epsilon,geometry,outcome,nodal_count,max_spacing_deviation");
    CHECK(rows[3] == "3,0.15,circle,\"note, with \"\"quotes\"\"\",4,");
  }

  TEST_CASE("file output and io failures") {
    const auto dir = std::filesystem::temp_directory_path() / "dwpt_report_test";
    std::filesystem::create_directories(dir);
    const Field f = sample_fiber(Grid::interval(17, 1.0), 0.2, [](double x) { return x; });
    emit_plotdata(f, dir / "profile.csv");
    std::ifstream in(dir / "profile.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,value");
    write_json({{"a", 1}}, dir / "r.json");
    CHECK(std::filesystem::file_size(dir / "r.json") > 0);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(emit_plotdata(f, "/nonexistent/dir/p.csv"), Error);
  }
}
