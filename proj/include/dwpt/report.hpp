#pragma once

#include <filesystem>
#include <iosfwd>

#include "dwpt/experiments.hpp"
#include "dwpt/nodal.hpp"
#include "dwpt/solvers.hpp"

namespace dwpt {

// CSV with a header row. Floats are written with 17 significant digits.

void write_csv(std::ostream& out, const Table& t);

/// Profile: (coordinate, value) rows; torus fields get (theta, y, value).
void emit_plotdata(std::ostream& out, const Field& f);
/// Decay fit: "# C=..., kappa=..." comment line, then (distance, log_gap,
/// fitted) for every point with a positive gap.
void emit_plotdata(std::ostream& out, const DecayFit& fit);
/// Flow trace: (step, energy, angle_1, ..., angle_k); rows with fewer angles
/// leave the trailing cells empty.
void emit_plotdata(std::ostream& out, const FlowTrace& trace);
/// An experiment's measurement table (the m-rigidity census has one row per run).
void emit_plotdata(std::ostream& out, const ExperimentReport& report);

template <class T>
void emit_plotdata(const T& item, const std::filesystem::path& path);

/// Pretty-printed JSON followed by a newline.
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace dwpt
