#pragma once

#include <string>

#include "lortz/diagnostics.hpp"
#include "lortz/fieldline.hpp"
#include "lortz/iteration.hpp"

namespace lortz {

// Pass/fail thresholds applied by the `verify` subcommand.
struct VerifyThresholds {
  double euler_residual = 5e-2;
  double div_residual = 1e-3;
  double tangency = 1e-9;
  double bernoulli_variation = 1e-5;
  double parity = 1e-7;
  double mfold = 1e-7;
  double omega_jump = 5e-2;
};

struct OutputConfig {
  std::string dir = "out";
  int cadence = 0;  // save the iterate every N steps (0 = never)
  bool save_solution = true;
};

struct RunFile {
  RunConfig run;
  VerifyThresholds thresholds;
  OutputConfig output;
};

// Strict parser: unknown keys anywhere raise ConfigError naming the key.
RunFile parse_run_file(const std::string& path);
RunFile parse_run_json(const std::string& text);
std::string default_run_json();

// Lossless little-endian binary field files carrying the grid dimensions and
// the domain hash; loading onto a mismatched grid raises HashMismatch.
void save_field(const std::string& path, const ScalarField& f);
void save_field(const std::string& path, const VectorField& v);
ScalarField load_scalar_field(const std::string& path,
                              std::shared_ptr<const MappedGrid> grid);
VectorField load_vector_field(const std::string& path,
                              std::shared_ptr<const MappedGrid> grid);

// Legacy-ASCII VTK structured grid with the velocity and any named scalars;
// the theta and z seams are duplicated so surfaces close in viewers.
void export_vtk(const std::string& path, const VectorField& u,
                const std::vector<std::pair<std::string, const ScalarField*>>& scalars);

void export_orbit_csv(const std::string& path, const Orbit& orbit);

std::string report_to_json(const SolutionReport& rep);
std::string convergence_to_json(const ConvergenceReport& rep);
std::string contraction_to_json(const ContractionReport& rep);

}  // namespace lortz
