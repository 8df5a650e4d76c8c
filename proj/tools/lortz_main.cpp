// Command-line driver: run the iteration, trace orbits of a saved field,
// verify a saved solution against the physics thresholds, sweep the symmetry
// order, and export fields for external viewers.
//
// Exit codes: 0 success, 1 physics failure, 2 usage/config error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lortz/io.hpp"

namespace fs = std::filesystem;
using namespace lortz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPhysics = 1;
constexpr int kExitUsage = 2;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("io: cannot write " + path.string());
  out << text << "\n";
}

struct CommonArgs {
  std::string config;
  std::string out_dir;
  int threads = 1;
  unsigned long long seed = 0;
  bool seed_set = false;
};

RunFile load_config(CommonArgs& args) {
  RunFile rf = parse_run_file(args.config);
  if (!args.out_dir.empty()) rf.output.dir = args.out_dir;
  rf.run.numerics.trace.threads = std::max(1, args.threads);
  if (args.seed_set) rf.run.seed = args.seed;
  return rf;
}

int cmd_run(CommonArgs& args, const std::string& init_path) {
  RunFile rf = load_config(args);
  fs::create_directories(rf.output.dir);
  const fs::path dir(rf.output.dir);

  LortzIterator iter(rf.run);
  std::optional<VectorField> init;
  if (!init_path.empty())
    init = load_vector_field(init_path, iter.grid());

  Solution sol;
  try {
    sol = iter.run(std::move(init));
  } catch (const NotConverged& err) {
    std::cerr << "run: " << err.what() << "\n";
    write_text(dir / "convergence.json", convergence_to_json(err.report));
    return kExitPhysics;
  }

  std::cout << "run: converged in " << sol.report.iterations
            << " steps, final delta " << sol.report.deltas.back() << " (tol "
            << sol.report.tol_abs << ")\n";
  write_text(dir / "convergence.json", convergence_to_json(sol.report));
  if (rf.output.save_solution) {
    save_field((dir / "solution_u.field").string(), sol.u);
    save_field((dir / "solution_H.field").string(), sol.clebsch.H);
    save_field((dir / "solution_T.field").string(), sol.clebsch.T);
  }
  const SolutionReport rep =
      full_report(sol.u, sol.clebsch, iter.base(), rf.run.diagnostics_orbits,
                  rf.run.seed, rf.run.numerics.trace);
  write_text(dir / "report.json", report_to_json(rep));
  std::cout << "run: euler residual " << rep.euler_residual_rel
            << ", bernoulli variation " << rep.bernoulli_orbit_variation << "\n";
  return kExitOk;
}

int cmd_trace(CommonArgs& args, const std::string& field_path, int n_orbits) {
  RunFile rf = load_config(args);
  fs::create_directories(rf.output.dir);
  const fs::path dir(rf.output.dir);

  auto grid = std::make_shared<MappedGrid>(rf.run.domain, rf.run.numerics.radial_order);
  const BaseState base(rf.run.profile);
  const VectorField u = field_path.empty()
                            ? sample_base_velocity(grid, base)
                            : load_vector_field(field_path, grid);
  TraceOptions topts = rf.run.numerics.trace;
  topts.record_samples = true;
  OrbitTracer tracer(grid, base, u, topts);

  std::mt19937_64 rng(rf.run.seed);
  std::uniform_real_distribution<double> us(0.2, 0.9), uang(0.0, 2.0 * EIGEN_PI),
      uz(0.0, rf.run.domain.axial_period);
  double worst = 0.0;
  for (int n = 0; n < n_orbits; ++n) {
    const Vec3 seed = to_cartesian({us(rng), uang(rng), uz(rng)}, rf.run.domain);
    const Orbit orbit = tracer.trace_orbit(seed, true);
    export_orbit_csv((dir / ("orbit_" + std::to_string(n) + ".csv")).string(), orbit);
    worst = std::max(worst, orbit.closure_error);
    std::cout << "trace: orbit " << n << " period " << orbit.period
              << " closure " << orbit.closure_error << "\n";
  }
  std::cout << "trace: worst closure error " << worst << "\n";
  return kExitOk;
}

int cmd_verify(CommonArgs& args, const std::string& field_path) {
  RunFile rf = load_config(args);
  fs::create_directories(rf.output.dir);

  auto grid = std::make_shared<MappedGrid>(rf.run.domain, rf.run.numerics.radial_order);
  const BaseState base(rf.run.profile);
  const VectorField u = load_vector_field(field_path, grid);

  ClebschOptions copts;
  copts.trace = rf.run.numerics.trace;
  copts.cut_mismatch_factor = rf.run.numerics.cut_mismatch_factor;
  const ClebschData data = build_clebsch(u, base, copts);
  const SolutionReport rep = full_report(u, data, base, rf.run.diagnostics_orbits,
                                         rf.run.seed, rf.run.numerics.trace);
  write_text(fs::path(rf.output.dir) / "report.json", report_to_json(rep));

  const VerifyThresholds& th = rf.thresholds;
  int failures = 0;
  auto check = [&failures](const char* name, double value, double limit) {
    const bool ok = value <= limit;
    std::cout << (ok ? "  [ok]   " : "  [FAIL] ") << name << " = " << value
              << " (limit " << limit << ")\n";
    if (!ok) ++failures;
  };
  std::cout << "verify:\n";
  check("euler_residual", rep.euler_residual_rel, th.euler_residual);
  check("div_residual", rep.div_residual, th.div_residual);
  check("tangency_residual", rep.tangency_residual, th.tangency);
  check("bernoulli_orbit_variation", rep.bernoulli_orbit_variation,
        th.bernoulli_variation);
  check("parity_residual_odd", rep.parity_residual_odd, th.parity);
  check("mfold_residual", rep.mfold_residual, th.mfold);
  check("omega_jump", rep.omega_jump, th.omega_jump);
  if (!rep.fibration_monotone) {
    std::cout << "  [FAIL] fibration_monotone = false\n";
    ++failures;
  } else {
    std::cout << "  [ok]   fibration_monotone (margin " << rep.fibration_margin
              << ")\n";
  }
  return failures == 0 ? kExitOk : kExitPhysics;
}

int cmd_sweep(CommonArgs& args, std::vector<int> m_list) {
  RunFile rf = load_config(args);
  fs::create_directories(rf.output.dir);
  if (m_list.empty()) m_list = {4, 8, 16};
  const ContractionReport rep = contraction_vs_m(rf.run, m_list);
  write_text(fs::path(rf.output.dir) / "sweep_m.json", contraction_to_json(rep));
  bool any_failed = false;
  for (const auto& e : rep.entries) {
    std::cout << "sweep-m: m = " << e.m << " rho = " << e.rho
              << " rho*m = " << e.rho * e.m
              << (e.converged ? "" : " [not converged]") << "\n";
    if (!e.error.empty() && e.report.deltas.empty()) any_failed = true;
  }
  return any_failed ? kExitPhysics : kExitOk;
}

int cmd_export(CommonArgs& args, const std::string& field_path,
               const std::string& format, const std::string& out_path) {
  RunFile rf = load_config(args);
  auto grid = std::make_shared<MappedGrid>(rf.run.domain, rf.run.numerics.radial_order);
  const VectorField u = load_vector_field(field_path, grid);

  // Companion scalars live next to the velocity file by convention.
  const fs::path base_path(field_path);
  auto companion = [&base_path, &grid](const std::string& tag) {
    fs::path p = base_path;
    std::string name = p.filename().string();
    const auto pos = name.rfind("_u.field");
    if (pos == std::string::npos) return std::optional<ScalarField>();
    name.replace(pos, std::string::npos, "_" + tag + ".field");
    p.replace_filename(name);
    if (!fs::exists(p)) return std::optional<ScalarField>();
    return std::optional<ScalarField>(load_scalar_field(p.string(), grid));
  };

  if (format == "vtk") {
    const auto H = companion("H");
    const auto T = companion("T");
    std::vector<std::pair<std::string, const ScalarField*>> scalars;
    if (H) scalars.emplace_back("bernoulli", &*H);
    if (T) scalars.emplace_back("period", &*T);
    export_vtk(out_path, u, scalars);
  } else if (format == "csv") {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("io: cannot write " + out_path);
    out.precision(15);
    out << "x,y,z,ux,uy,uz\n";
    for (Eigen::Index n = 0; n < grid->size(); ++n) {
      const Vec3 p = grid->node_cartesian(n);
      out << p[0] << "," << p[1] << "," << p[2] << "," << u.x[n] << "," << u.y[n]
          << "," << u.z[n] << "\n";
    }
  } else {
    throw ConfigError("export: unknown format " + format);
  }
  std::cout << "export: wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady Euler equilibria on perturbed periodic cylinders"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string init_path, field_path, format = "vtk", out_path = "solution.vtk";
  std::vector<int> m_list;
  int n_orbits = 8;

  auto add_common = [&args](CLI::App* cmd, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config, "run configuration JSON");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory override");
    cmd->add_option("--threads", args.threads, "worker threads for orbit tracing");
    cmd->add_option("--seed", args.seed, "seed for randomized diagnostics")
        ->each([&args](const std::string&) { args.seed_set = true; });
  };

  auto* run_cmd = app.add_subcommand("run", "run the full iteration from a config");
  add_common(run_cmd);
  run_cmd->add_option("--init", init_path, "warm-start velocity field file");

  auto* trace_cmd = app.add_subcommand("trace", "trace orbits of a saved field");
  add_common(trace_cmd);
  trace_cmd->add_option("--field", field_path, "velocity field file (default: base flow)");
  trace_cmd->add_option("--n-orbits", n_orbits, "number of random-seed orbits");

  auto* verify_cmd = app.add_subcommand("verify", "diagnostics on a saved solution");
  add_common(verify_cmd);
  verify_cmd->add_option("--field", field_path, "velocity field file")->required();

  auto* sweep_cmd = app.add_subcommand("sweep-m", "contraction ratio vs symmetry order");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--m-list", m_list, "symmetry orders to sweep");

  auto* export_cmd = app.add_subcommand("export", "convert saved fields to VTK/CSV");
  add_common(export_cmd);
  export_cmd->add_option("--field", field_path, "velocity field file")->required();
  export_cmd->add_option("--format", format, "vtk or csv");
  export_cmd->add_option("--output", out_path, "output file path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(args, init_path);
    if (trace_cmd->parsed()) return cmd_trace(args, field_path, n_orbits);
    if (verify_cmd->parsed()) return cmd_verify(args, field_path);
    if (sweep_cmd->parsed()) return cmd_sweep(args, m_list);
    if (export_cmd->parsed()) return cmd_export(args, field_path, format, out_path);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const VersionMismatch& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const HashMismatch& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const LortzError& err) {
    std::cerr << "physics failure: " << err.what() << "\n";
    return kExitPhysics;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitPhysics;
  }
  return kExitUsage;
}
