#include "lortz/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "lortz/errors.hpp"

namespace lortz {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("config: unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string default_run_json() {
  return R"({
  "profile": {"omega_rho_coeffs": [1.0, 1.0], "r_max": 1.5},
  "domain": {
    "epsilon": 0.1,
    "m": 8,
    "axial_period": 6.283185307179586,
    "shape_modes": [{"theta_harmonic": 8, "z_harmonic": 1, "cos_amp": 1.0, "sin_amp": 0.0}],
    "grid": {"n_s": 24, "n_theta": 64, "n_z": 24}
  },
  "iteration": {"max_iters": 50, "tol": 1e-9},
  "numerics": {"radial_order": 4},
  "diagnostics": {"n_orbits": 50, "seed": 12345},
  "output": {"dir": "out", "cadence": 0, "save_solution": true}
})";
}

RunFile parse_run_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: JSON parse failure: ") + err.what());
  }
  reject_unknown(j, {"profile", "domain", "iteration", "numerics", "diagnostics",
                     "output"},
                 "the top level");

  RunFile out;
  RunConfig& cfg = out.run;

  if (j.contains("profile")) {
    const json& p = j["profile"];
    reject_unknown(p, {"omega_rho_coeffs", "r_max"}, "profile");
    if (p.contains("omega_rho_coeffs")) {
      const auto coeffs = p["omega_rho_coeffs"].get<std::vector<double>>();
      if (coeffs.empty()) throw ConfigError("config: empty omega_rho_coeffs");
      cfg.profile.omega_rho_coeffs =
          Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
    }
    maybe(p, "r_max", cfg.profile.r_max);
  }

  if (j.contains("domain")) {
    const json& d = j["domain"];
    reject_unknown(d, {"epsilon", "m", "axial_period", "shape_modes", "grid"},
                   "domain");
    maybe(d, "epsilon", cfg.domain.epsilon);
    maybe(d, "m", cfg.domain.m);
    maybe(d, "axial_period", cfg.domain.axial_period);
    if (d.contains("grid")) {
      const json& gj = d["grid"];
      reject_unknown(gj, {"n_s", "n_theta", "n_z"}, "domain.grid");
      maybe(gj, "n_s", cfg.domain.grid.n_s);
      maybe(gj, "n_theta", cfg.domain.grid.n_theta);
      maybe(gj, "n_z", cfg.domain.grid.n_z);
    }
    if (d.contains("shape_modes")) {
      cfg.domain.shape.modes.clear();
      for (const json& mj : d["shape_modes"]) {
        reject_unknown(mj, {"theta_harmonic", "z_harmonic", "cos_amp", "sin_amp"},
                       "domain.shape_modes[]");
        ShapeMode mode;
        maybe(mj, "theta_harmonic", mode.theta_harmonic);
        maybe(mj, "z_harmonic", mode.z_harmonic);
        maybe(mj, "cos_amp", mode.cos_amp);
        maybe(mj, "sin_amp", mode.sin_amp);
        cfg.domain.shape.modes.push_back(mode);
      }
    } else {
      cfg.domain.shape.modes = {ShapeMode{cfg.domain.m, 1, 1.0, 0.0}};
    }
  } else {
    cfg.domain.shape.modes = {ShapeMode{cfg.domain.m, 1, 1.0, 0.0}};
  }
  cfg.domain.validate();

  if (j.contains("iteration")) {
    const json& it = j["iteration"];
    reject_unknown(it, {"max_iters", "tol"}, "iteration");
    maybe(it, "max_iters", cfg.max_iters);
    maybe(it, "tol", cfg.tol);
  }

  if (j.contains("numerics")) {
    const json& nj = j["numerics"];
    reject_unknown(nj,
                   {"radial_order", "trace_rel_tol", "trace_abs_tol", "divcurl_tol",
                    "divcurl_iter_cap_factor", "compat_div_tol", "compat_flux_tol",
                    "harmonic_tol", "harmonic_iter_cap_factor",
                    "cut_mismatch_factor"},
                   "numerics");
    maybe(nj, "radial_order", cfg.numerics.radial_order);
    maybe(nj, "trace_rel_tol", cfg.numerics.trace.rel_tol);
    maybe(nj, "trace_abs_tol", cfg.numerics.trace.abs_tol);
    maybe(nj, "divcurl_tol", cfg.numerics.divcurl.tol);
    maybe(nj, "divcurl_iter_cap_factor", cfg.numerics.divcurl.iter_cap_factor);
    maybe(nj, "compat_div_tol", cfg.numerics.divcurl.compat_div_tol);
    maybe(nj, "compat_flux_tol", cfg.numerics.divcurl.compat_flux_tol);
    maybe(nj, "harmonic_tol", cfg.numerics.harmonic.tol);
    maybe(nj, "harmonic_iter_cap_factor", cfg.numerics.harmonic.iter_cap_factor);
    maybe(nj, "cut_mismatch_factor", cfg.numerics.cut_mismatch_factor);
  }

  if (j.contains("diagnostics")) {
    const json& dj = j["diagnostics"];
    reject_unknown(dj, {"n_orbits", "seed", "thresholds"}, "diagnostics");
    maybe(dj, "n_orbits", cfg.diagnostics_orbits);
    maybe(dj, "seed", cfg.seed);
    if (dj.contains("thresholds")) {
      const json& tj = dj["thresholds"];
      reject_unknown(tj,
                     {"euler_residual", "div_residual", "tangency",
                      "bernoulli_variation", "parity", "mfold", "omega_jump"},
                     "diagnostics.thresholds");
      maybe(tj, "euler_residual", out.thresholds.euler_residual);
      maybe(tj, "div_residual", out.thresholds.div_residual);
      maybe(tj, "tangency", out.thresholds.tangency);
      maybe(tj, "bernoulli_variation", out.thresholds.bernoulli_variation);
      maybe(tj, "parity", out.thresholds.parity);
      maybe(tj, "mfold", out.thresholds.mfold);
      maybe(tj, "omega_jump", out.thresholds.omega_jump);
    }
  }

  if (j.contains("output")) {
    const json& oj = j["output"];
    reject_unknown(oj, {"dir", "cadence", "save_solution"}, "output");
    maybe(oj, "dir", out.output.dir);
    maybe(oj, "cadence", out.output.cadence);
    maybe(oj, "save_solution", out.output.save_solution);
  }
  return out;
}

RunFile parse_run_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_json(ss.str());
}

namespace {

constexpr char kMagic[8] = {'L', 'R', 'T', 'Z', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

struct FieldHeader {
  char magic[8];
  std::uint32_t version;
  std::uint8_t components;
  std::uint8_t cut;
  std::uint16_t reserved;
  std::uint64_t domain_hash;
  std::uint32_t n_s, n_theta, n_z;
  std::uint32_t pad;
};
static_assert(sizeof(FieldHeader) == 40);

void write_header(std::ofstream& out, const MappedGrid& g, int components, bool cut) {
  FieldHeader h{};
  std::memcpy(h.magic, kMagic, 8);
  h.version = kVersion;
  h.components = static_cast<std::uint8_t>(components);
  h.cut = cut ? 1 : 0;
  h.reserved = 0;
  h.pad = 0;
  h.n_s = g.ns();
  h.n_theta = g.ntheta();
  h.n_z = g.nz();
  h.domain_hash = g.domain().hash();
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
}

FieldHeader read_header(std::ifstream& in, const MappedGrid& g, int components,
                        const std::string& path) {
  FieldHeader h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || std::memcmp(h.magic, kMagic, 8) != 0)
    throw VersionMismatch("io: " + path + " is not a field file");
  if (h.version != kVersion)
    throw VersionMismatch("io: " + path + " has version " +
                          std::to_string(h.version) + ", expected " +
                          std::to_string(kVersion));
  if (h.components != components)
    throw VersionMismatch("io: " + path + " holds a " +
                          std::to_string(h.components) + "-component field");
  if (h.n_s != static_cast<std::uint32_t>(g.ns()) ||
      h.n_theta != static_cast<std::uint32_t>(g.ntheta()) ||
      h.n_z != static_cast<std::uint32_t>(g.nz()) ||
      h.domain_hash != g.domain().hash())
    throw HashMismatch("io: " + path + " was saved on a different domain/grid");
  return h;
}

}  // namespace

void save_field(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("io: cannot write " + path);
  write_header(out, *f.grid, 1, f.cut);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            sizeof(double) * f.values.size());
}

void save_field(const std::string& path, const VectorField& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("io: cannot write " + path);
  write_header(out, *v.grid, 3, false);
  for (int c = 0; c < 3; ++c)
    out.write(reinterpret_cast<const char*>(v.comp(c).data()),
              sizeof(double) * v.comp(c).size());
}

ScalarField load_scalar_field(const std::string& path,
                              std::shared_ptr<const MappedGrid> grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("io: cannot open " + path);
  const FieldHeader h = read_header(in, *grid, 1, path);
  ScalarField f(grid, h.cut != 0);
  in.read(reinterpret_cast<char*>(f.values.data()), sizeof(double) * f.values.size());
  if (!in) throw VersionMismatch("io: " + path + " truncated");
  return f;
}

VectorField load_vector_field(const std::string& path,
                              std::shared_ptr<const MappedGrid> grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("io: cannot open " + path);
  read_header(in, *grid, 3, path);
  VectorField v(grid);
  for (int c = 0; c < 3; ++c)
    in.read(reinterpret_cast<char*>(v.comp(c).data()),
            sizeof(double) * v.comp(c).size());
  if (!in) throw VersionMismatch("io: " + path + " truncated");
  return v;
}

void export_vtk(const std::string& path, const VectorField& u,
                const std::vector<std::pair<std::string, const ScalarField*>>& scalars) {
  const auto& g = *u.grid;
  std::ofstream out(path);
  if (!out) throw ConfigError("io: cannot write " + path);
  const int ns = g.ns(), nt = g.ntheta() + 1, nz = g.nz() + 1;
  out << "# vtk DataFile Version 3.0\n";
  out << "steady Euler field on a perturbed periodic cylinder\n";
  out << "ASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << ns << " " << nt << " " << nz << "\n";
  const long npts = static_cast<long>(ns) * nt * nz;
  out << "POINTS " << npts << " double\n";
  out.precision(9);
  auto wrap = [&g](int j, int k) {
    return std::make_pair(j % g.ntheta(), k % g.nz());
  };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        const auto [jj, kk] = wrap(j, k);
        Vec3 p = g.node_cartesian(g.idx(i, jj, kk));
        if (k == g.nz()) p[2] = g.domain().axial_period;  // closing seam
        out << p[0] << " " << p[1] << " " << p[2] << "\n";
      }
  out << "POINT_DATA " << npts << "\n";
  out << "VECTORS velocity double\n";
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) {
        const auto [jj, kk] = wrap(j, k);
        const Eigen::Index n = g.idx(i, jj, kk);
        out << u.x[n] << " " << u.y[n] << " " << u.z[n] << "\n";
      }
  for (const auto& [name, field] : scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < nt; ++j)
        for (int i = 0; i < ns; ++i) {
          const auto [jj, kk] = wrap(j, k);
          out << field->values[g.idx(i, jj, kk)] << "\n";
        }
  }
}

void export_orbit_csv(const std::string& path, const Orbit& orbit) {
  std::ofstream out(path);
  if (!out) throw ConfigError("io: cannot write " + path);
  out.precision(15);
  out << "t,x,y,z\n";
  for (const auto& [t, p] : orbit.samples)
    out << t << "," << p[0] << "," << p[1] << "," << p[2] << "\n";
}

std::string report_to_json(const SolutionReport& rep) {
  json j;
  j["euler_residual_rel"] = rep.euler_residual_rel;
  j["div_residual"] = rep.div_residual;
  j["tangency_residual"] = rep.tangency_residual;
  j["bernoulli_orbit_variation"] = rep.bernoulli_orbit_variation;
  j["omega_jump"] = rep.omega_jump;
  j["parity_residual_odd"] = rep.parity_residual_odd;
  j["mfold_residual"] = rep.mfold_residual;
  j["fibration_monotone"] = rep.fibration_monotone;
  j["fibration_margin"] = rep.fibration_margin;
  j["closure_error"] = rep.closure_error;
  j["mode_energy_ratio"] = rep.mode_energy_ratio;
  j["seed"] = rep.seed;
  return j.dump(2);
}

std::string convergence_to_json(const ConvergenceReport& rep) {
  json j;
  j["deltas"] = rep.deltas;
  j["deltas_l2"] = rep.deltas_l2;
  j["ratios"] = rep.ratios;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["tol_abs"] = rep.tol_abs;
  j["decay_r_squared"] = rep.decay_r_squared;
  j["decay_rate"] = rep.decay_rate;
  j["poincare_ratio"] = rep.poincare_ratio;
  return j.dump(2);
}

std::string contraction_to_json(const ContractionReport& rep) {
  json j = json::array();
  for (const auto& e : rep.entries) {
    json ej;
    ej["m"] = e.m;
    ej["converged"] = e.converged;
    ej["rho"] = e.rho;
    ej["rho_times_m"] = e.rho * e.m;
    ej["steps_used"] = e.steps_used;
    if (!e.error.empty()) ej["error"] = e.error;
    ej["deltas"] = e.report.deltas;
    j.push_back(ej);
  }
  return j.dump(2);
}

}  // namespace lortz
