#include "nlsred/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nlsred/ground_state_1d.hpp"
#include "nlsred/state_file.hpp"

namespace nlsred {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

fs::path out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + config.out_dir + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

Json envelope(const RunConfig& config, const std::string& command) {
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash(config);
  j["generated_at"] = timestamp();
  return j;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

// NaN and infinities become JSON null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

SpectralField3D dz(const SpectralField3D& u) {
  SpectralField3D out = u;
  const auto& xi = u.grid().wavenumbers();
  for (Eigen::Index k = 0; k < out.coeffs().rows(); ++k)
    for (Eigen::Index n = 0; n < out.coeffs().cols(); ++n) out.coeffs()(k, n) *= cdouble(0.0, xi[n]);
  out.coeffs().col(u.grid().nyquist()).setZero();
  out.set_real_valued(false);
  return out;
}

Json record_json(const GroundStateRecord& rec, double gn_constant) {
  Json j;
  j["omega"] = rec.omega;
  j["mass"] = rec.mass;
  j["mu"] = rec.mu;
  j["energy"] = rec.energy;
  j["sigma_y_sq"] = rec.sigma_y_sq;
  j["forbidden_region_bound"] = forbidden_region_bound(rec.mass, rec.omega, gn_constant);
  j["admissibility_threshold"] = admissibility_threshold(rec.mass, gn_constant);
  j["residual_el"] = rec.residual_el;
  j["residual_scale"] = rec.residual_scale;
  j["pohozaev"] = {rec.pohozaev[0], rec.pohozaev[1]};
  j["pohozaev_scale"] = l4_norm_4(rec.state);
  j["energy_identity"] = energy_identity_check(rec);
  j["iterations"] = rec.iterations;
  j["max_energy_rise"] = rec.max_energy_rise;
  return j;
}

struct RecordChecks {
  bool el = false;
  bool pohozaev = false;
  bool energy_identity = false;
  bool forbidden = false;
  bool all() const { return el && pohozaev && energy_identity && forbidden; }
};

RecordChecks check_record(const GroundStateRecord& rec, double gn_constant) {
  const double poh_scale = l4_norm_4(rec.state);
  RecordChecks c;
  c.el = rec.residual_el < 1e-7 * rec.residual_scale;
  c.pohozaev = std::abs(rec.pohozaev[0]) < 1e-6 * poh_scale && std::abs(rec.pohozaev[1]) < 1e-6 * poh_scale;
  c.energy_identity = std::abs(energy_identity_check(rec)) < 1e-6 * std::abs(rec.energy);
  c.forbidden = rec.sigma_y_sq <= forbidden_region_bound(rec.mass, rec.omega, gn_constant);
  return c;
}

StateHeader header_for(const GroundStateRecord& rec) {
  StateHeader h;
  h.kind = "ground_state";
  h.omega = rec.omega;
  h.mass = rec.mass;
  h.mu = rec.mu;
  h.energy = rec.energy;
  return h;
}

// Ground state on (basis, grid) from a state file when given, else from the
// configured ω and m.
GroundStateRecord obtain_ground_state(const RunConfig& config, const std::optional<std::string>& state_path,
                                      BasisPtr basis, GridPtr grid) {
  if (!state_path) return minimize(config.omega, config.mass, basis, grid, config.flow());
  const StateFile file = load_state(*state_path);
  const StateHeader& h = file.header;
  if (!(h.omega > 0.0) || !(h.mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "state file lacks omega or mass");
  const bool same = h.modes == basis->mode_count() && h.quad_points == basis->quad_size() &&
                    h.axial_points == grid->point_count() && h.half_length == grid->half_length();
  const SpectralField3D init = same ? file.field : resample(file.field, basis, grid);
  return minimize(h.omega, h.mass, basis, grid, config.flow(), init);
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  return line + "\n";
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::Io:
    case ErrorKind::VersionMismatch:
      return kExitUsage;
    case ErrorKind::Underresolved:
    case ErrorKind::NonConvergence:
    case ErrorKind::ConstraintBreach:
    case ErrorKind::BlowUp:
    case ErrorKind::Vacuous:
      return kExitNumerical;
  }
  return kExitNumerical;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Underresolved: return "underresolved";
    case ErrorKind::ShapeMismatch: return "shape_mismatch";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::ConstraintBreach: return "constraint_breach";
    case ErrorKind::BlowUp: return "blow_up";
    case ErrorKind::Io: return "io";
    case ErrorKind::VersionMismatch: return "version_mismatch";
    case ErrorKind::Vacuous: return "vacuous";
  }
  return "unknown";
}

SpectralField3D resample(const SpectralField3D& u, BasisPtr basis, GridPtr grid) {
  const int rows = std::min(static_cast<int>(u.coeffs().rows()), basis->mode_count());
  const bool same_axial =
      grid->point_count() == u.grid().point_count() && grid->half_length() == u.grid().half_length();
  CMatrix c = CMatrix::Zero(basis->mode_count(), grid->point_count());
  for (int k = 0; k < rows; ++k) {
    if (same_axial) {
      c.row(k) = u.coeffs().row(k);
      continue;
    }
    const Field1D line(u.grid_ptr(), u.coeffs().row(k).transpose());
    Eigen::VectorXcd values = Eigen::VectorXcd::Zero(grid->point_count());
    for (int j = 0; j < grid->point_count(); ++j) {
      const double z = grid->nodes()[j];
      if (std::abs(z) <= u.grid().half_length()) values[j] = evaluate_with_derivatives(line, z)[0];
    }
    c.row(k) = Field1D::from_values(grid, values).coeffs().transpose();
  }
  return SpectralField3D(basis, grid, std::move(c), u.real_valued());
}

int cmd_ground_state(const RunConfig& config) {
  const fs::path dir = out_dir(config);
  const auto rec = minimize(config.omega, config.mass, config.basis(), config.grid(), config.flow());
  save_state((dir / "ground_state.state").string(), header_for(rec), rec.state);

  const RecordChecks checks = check_record(rec, config.gn_constant);
  Json j = envelope(config, "ground-state");
  j["record"] = record_json(rec, config.gn_constant);
  j["checks"] = {{"el_residual", checks.el},
                 {"pohozaev", checks.pohozaev},
                 {"energy_identity", checks.energy_identity},
                 {"forbidden_region", checks.forbidden}};
  j["state_file"] = "ground_state.state";
  write_json(dir / "ground_state.json", j);

  std::printf("ground state: omega %g, m %.10g, mu %.12g, E %.12g, %d iterations\n", rec.omega, rec.mass, rec.mu,
              rec.energy, rec.iterations);
  return checks.all() ? kExitPass : kExitCheckFailure;
}

int cmd_sweep(const RunConfig& config) {
  const fs::path dir = out_dir(config);
  const SweepResult res = sweep(config.omegas, config.mass, config.basis(), config.grid(), config.flow());

  std::string csv = csv_row({"omega", "p1_mass", "sigma_y", "dz_p1", "h1_parallel_err", "mu_err", "energy_err",
                             "sigma_total_err"});
  for (const auto& row : res.rows) {
    std::vector<std::string> cells{format_double(row.omega)};
    for (double e : row.errors()) cells.push_back(format_double(e));
    csv += csv_row(cells);
  }

  Json j = envelope(config, "sweep");
  j["mass"] = res.mass;
  j["complete"] = res.complete;
  if (!res.complete) j["failure"] = res.failure;
  Json rows = Json::array();
  for (const auto& row : res.rows) {
    Json r;
    r["omega"] = row.omega;
    const auto errors = row.errors();
    for (int c = 0; c < SweepRow::kErrorColumns; ++c) r[kSweepColumns[c]] = num(errors[c]);
    r["high_norm_err"] = num(row.high_norm_err);
    r["iterations"] = row.iterations;
    rows.push_back(r);
  }
  j["rows"] = rows;

  std::vector<std::string> failures;
  if (!res.complete) failures.push_back("sweep incomplete: " + res.failure);
  if (res.rows.size() >= 3) {
    std::vector<std::string> cells{"slope"};
    Json slopes;
    for (int c = 0; c < SweepRow::kErrorColumns; ++c) {
      const SlopeFit& fit = res.slopes[c];
      cells.push_back(format_double(fit.slope));
      const bool ok = fit.slope <= kSweepSlopeBounds[c] && fit.r_squared >= kSweepMinRSquared;
      slopes[kSweepColumns[c]] = {{"slope", num(fit.slope)},
                                  {"intercept", num(fit.intercept)},
                                  {"r_squared", num(fit.r_squared)},
                                  {"bound", kSweepSlopeBounds[c]},
                                  {"pass", ok}};
      if (!ok) failures.push_back(kSweepColumns[c] + " slope " + format_double(fit.slope));
    }
    csv += csv_row(cells);
    j["slopes"] = slopes;
    j["high_norm_slope"] = {{"slope", num(res.high_norm_slope.slope)},
                            {"r_squared", num(res.high_norm_slope.r_squared)}};
  }
  j["cold_start_distance"] = num(res.cold_start_distance);
  j["failures"] = failures;
  write_text(dir / "sweep.csv", csv);
  write_json(dir / "sweep.json", j);

  std::printf("sweep: %zu of %zu omegas converged\n", res.rows.size(), config.omegas.size());
  for (const auto& f : failures) std::printf("  FAIL %s\n", f.c_str());
  if (!res.complete) return kExitNumerical;
  return failures.empty() ? kExitPass : kExitCheckFailure;
}

int cmd_spectrum(const RunConfig& config, const std::optional<std::string>& state_path) {
  const fs::path dir = out_dir(config);
  const auto rec = obtain_ground_state(config, state_path, config.spectrum_basis(), config.spectrum_grid());
  const auto op = assemble_L3d(rec, config.sector);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  const Eigen::VectorXd& ev = es.eigenvalues();

  Json j = envelope(config, "spectrum");
  j["sector"] = sector_name(config.sector);
  j["omega"] = rec.omega;
  j["mass"] = rec.mass;
  j["mu"] = rec.mu;
  j["dimension"] = op.dimension();
  j["min_eigenvalue"] = ev[0];
  std::vector<double> lowest(ev.data(), ev.data() + std::min<Eigen::Index>(20, ev.size()));
  j["lowest_eigenvalues"] = lowest;

  bool ok = true;
  if (config.sector == Sector::Even) {
    const auto c = coercivity_check(op, sector_coordinates(rec.state, Sector::Even));
    j["deflated_min_eigenvalue"] = c.min_eig_orthogonal;
    j["c_l_estimate"] = c.c_l_estimate;
    ok = c.min_eig_orthogonal > 0.0;
    std::printf("spectrum (even): lowest %.10g, deflated minimum %.10g\n", ev[0], c.min_eig_orthogonal);
  } else if (config.sector == Sector::Odd) {
    const Eigen::VectorXd d = sector_coordinates(dz(rec.state), Sector::Odd);
    const double cosine = std::abs(es.eigenvectors().col(0).dot(d)) / d.norm();
    j["kernel_eigenvalue"] = ev[0];
    j["kernel_cosine"] = cosine;
    ok = std::abs(ev[0]) < 1e-5 && cosine > 0.999;
    std::printf("spectrum (odd): kernel eigenvalue %.3e, cosine with dz Q %.12f\n", ev[0], cosine);
  } else {
    std::printf("spectrum (full): lowest %.10g\n", ev[0]);
  }
  j["pass"] = ok;
  write_json(dir / (std::string("spectrum_") + sector_name(config.sector) + ".json"), j);
  return ok ? kExitPass : kExitCheckFailure;
}

int cmd_evolve(const RunConfig& config, const std::optional<std::string>& state_path) {
  const fs::path dir = out_dir(config);
  SpectralField3D reference;
  double omega = config.omega;
  bool trapped_reference = true;
  if (state_path) {
    StateFile file = load_state(*state_path);
    if (!(file.header.omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "state file lacks omega");
    omega = file.header.omega;
    trapped_reference = file.header.kind == "ground_state";
    reference = std::move(file.field);
  } else {
    reference = minimize(config.omega, config.mass, config.basis(), config.grid(), config.flow()).state;
  }
  const double m = mass(reference);
  SpectralField3D u0 = reference;
  if (config.epsilon > 0.0) {
    u0 += config.epsilon * perturbation_direction(reference.basis_ptr(), reference.grid_ptr(), config.seed);
    u0 *= std::sqrt(m / mass(u0));
  }

  EvolveSettings settings = config.evolve();
  const Trajectory traj = evolve_3d(u0, omega, settings,
                                    trapped_reference ? std::optional<SpectralField3D>(reference) : std::nullopt);

  std::string csv = csv_row({"t", "mass", "energy", "orbital_distance", "p1_mass", "virial"});
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    csv += csv_row({format_double(traj.times[i]), format_double(traj.mass_series[i]),
                    format_double(traj.energy_series[i]),
                    traj.orbital_distance.empty() ? "" : format_double(traj.orbital_distance[i]),
                    format_double(traj.p1_mass_series[i]), format_double(traj.virial_series[i])});
  write_text(dir / "trajectory.csv", csv);

  std::vector<std::string> snapshot_files;
  if (config.snapshot_stride > 0) {
    fs::create_directories(dir / "snapshots");
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      if (i % config.snapshot_stride != 0 && i + 1 != traj.snapshots.size()) continue;
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/snap_%05zu.state", i);
      StateHeader h;
      h.kind = "snapshot";
      h.omega = omega;
      h.mass = traj.mass_series[i];
      h.energy = traj.energy_series[i];
      h.time = traj.times[i];
      save_state((dir / name).string(), h, traj.snapshots[i]);
      snapshot_files.push_back(name);
    }
  }

  const double bound = forbidden_region_bound(m, omega, config.gn_constant);
  int violations = 0;
  for (double s : traj.sigma_series) violations += s > bound;
  std::vector<std::string> failures;
  if (traj.blow_up) failures.push_back("blow-up suspected after t = " + format_double(traj.last_valid_time));
  if (!(traj.mass_drift() < 1e-6)) failures.push_back("mass drift " + format_double(traj.mass_drift()));
  if (!(traj.energy_drift() < 1e-5)) failures.push_back("energy drift " + format_double(traj.energy_drift()));
  if (trapped_reference && violations > 0)
    failures.push_back("forbidden region violated at " + std::to_string(violations) + " save points");

  Json j = envelope(config, "evolve");
  j["omega"] = omega;
  j["mass"] = m;
  j["dt"] = settings.dt;
  j["t_end"] = settings.t_end;
  j["epsilon"] = config.epsilon;
  j["transverse_step"] = transverse_step_name(settings.transverse_step);
  j["saved_points"] = traj.times.size();
  j["blow_up"] = traj.blow_up;
  j["last_valid_time"] = traj.last_valid_time;
  j["mass_drift"] = traj.mass_drift();
  j["energy_drift"] = traj.energy_drift();
  if (!traj.orbital_distance.empty())
    j["max_orbital_distance"] = *std::max_element(traj.orbital_distance.begin(), traj.orbital_distance.end());
  j["forbidden_region_bound"] = bound;
  j["forbidden_region_violations"] = violations;
  j["diagnostics_csv"] = "trajectory.csv";
  j["snapshots"] = snapshot_files;
  j["failures"] = failures;
  write_json(dir / "trajectory.json", j);

  std::printf("evolve: omega %g, T %g, dt %g, mass drift %.2e, energy drift %.2e\n", omega, settings.t_end,
              settings.dt, traj.mass_drift(), traj.energy_drift());
  for (const auto& f : failures) std::printf("  FAIL %s\n", f.c_str());
  if (traj.blow_up) return kExitNumerical;
  return failures.empty() ? kExitPass : kExitCheckFailure;
}

int cmd_check(const RunConfig& config) {
  const fs::path dir = out_dir(config);
  struct Row {
    std::string name;
    double value;
    std::string bound;
    bool pass;
  };
  std::vector<Row> rows;
  auto basis = config.basis();
  auto grid = config.grid();

  const auto corpus = standard_corpus(basis, grid, 200, config.seed);
  double worst_gn = 0.0;
  for (const auto& u : corpus) {
    try {
      worst_gn = std::max(worst_gn, gn_ratio(u));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Vacuous) throw;
    }
  }
  rows.push_back({"GN corpus max ratio", worst_gn, "<= 10", worst_gn <= 10.0});

  const std::array<std::pair<int, double>, 3> pairs{{{1, 0.5}, {1, 1.0 / 3.0}, {2, 0.5}}};
  for (const auto& [k, theta] : pairs) {
    double worst = 0.0;  // max lhs/rhs
    bool holds = true;
    for (const auto& u : corpus) {
      const auto s = interpolation_check(u, k, theta);
      holds = holds && s.holds();
      if (s.rhs > 0.0) worst = std::max(worst, s.lhs / s.rhs);
    }
    char name[64];
    std::snprintf(name, sizeof name, "interpolation k=%d theta=%.4g max lhs/rhs", k, theta);
    rows.push_back({name, worst, "<= 1 + 1e-10", holds});
  }

  const auto rec = minimize(config.omega, config.mass, basis, grid, config.flow());
  const double poh_scale = l4_norm_4(rec.state);
  rows.push_back({"EL residual / scale", rec.residual_el / rec.residual_scale, "< 1e-7",
                  rec.residual_el < 1e-7 * rec.residual_scale});
  rows.push_back({"Pohozaev mass pairing / F", std::abs(rec.pohozaev[0]) / poh_scale, "< 1e-6",
                  std::abs(rec.pohozaev[0]) < 1e-6 * poh_scale});
  rows.push_back({"Pohozaev dilation pairing / F", std::abs(rec.pohozaev[1]) / poh_scale, "< 1e-6",
                  std::abs(rec.pohozaev[1]) < 1e-6 * poh_scale});
  const double ident = std::abs(energy_identity_check(rec)) / std::abs(rec.energy);
  rows.push_back({"energy identity / |E|", ident, "< 1e-6", ident < 1e-6});
  const double bound = forbidden_region_bound(rec.mass, rec.omega, config.gn_constant);
  rows.push_back({"forbidden region sigma_y^2 / bound", rec.sigma_y_sq / bound, "<= 1", rec.sigma_y_sq <= bound});

  bool all = true;
  Json table = Json::array();
  std::printf("%-44s %-14s %-14s %s\n", "check", "value", "bound", "result");
  for (const auto& r : rows) {
    all = all && r.pass;
    std::printf("%-44s %-14.6e %-14s %s\n", r.name.c_str(), r.value, r.bound.c_str(), r.pass ? "PASS" : "FAIL");
    table.push_back({{"name", r.name}, {"value", num(r.value)}, {"bound", r.bound}, {"pass", r.pass}});
  }
  Json j = envelope(config, "check");
  j["omega"] = rec.omega;
  j["mass"] = rec.mass;
  j["rows"] = table;
  j["pass"] = all;
  write_json(dir / "check.json", j);
  return all ? kExitPass : kExitCheckFailure;
}

int run_guarded(const RunConfig& config, const std::string& name, const std::function<int()>& command) {
  int code = kExitNumerical;
  std::string kind = "internal";
  std::string message;
  try {
    return command();
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    kind = error_kind_name(e.kind());
    message = e.what();
  } catch (const std::exception& e) {
    message = e.what();
  }
  std::fprintf(stderr, "nlsred %s: error (%s): %s\n", name.c_str(), kind.c_str(), message.c_str());
  try {
    Json j = envelope(config, name);
    j["exit_code"] = code;
    j["error_kind"] = kind;
    j["message"] = message;
    write_json(out_dir(config) / "failure.json", j);
  } catch (const std::exception&) {
    // The report is best effort; the exit code carries the outcome.
  }
  return code;
}

}  // namespace nlsred
