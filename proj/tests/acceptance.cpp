// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nlsred/commands.hpp"
#include "nlsred/ground_state_1d.hpp"

using namespace nlsred;

namespace {

const double kMass = 8.0 * kPi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + buf);
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// State shared between criteria.
struct Shared {
  BasisPtr basis = build_transverse_basis(24, 48);
  GridPtr grid = build_axial_grid(28.0, 384);
  SweepResult sweep;
  std::vector<GroundStateRecord> records;  // every converged minimizer
  const GroundStateRecord* at(double omega) const {
    for (const auto& r : sweep.records)
      if (r.omega == omega) return &r;
    return nullptr;
  }
};

SpectralField3D boost(const SpectralField3D& u, double c) {
  CMatrix values = to_physical(u);
  for (int j = 0; j < values.cols(); ++j) values.col(j) *= std::polar(1.0, c * u.grid().nodes()[j]);
  return to_spectral(u.basis_ptr(), u.grid_ptr(), values);
}

SpectralField3D dz(const SpectralField3D& u) {
  SpectralField3D out = u;
  const auto& xi = u.grid().wavenumbers();
  for (Eigen::Index k = 0; k < out.coeffs().rows(); ++k)
    for (Eigen::Index n = 0; n < out.coeffs().cols(); ++n) out.coeffs()(k, n) *= cdouble(0.0, xi[n]);
  out.coeffs().col(u.grid().nyquist()).setZero();
  return out;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_slope(x, y).slope;
}

Outcome one_dimensional_oracle() {
  Outcome o;
  auto grid = build_axial_grid(28.0, 384);
  const auto start = std::chrono::steady_clock::now();
  const auto gs = solve_1d_ground_state(kMass, grid);
  const double secs = seconds_since(start);
  // sqrt(4π) sech(z) at m = 8π.
  Eigen::VectorXcd exact(grid->point_count());
  for (int j = 0; j < exact.size(); ++j) exact[j] = std::sqrt(4.0 * kPi) / std::cosh(grid->nodes()[j]);
  Field1D diff = gs.profile;
  diff.coeffs() -= Field1D::from_values(grid, exact).coeffs();
  const double l2 = std::sqrt(mass(diff));
  o.require(std::abs(gs.mu - 1.0) < 1e-6, "mu = %.12f (target 1)", gs.mu);
  o.require(std::abs(gs.energy + 4.0 * kPi / 3.0) < 1e-6, "E = %.12f (target %.12f)", gs.energy, -4.0 * kPi / 3.0);
  o.require(l2 < 1e-6, "profile L2 error %.3e", l2);
  o.require(secs < 10.0, "runtime %.2f s", secs);
  return o;
}

Outcome residuals(const Shared& s) {
  Outcome o;
  double worst_el = 0.0, worst_poh = 0.0;
  for (const auto& r : s.records) {
    const double scale = l4_norm_4(r.state);
    worst_el = std::max(worst_el, r.residual_el / r.residual_scale);
    worst_poh = std::max({worst_poh, std::abs(r.pohozaev[0]) / scale, std::abs(r.pohozaev[1]) / scale});
  }
  o.require(!s.records.empty(), "%zu converged records", s.records.size());
  o.require(worst_el < 1e-7, "max EL residual / scale %.3e", worst_el);
  o.require(worst_poh < 1e-6, "max Pohozaev residual / scale %.3e", worst_poh);
  return o;
}

Outcome rates(const Shared& s, double secs) {
  Outcome o;
  o.require(s.sweep.complete && s.sweep.rows.size() == 5, "sweep complete: %zu rows", s.sweep.rows.size());
  if (!s.sweep.complete) return o;
  for (int c = 0; c < SweepRow::kErrorColumns; ++c) {
    const SlopeFit& f = s.sweep.slopes[c];
    o.require(f.slope <= kSweepSlopeBounds[c] && f.r_squared >= kSweepMinRSquared,
              "%-16s slope %+.4f (bound %+.1f), R2 %.6f", kSweepColumns[c].c_str(), f.slope, kSweepSlopeBounds[c],
              f.r_squared);
  }
  o.require(secs < 900.0, "sweep runtime %.1f s", secs);
  return o;
}

Outcome forbidden_region(const Shared& s) {
  Outcome o;
  int violations = 0;
  for (const auto& r : s.records) violations += r.sigma_y_sq > forbidden_region_bound(r.mass, r.omega, 4.0);
  o.require(violations == 0, "minimizers: %d violations over %zu records", violations, s.records.size());

  const auto* rec = s.at(256.0);
  if (!rec) {
    o.require(false, "%s", "no omega = 256 record");
    return o;
  }
  SpectralField3D u0 = rec->state + 1e-3 * perturbation_direction(s.basis, s.grid, 1);
  u0 *= std::sqrt(kMass / mass(u0));
  EvolveSettings settings;
  settings.t_end = 2.0;
  settings.keep_snapshots = false;
  const auto traj = evolve_3d(u0, 256.0, settings);
  const double bound = forbidden_region_bound(kMass, 256.0, 4.0);
  int dyn_violations = 0;
  for (double sig : traj.sigma_series) dyn_violations += sig > bound;
  o.require(!traj.blow_up && dyn_violations == 0, "T = 2 evolution: %d violations over %zu snapshots, max %.3e <= %.1f",
            dyn_violations, traj.sigma_series.size(),
            *std::max_element(traj.sigma_series.begin(), traj.sigma_series.end()), bound);
  return o;
}

Outcome linearized_structure() {
  Outcome o;
  auto grid1d = build_axial_grid(28.0, 384);
  const auto sol = soliton(kMass, grid1d);
  const auto even = assemble_L1d(sol.profile, sol.mu, Sector::Even);
  const auto coer = coercivity_check(even, sector_coordinates(sol.profile, Sector::Even));
  o.require(coer.c_l_estimate > 0.0, "1D even coercivity constant %.6f", coer.c_l_estimate);
  const double lowest = eigenvalues(assemble_L1d(sol.profile, sol.mu, Sector::Full))[0];
  o.require(std::abs(lowest + 3.0) < 1e-4, "1D lowest eigenvalue %.10f (target -3)", lowest);

  auto basis = build_transverse_basis(8, 32);
  auto grid = build_axial_grid(24.0, 256);
  const auto r256 = minimize(256.0, kMass, basis, grid);
  const auto r1024 = minimize(1024.0, kMass, basis, grid, {}, r256.state);
  for (const auto* rec : {&r256, &r1024}) {
    const auto odd = assemble_L3d(*rec, Sector::Odd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(odd.matrix);
    const Eigen::VectorXd d = sector_coordinates(dz(rec->state), Sector::Odd);
    const double cosine = std::abs(es.eigenvectors().col(0).dot(d)) / d.norm();
    o.require(std::abs(es.eigenvalues()[0]) < 1e-5 && cosine > 0.999,
              "omega %4.0f odd kernel eigenvalue %.3e, cosine %.9f", rec->omega, es.eigenvalues()[0], cosine);
    const auto c = coercivity_check(assemble_L3d(*rec, Sector::Even), sector_coordinates(rec->state, Sector::Even));
    o.require(c.min_eig_orthogonal > 0.0, "omega %4.0f even deflated minimum %.6f", rec->omega, c.min_eig_orthogonal);
  }
  return o;
}

Outcome uniqueness(const Shared& s) {
  Outcome o;
  const auto res = uniqueness_experiment(1024.0, kMass, 5, 20240611, s.basis, s.grid);
  o.require(res.survivors == 5, "%d of 5 starts converged", res.survivors);
  o.require(res.max_distance < 1e-5, "max pairwise distance %.3e", res.max_distance);
  o.require(res.max_i_spread < 1e-8, "relative I spread %.3e", res.max_i_spread);
  return o;
}

Outcome conservation_and_order(const Shared& s) {
  Outcome o;
  const auto* rec = s.at(256.0);
  if (!rec) {
    o.require(false, "%s", "no omega = 256 record");
    return o;
  }
  // Moving ground state: a genuinely time-dependent solution.
  const SpectralField3D u0 = boost(rec->state, 0.5);
  EvolveSettings settings;
  settings.keep_snapshots = false;
  const auto traj = evolve_3d(u0, 256.0, settings);
  o.require(traj.mass_drift() < 1e-10, "mass drift %.3e over T = 1, dt = 1e-3", traj.mass_drift());
  o.require(traj.energy_drift() < 1e-5, "energy drift %.3e over T = 1, dt = 1e-3", traj.energy_drift());

  const double t_end = 0.4;
  std::vector<double> dts{4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<SpectralField3D> finals;
  for (double dt : dts) {
    EvolveSettings st;
    st.dt = dt;
    st.t_end = t_end;
    st.save_every = static_cast<int>(std::lround(t_end / dt));
    finals.push_back(evolve_3d(u0, 256.0, st).snapshots.back());
  }
  std::vector<double> diffs;
  for (int i = 0; i < 3; ++i) diffs.push_back(std::sqrt(mass(finals[i] - finals[i + 1])));
  const double slope = log_slope({4e-3, 2e-3, 1e-3}, diffs);
  o.require(std::abs(slope - 2.0) <= 0.2, "3D self-convergence slope %.3f", slope);

  // 1D against the exact moving soliton.
  auto grid = build_axial_grid(28.0, 384);
  auto moving = [&](double t) {
    Eigen::VectorXcd v(grid->point_count());
    for (int j = 0; j < v.size(); ++j) {
      const double z = grid->nodes()[j];
      double x = z - t;
      x -= 56.0 * std::round(x / 56.0);
      v[j] = std::polar(std::sqrt(4.0 * kPi) / std::cosh(x), 0.5 * z - 0.25 * t + t);
    }
    return Field1D::from_values(grid, v);
  };
  std::vector<double> dts1{0.02, 0.01, 0.005}, errors;
  for (double dt : dts1) {
    EvolveSettings st;
    st.dt = dt;
    st.save_every = static_cast<int>(std::lround(1.0 / dt));
    Field1D diff = evolve_1d(moving(0.0), st).snapshots_1d.back();
    diff.coeffs() -= moving(1.0).coeffs();
    errors.push_back(std::sqrt(mass(diff)));
  }
  const double slope1 = log_slope(dts1, errors);
  o.require(std::abs(slope1 - 2.0) <= 0.2, "1D error slope %.3f against the moving soliton", slope1);
  return o;
}

Outcome orbital_stability(const Shared& s) {
  Outcome o;
  const auto* rec = s.at(256.0);
  if (!rec) {
    o.require(false, "%s", "no omega = 256 record");
    return o;
  }
  EvolveSettings settings;
  settings.t_end = 5.0;
  const auto big = stability_experiment(*rec, 1e-3, settings, 7);
  const auto half = stability_experiment(*rec, 5e-4, settings, 7);
  o.require(big.max_distance < 1e-2, "delta 1e-3: max orbital distance %.4e over T = 5", big.max_distance);
  const double ratio = half.max_distance / big.max_distance;
  o.require(ratio >= 0.25 && ratio <= 0.75, "delta 5e-4: max %.4e, ratio %.4f (band [0.25, 0.75])",
            half.max_distance, ratio);
  return o;
}

Outcome cauchy(const Shared& s) {
  Outcome o;
  const auto sol = soliton(kMass, s.grid);
  const SpectralField3D u0 = 1.1 * embed_1d(s.basis, sol.profile);
  std::vector<double> omegas{64.0, 256.0, 1024.0}, errors;
  for (double w : omegas) {
    EvolveSettings st;
    const auto res = cauchy_reduction_error(u0, w, st);
    errors.push_back(res.error_at(1.0));
    o.require(std::isfinite(res.c2) && res.fit_max_residual <= std::log(10.0),
              "omega %4.0f: error(1) %.4e, C1 %.4f, C2 %.4f, max log residual %.3f", w, res.error_at(1.0), res.c1,
              res.c2, res.fit_max_residual);
  }
  const double slope = log_slope(omegas, errors);
  o.require(slope <= -0.4, "omega slope of the error at t = 1: %.4f", slope);
  return o;
}

Outcome inequalities(const Shared& s) {
  Outcome o;
  const auto corpus = standard_corpus(s.basis, s.grid, 200, 20240611);
  double worst = 0.0;
  for (const auto& u : corpus) worst = std::max(worst, gn_ratio(u));
  o.require(worst <= 10.0, "GN max ratio %.6f over %zu fields", worst, corpus.size());
  const std::vector<std::pair<int, double>> pairs{{1, 0.5}, {1, 1.0 / 3.0}, {2, 0.5}};
  for (const auto& [k, theta] : pairs) {
    int broken = 0;
    for (const auto& u : corpus) broken += !interpolation_check(u, k, theta).holds();
    o.require(broken == 0, "interpolation k = %d, theta = %.4f: %d violations", k, theta, broken);
  }
  return o;
}

}  // namespace

int main() {
  set_quiet(true);
  Shared shared;
  const auto sweep_start = std::chrono::steady_clock::now();
  double sweep_secs = 0.0;
  try {
    shared.sweep = sweep({64.0, 128.0, 256.0, 512.0, 1024.0}, kMass, shared.basis, shared.grid);
    sweep_secs = seconds_since(sweep_start);
    shared.records = shared.sweep.records;
  } catch (const Error& e) {
    std::printf("sweep failed: %s\n", e.what());
  }

  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "1D oracle agreement", one_dimensional_oracle},
      {2, "Euler-Lagrange and Pohozaev residuals", [&] { return residuals(shared); }},
      {3, "dimension-reduction rates", [&] { return rates(shared, sweep_secs); }},
      {4, "forbidden region", [&] { return forbidden_region(shared); }},
      {5, "linearized-operator structure", linearized_structure},
      {6, "uniqueness experiment", [&] { return uniqueness(shared); }},
      {7, "dynamics conservation and order", [&] { return conservation_and_order(shared); }},
      {8, "orbital stability", [&] { return orbital_stability(shared); }},
      {9, "Cauchy-problem reduction", [&] { return cauchy(shared); }},
      {10, "inequality suite", [&] { return inequalities(shared); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, "exception: %s", e.what());
    }
    std::printf("criterion %2d %s  %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, seconds_since(start));
    for (const auto& d : o.details) std::printf("%s\n", d.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
