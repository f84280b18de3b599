#include "nlsred/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>


namespace nlsred {

std::string transverse_step_name(TransverseStep step) {
  return step == TransverseStep::Exact ? "exact" : "cayley";
}

TransverseStep parse_transverse_step(const std::string& name) {
  if (name == "exact") return TransverseStep::Exact;
  if (name == "cayley") return TransverseStep::Cayley;
  throw Error(ErrorKind::InvalidArgument, "unknown transverse step '" + name + "' (expected exact or cayley)");
}

double Trajectory::mass_drift() const {
  double drift = 0.0;
  for (double m : mass_series) drift = std::max(drift, std::abs(m - mass_series.front()));
  return mass_series.empty() || mass_series.front() == 0.0 ? drift : drift / mass_series.front();
}

double Trajectory::energy_drift() const {
  double drift = 0.0;
  for (double e : energy_series) drift = std::max(drift, std::abs(e - energy_series.front()));
  return energy_series.empty() || energy_series.front() == 0.0 ? drift : drift / std::abs(energy_series.front());
}

namespace {

struct Schedule {
  int steps;
  int save_every;
};

Schedule schedule(const EvolveSettings& s) {
  if (!(s.dt > 0.0) || !(s.t_end >= 0.0)) throw Error(ErrorKind::InvalidArgument, "evolution needs dt > 0, T >= 0");
  const int steps = static_cast<int>(std::llround(s.t_end / s.dt));
  if (std::abs(steps * s.dt - s.t_end) > 1e-9 * std::max(1.0, s.t_end))
    throw Error(ErrorKind::InvalidArgument, "T must be an integer multiple of dt");
  int every = s.save_every;
  if (every <= 0) every = std::max(1, (steps + 499) / 500);
  return {steps, every};
}

// e^{iθ|u|²}u pointwise, then back to coefficients.
void nonlinear_phase(SpectralField3D& u, double theta) {
  CMatrix values = to_physical(u);
  values.array() *= (cdouble(0.0, theta) * values.array().abs2()).exp();
  u = to_spectral(u.basis_ptr(), u.grid_ptr(), values);
}

void nonlinear_phase(Field1D& v, double theta) {
  Eigen::VectorXcd values = v.values();
  values.array() *= (cdouble(0.0, theta / (2.0 * kPi)) * values.array().abs2()).exp();
  v = Field1D::from_values(v.grid_ptr(), values);
}

bool finite(const CMatrix& c) { return c.allFinite(); }
bool finite(const Eigen::VectorXcd& c) { return c.allFinite(); }

// Fused Strang stepping: the trailing half step of one step and the leading
// half step of the next are merged unless a snapshot is due.
template <typename State, typename Linear, typename Save>
void strang(State& u, const Schedule& plan, double dt, bool linear_only, Linear&& linear, Save&& save,
            Trajectory& traj) {
  if (!save(u, 0.0)) return;
  if (!linear_only) nonlinear_phase(u, 0.5 * dt);
  for (int step = 1; step <= plan.steps; ++step) {
    linear(u);
    const bool due = step % plan.save_every == 0 || step == plan.steps;
    if (due) {
      if (!linear_only) nonlinear_phase(u, 0.5 * dt);
      if (!finite(u.coeffs())) {
        traj.blow_up = true;
        return;
      }
      if (!save(u, step * dt)) return;
      if (step < plan.steps && !linear_only) nonlinear_phase(u, 0.5 * dt);
    } else if (!linear_only) {
      nonlinear_phase(u, dt);
    }
  }
}

}  // namespace

double virial_second_derivative(const SpectralField3D& u, double omega) {
  return 24.0 * energy(u, omega) - 4.0 * omega * sigma_y_norm_sq(u) - 4.0 * dz_norm_sq(u) + 16.0 * omega * mass(u);
}

Trajectory evolve_3d(const SpectralField3D& u0, double omega, const EvolveSettings& settings,
                     const std::optional<SpectralField3D>& reference) {
  if (!(omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "evolution needs omega > 0");
  const Schedule plan = schedule(settings);
  if (reference && !reference->same_discretization(u0))
    throw Error(ErrorKind::ShapeMismatch, "reference state does not match the initial data");
  if (energy(u0, omega) >= 0.0 || sigma_y_norm_sq(u0) > std::sqrt(omega))
    warn("initial data outside the global existence regime (E >= 0 or sigma_y^2 > sqrt(omega))");

  const auto& basis = u0.basis();
  const auto& grid = u0.grid();
  CMatrix propagator(basis.mode_count(), grid.point_count());
  for (int k = 0; k < propagator.rows(); ++k)
    for (int n = 0; n < propagator.cols(); ++n) {
      const double axial = grid.wavenumbers()[n] * grid.wavenumbers()[n];
      const double stiff = 0.5 * settings.dt * omega * basis.gaps()[k];
      propagator(k, n) = std::polar(1.0, -settings.dt * axial);
      if (settings.transverse_step == TransverseStep::Cayley)
        propagator(k, n) *= cdouble(1.0, -stiff) / cdouble(1.0, stiff);
      else
        propagator(k, n) *= std::polar(1.0, -2.0 * stiff);
    }

  Trajectory traj;
  traj.omega = omega;
  SpectralField3D u = u0;
  auto linear = [&](SpectralField3D& w) { w.coeffs().array() *= propagator.array(); };
  auto save = [&](const SpectralField3D& w, double t) {
    const double m = mass(w);
    if (!std::isfinite(m)) {
      traj.blow_up = true;
      return false;
    }
    traj.times.push_back(t);
    traj.mass_series.push_back(m);
    traj.energy_series.push_back(energy(w, omega));
    traj.sigma_series.push_back(sigma_y_norm_sq(w));
    traj.p1_mass_series.push_back(mass(project_p1(w)));
    traj.virial_series.push_back(virial_second_derivative(w, omega));
    traj.parallel_sup.push_back(parallel_component(w).values().cwiseAbs().maxCoeff());
    if (reference) traj.orbital_distance.push_back(orbital_distance(w, *reference));
    if (settings.keep_snapshots) traj.snapshots.push_back(w);
    traj.last_valid_time = t;
    return true;
  };
  strang(u, plan, settings.dt, settings.linear_only, linear, save, traj);
  if (traj.blow_up) {
    std::ostringstream msg;
    msg << "blow-up suspected: non-finite state after t = " << traj.last_valid_time;
    warn(msg.str());
  }
  return traj;
}

Trajectory evolve_1d(const Field1D& v0, const EvolveSettings& settings) {
  const Schedule plan = schedule(settings);
  const auto& grid = v0.grid();
  Eigen::VectorXcd propagator(grid.point_count());
  for (int n = 0; n < propagator.size(); ++n)
    propagator[n] = std::polar(1.0, -settings.dt * grid.wavenumbers()[n] * grid.wavenumbers()[n]);

  Trajectory traj;
  Field1D v = v0;
  auto linear = [&](Field1D& w) { w.coeffs().array() *= propagator.array(); };
  auto save = [&](const Field1D& w, double t) {
    const double m = mass(w);
    if (!std::isfinite(m)) {
      traj.blow_up = true;
      return false;
    }
    traj.times.push_back(t);
    traj.mass_series.push_back(m);
    traj.energy_series.push_back(0.5 * dz_norm_sq(w) - l4_norm_4(w) / (8.0 * kPi));
    traj.parallel_sup.push_back(w.values().cwiseAbs().maxCoeff());
    if (settings.keep_snapshots) traj.snapshots_1d.push_back(w);
    traj.last_valid_time = t;
    return true;
  };
  strang(v, plan, settings.dt, settings.linear_only, linear, save, traj);
  if (traj.blow_up) warn("1D evolution produced non-finite values");
  return traj;
}

double orbital_distance(const SpectralField3D& u, const SpectralField3D& q) {
  if (!u.same_discretization(q)) throw Error(ErrorKind::ShapeMismatch, "orbital distance needs one discretization");
  const auto& grid = u.grid();
  const auto& xi = grid.wavenumbers();
  const int n_modes = grid.point_count();
  // a_n = Σ_k conj(q_kn) u_kn; ⟨q, u(· - s)⟩ = Σ_n a_n e^{-iξ_n s}.
  const Eigen::VectorXcd a = (q.coeffs().conjugate().array() * u.coeffs().array()).colwise().sum().transpose();
  auto corr = [&](double s) {
    std::array<cdouble, 3> out{0.0, 0.0, 0.0};
    for (int n = 0; n < n_modes; ++n) {
      if (n == grid.nyquist()) {
        const double c = std::cos(xi[n] * s);
        out[0] += a[n] * c;
        out[2] -= xi[n] * xi[n] * a[n] * c;
        continue;
      }
      const cdouble term = a[n] * std::polar(1.0, -xi[n] * s);
      out[0] += term;
      out[1] += cdouble(0.0, -xi[n]) * term;
      out[2] -= xi[n] * xi[n] * term;
    }
    return out;
  };
  // Coarse search over grid shifts via one inverse transform.
  Eigen::VectorXcd profile = a.conjugate();
  grid.inverse(profile.data(), 1);
  // profile_j ∝ conj(Σ a_n e^{-iξ_n z_j}), so |profile_j| ∝ |corr(z_j)|.
  Eigen::Index best = 0;
  profile.cwiseAbs2().maxCoeff(&best);
  double s = grid.nodes()[best];
  for (int it = 0; it < 50; ++it) {
    const auto [c0, c1, c2] = corr(s);
    const double g1 = 2.0 * std::real(std::conj(c0) * c1);
    const double g2 = 2.0 * (std::norm(c1) + std::real(std::conj(c0) * c2));
    if (!(g2 < 0.0)) break;
    const double step = std::clamp(-g1 / g2, -grid.spacing(), grid.spacing());
    s += step;
    if (std::abs(step) < 1e-14) break;
  }
  SpectralField3D aligned = shift_z(u, s);
  const cdouble overlap = inner_product(q, aligned);
  if (std::abs(overlap) > 0.0) aligned *= std::conj(overlap) / std::abs(overlap);
  return sigma_norm(aligned - q);
}

SpectralField3D perturbation_direction(BasisPtr basis, GridPtr grid, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix coeffs = CMatrix::Zero(basis->mode_count(), grid->point_count());
  for (int k = 0; k < std::min(4, basis->mode_count()); ++k) {
    Eigen::VectorXcd line = Eigen::VectorXcd::Zero(grid->point_count());
    for (int b = 0; b < 2; ++b) {
      const double center = rng.uniform(0.0, 3.0);
      const double width = rng.uniform(0.5, 2.0);
      const double amp = rng.normal();
      for (int j = 0; j < line.size(); ++j) {
        const double z = grid->nodes()[j];
        // Symmetrized pair of bumps keeps the direction even in z.
        line[j] += amp * (std::exp(-0.5 * std::pow((z - center) / width, 2)) +
                          std::exp(-0.5 * std::pow((z + center) / width, 2)));
      }
    }
    grid->forward(line.data(), 1);
    coeffs.row(k) = line.real().cast<cdouble>().transpose();
  }
  SpectralField3D eta(basis, grid, std::move(coeffs), true);
  eta *= 1.0 / std::sqrt(mass(eta));
  return eta;
}

StabilityResult stability_experiment(const GroundStateRecord& rec, double delta,
                                     const EvolveSettings& evolve, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "perturbation size must be non-negative");
  SpectralField3D u0 = rec.state + delta * perturbation_direction(rec.state.basis_ptr(), rec.state.grid_ptr(), seed);
  u0 *= std::sqrt(rec.mass / mass(u0));

  EvolveSettings settings = evolve;
  settings.keep_snapshots = false;
  const Trajectory traj = evolve_3d(u0, rec.omega, settings, rec.state);

  StabilityResult out;
  out.perturbation = std::sqrt(mass(u0 - rec.state));
  out.initial_distance = traj.orbital_distance.front();
  out.max_distance = *std::max_element(traj.orbital_distance.begin(), traj.orbital_distance.end());
  out.max_sigma = *std::max_element(traj.sigma_series.begin(), traj.sigma_series.end());
  out.mass_drift = traj.mass_drift();
  out.energy_drift = traj.energy_drift();
  out.blow_up = traj.blow_up;
  if (out.blow_up) throw Error(ErrorKind::BlowUp, "stability run terminated by a non-finite state");
  return out;
}

double CauchyResult::error_at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) < 1e-9) return error[i];
  throw Error(ErrorKind::InvalidArgument, "time is not a save point of the run");
}

CauchyResult cauchy_reduction_error(const SpectralField3D& u0, double omega, const EvolveSettings& settings,
                                    double fit_start) {
  // The two flows are independent; the 1D one runs alongside.
  auto pending = std::async(std::launch::async, [&] { return evolve_1d(parallel_component(u0), settings); });
  const Trajectory full = evolve_3d(u0, omega, settings);
  const Trajectory reduced = pending.get();
  if (full.blow_up || reduced.blow_up) throw Error(ErrorKind::BlowUp, "reduction run terminated by a non-finite state");

  CauchyResult out;
  out.omega = omega;
  out.times = full.times;
  for (std::size_t i = 0; i < full.times.size(); ++i) {
    const SpectralField3D diff = full.snapshots[i] - embed_1d(u0.basis_ptr(), reduced.snapshots_1d[i]);
    out.error.push_back(std::sqrt(mass(diff)));
  }

  // Trapezoid in time of ‖u_∥‖⁴_∞.
  double l4 = 0.0;
  for (std::size_t i = 1; i < full.times.size(); ++i)
    l4 += 0.5 * (full.times[i] - full.times[i - 1]) *
          (std::pow(full.parallel_sup[i], 4) + std::pow(full.parallel_sup[i - 1], 4));
  out.parallel_l4_linf = std::pow(l4, 0.25);

  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < out.times.size(); ++i)
    if (out.times[i] >= fit_start - 1e-12 && out.error[i] > 0.0) {
      ts.push_back(out.times[i]);
      logs.push_back(std::log(out.error[i]));
    }
  if (ts.size() >= 3) {
    Eigen::MatrixXd design(ts.size(), 2);
    Eigen::VectorXd rhs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      design(i, 0) = ts[i];
      design(i, 1) = 1.0;
      rhs[i] = logs[i];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    out.c2 = coef[0];
    out.c1 = std::exp(coef[1]) * std::sqrt(omega);
    out.fit_max_residual = (design * coef - rhs).cwiseAbs().maxCoeff();
  }
  return out;
}

}  // namespace nlsred
