#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nlsred/dynamics.hpp"
#include "nlsred/ground_state_1d.hpp"

using namespace nlsred;

namespace {

const double kMass = 8.0 * kPi;

// Cheap discretization for long runs; the axial grid keeps the soliton tails
// below 1e-9. Fewer transverse modes than this and the truncation of
// e^{iθ|u|²}u back to K modes costs more than 1e-10 of mass per unit time.
struct Coarse {
  BasisPtr basis = build_transverse_basis(16, 32);
  GridPtr grid = build_axial_grid(28.0, 256);
};

// Exact moving soliton of i v_t = -v'' - (1/2π)|v|²v:
// Q(z - 2ct) e^{i(cz - c²t + μt)}, sampled on the grid.
Field1D boosted_soliton(const GridPtr& grid, double c, double t) {
  const double mu = 1.0;
  Eigen::VectorXcd values(grid->point_count());
  const double period = 2.0 * grid->half_length();
  for (int j = 0; j < values.size(); ++j) {
    const double z = grid->nodes()[j];
    // Periodic image nearest to the centre.
    double x = z - 2.0 * c * t;
    x -= period * std::round(x / period);
    const double amp = std::sqrt(4.0 * kPi * mu) / std::cosh(std::sqrt(mu) * x);
    values[j] = std::polar(amp, c * z - c * c * t + mu * t);
  }
  return Field1D::from_values(grid, values);
}

SpectralField3D boost(const SpectralField3D& u, double c) {
  CMatrix values = to_physical(u);
  for (int j = 0; j < values.cols(); ++j) values.col(j) *= std::polar(1.0, c * u.grid().nodes()[j]);
  return to_spectral(u.basis_ptr(), u.grid_ptr(), values);
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  Eigen::MatrixXd design(lx.size(), 2);
  Eigen::VectorXd rhs(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    design(i, 0) = lx[i];
    design(i, 1) = 1.0;
    rhs[i] = ly[i];
  }
  return design.colPivHouseholderQr().solve(rhs)[0];
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("schedule validation and step names") {
  Coarse d;
  SpectralField3D u(d.basis, d.grid);
  EvolveSettings s;
  s.dt = 0.0;
  CHECK_THROWS_AS(evolve_3d(u, 64.0, s), Error);
  s.dt = 1e-3;
  s.t_end = 0.0105;
  CHECK_THROWS_AS(evolve_3d(u, 64.0, s), Error);
  s.t_end = 0.01;
  CHECK_THROWS_AS(evolve_3d(u, 0.0, s), Error);

  s.save_every = 0;
  s.t_end = 2.0;
  s.linear_only = true;
  const auto traj = evolve_3d(u, 64.0, s);
  CHECK(traj.times.size() <= 501);
  CHECK(traj.times.back() == doctest::Approx(2.0));

  for (TransverseStep t : {TransverseStep::Exact, TransverseStep::Cayley})
    CHECK(parse_transverse_step(transverse_step_name(t)) == t);
  CHECK_THROWS_AS(parse_transverse_step("implicit"), Error);
}

TEST_CASE("linear flow is diagonal") {
  Coarse d;
  const double omega = 64.0, t_end = 0.05;
  const int k = 2, n = 5;
  CMatrix c = CMatrix::Zero(16, 256);
  c(k, n) = 1.0;
  c(0, n) = 0.5;
  SpectralField3D u0(d.basis, d.grid, c);

  EvolveSettings s;
  s.linear_only = true;
  s.t_end = t_end;
  const double xi2 = std::pow(d.grid->wavenumbers()[n], 2);

  s.transverse_step = TransverseStep::Exact;
  auto traj = evolve_3d(u0, omega, s);
  const CMatrix& out = traj.snapshots.back().coeffs();
  CHECK(std::abs(out(k, n) - std::polar(1.0, -t_end * (omega * 8.0 + xi2))) < 1e-12);
  CHECK(std::abs(out(0, n) - std::polar(0.5, -t_end * xi2)) < 1e-12);
  CHECK(out.cwiseAbs().sum() == doctest::Approx(1.5).epsilon(1e-12));

  // Cayley factor per step, raised to the step count.
  s.transverse_step = TransverseStep::Cayley;
  traj = evolve_3d(u0, omega, s);
  const double half = 0.5 * s.dt * omega * 8.0;
  const cdouble per_step = cdouble(1.0, -half) / cdouble(1.0, half);
  const cdouble expected = std::pow(per_step, 50) * std::polar(1.0, -t_end * xi2);
  CHECK(std::abs(traj.snapshots.back().coeffs()(k, n) - expected) < 1e-12);
  CHECK(std::abs(traj.snapshots.back().coeffs()(0, n) - std::polar(0.5, -t_end * xi2)) < 1e-12);
}

TEST_CASE("one-dimensional flow") {
  auto grid = build_axial_grid(28.0, 384);
  const auto sol = soliton(kMass, grid);

  SUBCASE("soliton rotates at mu") {
    EvolveSettings s;
    const auto traj = evolve_1d(sol.profile, s);
    const Field1D expected = boosted_soliton(grid, 0.0, 1.0);
    Field1D diff = traj.snapshots_1d.back();
    diff.coeffs() -= expected.coeffs();
    CHECK(std::sqrt(mass(diff)) < 1e-5 * std::sqrt(kMass));
    // Modulus stays put.
    const Eigen::VectorXd a = traj.snapshots_1d.back().values().cwiseAbs();
    CHECK((a - sol.profile.values().cwiseAbs()).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(traj.mass_drift() < 1e-12);
    CHECK(traj.energy_drift() < 1e-6);
  }

  SUBCASE("zero stays zero") {
    EvolveSettings s;
    s.t_end = 0.1;
    const auto traj = evolve_1d(Field1D(grid), s);
    CHECK(traj.snapshots_1d.back().coeffs().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("mass over ten thousand steps") {
    EvolveSettings s;
    s.t_end = 10.0;
    s.keep_snapshots = false;
    const auto traj = evolve_1d(boosted_soliton(grid, 0.5, 0.0), s);
    CHECK(traj.mass_drift() < 1e-10);
  }

  SUBCASE("second order against the moving soliton") {
    const double c = 0.5, t_end = 1.0;
    std::vector<double> dts{0.02, 0.01, 0.005}, errors;
    for (double dt : dts) {
      EvolveSettings s;
      s.dt = dt;
      s.t_end = t_end;
      s.save_every = static_cast<int>(std::lround(t_end / dt));
      const auto traj = evolve_1d(boosted_soliton(grid, c, 0.0), s);
      Field1D diff = traj.snapshots_1d.back();
      diff.coeffs() -= boosted_soliton(grid, c, t_end).coeffs();
      errors.push_back(std::sqrt(mass(diff)));
    }
    CHECK(std::abs(log_slope(dts, errors) - 2.0) < 0.2);
  }
}

TEST_CASE("orbital distance") {
  Coarse d;
  const auto rec = minimize(256.0, kMass, d.basis, d.grid);
  CHECK(orbital_distance(rec.state, rec.state) < 1e-13);
  const SpectralField3D moved = std::polar(1.0, kPi / 3.0) * shift_z(rec.state, 2.0);
  CHECK(orbital_distance(moved, rec.state) < 1e-8);
  const SpectralField3D noisy = rec.state + 1e-3 * perturbation_direction(d.basis, d.grid, 11);
  const double dist = orbital_distance(noisy, rec.state);
  CHECK(dist > 0.0);
  CHECK(dist < 1e-2);
  CHECK(dist <= sigma_norm(noisy - rec.state) * (1.0 + 1e-12));

  auto other = build_axial_grid(28.0, 128);
  CHECK_THROWS_AS(orbital_distance(rec.state, SpectralField3D(d.basis, other)), Error);
}

TEST_CASE("perturbation direction") {
  Coarse d;
  const auto eta = perturbation_direction(d.basis, d.grid, 5);
  CHECK(mass(eta) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eta.coeffs().bottomRows(12).cwiseAbs().maxCoeff() == 0.0);
  // Even and real in z.
  const CMatrix values = to_physical(eta);
  CHECK(values.imag().cwiseAbs().maxCoeff() < 1e-12);
  for (int j = 1; j < values.cols(); ++j)
    CHECK((values.col(j) - values.col(values.cols() - j)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((perturbation_direction(d.basis, d.grid, 5).coeffs() - eta.coeffs()).norm() == 0.0);
  CHECK((perturbation_direction(d.basis, d.grid, 6).coeffs() - eta.coeffs()).norm() > 0.1);
}

TEST_CASE("virial functional") {
  Coarse d;
  const double omega = 1.0;
  CHECK(virial_second_derivative(SpectralField3D(d.basis, d.grid), omega) == 0.0);

  // Large-amplitude state in a high transverse mode: negative energy and far
  // outside the constraint, so ω‖u‖²_{Σ̇_y} dominates 4ωM.
  const auto sol = soliton(kMass, d.grid);
  CMatrix c = CMatrix::Zero(16, 256);
  c.row(3) = 20.0 * sol.profile.coeffs().transpose();
  SpectralField3D u(d.basis, d.grid, c);
  const double e = energy(u, omega);
  REQUIRE(e < 0.0);
  const double v = virial_second_derivative(u, omega);
  const double by_hand =
      24.0 * e - 4.0 * omega * sigma_y_norm_sq(u) - 4.0 * dz_norm_sq(u) + 16.0 * omega * mass(u);
  CHECK(v == doctest::Approx(by_hand).epsilon(1e-14));
  CHECK(v < 24.0 * e);
}

TEST_CASE("three-dimensional flow") {
  Coarse d;
  const double omega = 256.0;
  const auto rec = minimize(omega, kMass, d.basis, d.grid);

  SUBCASE("standing wave") {
    EvolveSettings s;
    s.dt = 1.25e-4;
    s.keep_snapshots = false;
    const auto traj = evolve_3d(rec.state, omega, s, rec.state);
    CHECK(max_of(traj.orbital_distance) < 1e-6);
    CHECK(traj.mass_drift() < 1e-10);
    CHECK(traj.energy_drift() < 1e-8);
    const double v0 = traj.virial_series.front();
    for (double v : traj.virial_series) CHECK(std::abs(v - v0) < 1e-6 * std::abs(v0));
  }

  SUBCASE("conservation at the default step") {
    EvolveSettings s;
    s.keep_snapshots = false;
    const SpectralField3D u0 = boost(rec.state, 0.5);
    const auto traj = evolve_3d(u0, omega, s);
    CHECK(traj.mass_drift() < 1e-10);
    CHECK(traj.energy_drift() < 1e-5);
    CHECK_FALSE(traj.blow_up);
  }

  SUBCASE("second order on the moving ground state") {
    const SpectralField3D u0 = boost(rec.state, 0.5);
    const double t_end = 0.4;
    std::vector<double> dts{4e-3, 2e-3, 1e-3, 5e-4};
    std::vector<SpectralField3D> finals;
    std::vector<double> drifts;
    for (double dt : dts) {
      EvolveSettings s;
      s.dt = dt;
      s.t_end = t_end;
      s.save_every = static_cast<int>(std::lround(t_end / dt));
      const auto traj = evolve_3d(u0, omega, s);
      finals.push_back(traj.snapshots.back());
      drifts.push_back(traj.energy_drift());
    }
    std::vector<double> diffs;
    for (int i = 0; i < 3; ++i) diffs.push_back(std::sqrt(mass(finals[i] - finals[i + 1])));
    CHECK(std::abs(log_slope({4e-3, 2e-3, 1e-3}, diffs) - 2.0) < 0.2);
    for (int i = 0; i < 3; ++i) CHECK(drifts[i + 1] < drifts[i] / 4.0);
  }

  SUBCASE("forbidden region over a long run") {
    EvolveSettings s;
    s.t_end = 2.0;
    s.keep_snapshots = false;
    SpectralField3D u0 = rec.state + 1e-3 * perturbation_direction(d.basis, d.grid, 2);
    u0 *= std::sqrt(kMass / mass(u0));
    const auto traj = evolve_3d(u0, omega, s);
    const double bound = forbidden_region_bound(kMass, omega, 4.0);
    for (double sig : traj.sigma_series) CHECK(sig <= bound);
    for (double v : traj.virial_series) CHECK(std::isfinite(v));
  }

  SUBCASE("stability runs") {
    EvolveSettings s;
    s.t_end = 0.5;
    const auto still = stability_experiment(rec, 0.0, s, 1);
    CHECK(still.max_distance < 1e-4);
    const auto big = stability_experiment(rec, 1e-3, s, 1);
    const auto small = stability_experiment(rec, 5e-4, s, 1);
    CHECK(big.perturbation == doctest::Approx(1e-3).epsilon(0.05));
    CHECK(big.initial_distance > 0.0);
    CHECK(big.max_distance >= big.initial_distance);
    CHECK(big.max_distance < 1e-2);
    const double ratio = small.max_distance / big.max_distance;
    CHECK(ratio > 0.25);
    CHECK(ratio < 0.75);
    CHECK(big.mass_drift < 1e-10);
  }
}

TEST_CASE("the exact transverse factor loses accuracy near resonance") {
  // 4kωΔt = 2π + 0.05 at k = 6 for ω = 256: the stationary bias of the
  // exact factor blows up, the Cayley factor keeps the fixed point.
  Coarse d;
  const double omega = 256.0;
  const auto rec = minimize(omega, kMass, d.basis, d.grid);
  EvolveSettings s;
  s.dt = (2.0 * kPi + 0.05) / (4.0 * 6.0 * omega);
  s.t_end = 50 * s.dt;
  s.keep_snapshots = false;
  s.transverse_step = TransverseStep::Exact;
  const double exact = max_of(evolve_3d(rec.state, omega, s, rec.state).orbital_distance);
  s.transverse_step = TransverseStep::Cayley;
  const double cayley = max_of(evolve_3d(rec.state, omega, s, rec.state).orbital_distance);
  CHECK(cayley < 1e-4);
  CHECK(exact > 100.0 * cayley);
}

TEST_CASE("Cauchy reduction") {
  Coarse d;
  const auto sol = soliton(kMass, d.grid);
  const SpectralField3D u0 = 1.1 * embed_1d(d.basis, sol.profile);

  SUBCASE("linear flow keeps the k = 0 sector exact") {
    EvolveSettings s;
    s.linear_only = true;
    s.t_end = 0.2;
    const auto res = cauchy_reduction_error(u0, 64.0, s);
    CHECK(max_of(res.error) < 1e-12);
  }

  SUBCASE("error decays in omega") {
    std::vector<double> omegas{64.0, 256.0, 1024.0}, errors;
    for (double w : omegas) {
      EvolveSettings s;
      const auto res = cauchy_reduction_error(u0, w, s);
      errors.push_back(res.error_at(1.0));
      CHECK(std::isfinite(res.c2));
      CHECK(res.fit_max_residual <= std::log(10.0));
      CHECK(std::isfinite(res.parallel_l4_linf));
      CHECK(res.parallel_l4_linf < 10.0);
    }
    CHECK(log_slope(omegas, errors) <= -0.4);
  }

  CHECK_THROWS_AS(cauchy_reduction_error(u0, 64.0, EvolveSettings{}).error_at(0.123), Error);
}

TEST_CASE("non-finite states stop the run") {
  Coarse d;
  const auto sol = soliton(kMass, d.grid);
  const SpectralField3D u0 = 1e160 * embed_1d(d.basis, sol.profile);
  EvolveSettings s;
  s.t_end = 0.01;
  const auto traj = evolve_3d(u0, 64.0, s);
  CHECK(traj.blow_up);
  CHECK(traj.times.size() <= 1);
  CHECK(traj.last_valid_time == 0.0);
}
