#include "nlsred/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlsred/ground_state_1d.hpp"

namespace nlsred {

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw Error(ErrorKind::InvalidArgument, "slope fit needs at least three (x, y) pairs");
  const std::size_t n = xs.size();
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "slope fit needs positive values");
    design(i, 0) = std::log(xs[i]);
    design(i, 1) = 1.0;
    rhs[i] = std::log(ys[i]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  const double mean = rhs.mean();
  const double ss_tot = (rhs.array() - mean).square().sum();
  const double ss_res = (design * coef - rhs).squaredNorm();
  return {coef[0], coef[1], ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

namespace {

SpectralField3D limit_profile(const GroundStateRecord& rec) {
  return embed_1d(rec.state.basis_ptr(), soliton(rec.mass, rec.state.grid_ptr()).profile);
}

// Degenerate columns (an exact zero) get NaN slopes instead of aborting.
SlopeFit fit_or_nan(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (std::any_of(ys.begin(), ys.end(), [](double y) { return !(y > 0.0); })) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  return fit_slope(xs, ys);
}

}  // namespace

double high_norm_convergence(const GroundStateRecord& rec, int k, double eta) {
  if (k < 1 || !(eta > 0.0 && eta < 1.0) || std::abs(k / eta - std::round(k / eta)) > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "high norm convergence needs k >= 1, 0 < eta < 1 and k/eta integer");
  return hermite_sobolev_norm(rec.state - limit_profile(rec), k);
}

SweepRow measure_reduction(const GroundStateRecord& rec) {
  const Soliton1D limit = soliton(rec.mass, rec.state.grid_ptr());
  const SpectralField3D diff = rec.state - embed_1d(rec.state.basis_ptr(), limit.profile);
  const SpectralField3D p1 = project_p1(rec.state);
  Field1D par_err = parallel_component(rec.state);
  par_err.coeffs() -= limit.profile.coeffs();

  SweepRow row;
  row.omega = rec.omega;
  row.p1_mass = std::sqrt(mass(p1));
  row.sigma_y = std::sqrt(rec.sigma_y_sq);
  row.dz_p1 = std::sqrt(dz_norm_sq(p1));
  row.h1_parallel_err = h1_norm(par_err);
  row.mu_err = std::abs(rec.mu - limit.mu);
  row.energy_err = std::abs(rec.energy - (-limit.mu * rec.mass / 6.0));
  row.sigma_total_err = sigma_norm(diff);
  row.high_norm_err = hermite_sobolev_norm(diff, 1.0);
  row.iterations = rec.iterations;
  return row;
}

SweepResult sweep(std::vector<double> omegas, double mass, BasisPtr basis, GridPtr grid, const FlowSettings& flow,
                  bool cold_start_check) {
  if (omegas.size() < 3) throw Error(ErrorKind::InvalidArgument, "sweep needs at least three omega values");
  std::sort(omegas.begin(), omegas.end());
  if (!(omegas.front() > 0.0) || omegas.back() < 10.0 * omegas.front())
    throw Error(ErrorKind::InvalidArgument, "sweep omegas must be positive and span at least one decade");

  SweepResult result;
  result.mass = mass;
  std::optional<SpectralField3D> warm;
  try {
    for (double omega : omegas) {
      GroundStateRecord rec = minimize(omega, mass, basis, grid, flow, warm);
      warm = rec.state;
      result.rows.push_back(measure_reduction(rec));
      result.records.push_back(std::move(rec));
    }
    if (cold_start_check) {
      const GroundStateRecord cold = minimize(omegas.back(), mass, basis, grid, flow);
      result.cold_start_distance = sigma_norm(cold.state - result.records.back().state);
    }
    result.complete = true;
  } catch (const Error& e) {
    result.failure = e.what();
  }

  if (result.rows.size() >= 3) {
    std::vector<double> xs;
    for (const auto& row : result.rows) xs.push_back(row.omega);
    for (int c = 0; c < SweepRow::kErrorColumns; ++c) {
      std::vector<double> ys;
      for (const auto& row : result.rows) ys.push_back(row.errors()[c]);
      result.slopes[c] = fit_or_nan(xs, ys);
    }
    std::vector<double> ys;
    for (const auto& row : result.rows) ys.push_back(row.high_norm_err);
    result.high_norm_slope = fit_or_nan(xs, ys);
  }
  return result;
}

}  // namespace nlsred
