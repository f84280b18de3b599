#include "nlsred/minimizer.hpp"

#include <cmath>
#include <sstream>

#include "nlsred/ground_state_1d.hpp"

namespace nlsred {

double lagrange_multiplier(const SpectralField3D& q, double omega, double mass) {
  if (!(mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "lagrange multiplier needs positive mass");
  return (l4_norm_4(q) - omega * sigma_y_norm_sq(q) - dz_norm_sq(q)) / mass;
}

namespace {

// Diagonal symbol ω(Λ_k - 2) + ξ_n².
RMatrix linear_symbol(const TransverseBasis& basis, const AxialGrid& grid, double omega) {
  RMatrix a(basis.mode_count(), grid.point_count());
  for (int k = 0; k < a.rows(); ++k)
    for (int n = 0; n < a.cols(); ++n) a(k, n) = omega * basis.gaps()[k] + grid.wavenumbers()[n] * grid.wavenumbers()[n];
  return a;
}

CMatrix el_operator(const SpectralField3D& q, double omega, double mu, const CMatrix& cubic) {
  const RMatrix a = linear_symbol(q.basis(), q.grid(), omega);
  return (a.cast<cdouble>().array() * q.coeffs().array()).matrix() - cubic + mu * q.coeffs();
}

}  // namespace

double el_residual(const SpectralField3D& q, double omega, double mu) {
  return el_operator(q, omega, mu, cubic_term(q)).norm();
}

std::array<double, 2> pohozaev_residuals(const SpectralField3D& q, double mu, double omega) {
  const double s = sigma_y_norm_sq(q), d = dz_norm_sq(q), f = l4_norm_4(q), m = mass(q);
  return {omega * s + d - f + mu * m, -0.5 * omega * s + 0.5 * d + 0.25 * f - 0.5 * mu * m};
}

double energy_identity_check(const GroundStateRecord& rec) {
  return rec.energy - (-rec.mu * rec.mass / 6.0 + rec.omega * rec.sigma_y_sq / 3.0);
}

double admissibility_threshold(double mass, double gn_constant) {
  return std::pow(gn_constant, 4) * mass * mass;
}

double forbidden_region_bound(double mass, double omega, double gn_constant) {
  return gn_constant * gn_constant * mass * mass * mass / (2.0 * omega);
}

SpectralField3D center_even_real(const SpectralField3D& u) {
  const Field1D par = parallel_component(u);
  SpectralField3D centered = shift_z(u, -peak_position(par));
  const cdouble at_zero = evaluate_with_derivatives(parallel_component(centered), 0.0)[0];
  if (std::abs(at_zero) > 0.0) centered *= std::conj(at_zero) / std::abs(at_zero);
  const auto& grid = u.grid();
  CMatrix sym(u.coeffs().rows(), u.coeffs().cols());
  for (int k = 0; k < sym.rows(); ++k)
    for (int n = 0; n < sym.cols(); ++n)
      sym(k, n) = 0.5 * (centered.coeffs()(k, n).real() + centered.coeffs()(k, grid.mirror(n)).real());
  return SpectralField3D(u.basis_ptr(), u.grid_ptr(), std::move(sym), true);
}

GroundStateRecord minimize(double omega, double mass, BasisPtr basis, GridPtr grid, const FlowSettings& settings,
                           const std::optional<SpectralField3D>& init) {
  if (!(omega > 0.0) || !(mass > 0.0))
    throw Error(ErrorKind::InvalidArgument, "minimize needs positive omega and mass");
  if (!(settings.tau > 0.0) || !(settings.tol_increment > 0.0) || !(settings.tol_residual > 0.0))
    throw Error(ErrorKind::InvalidArgument, "flow step and tolerances must be positive");
  if (omega < admissibility_threshold(mass, settings.gn_constant)) {
    std::ostringstream msg;
    msg << "omega = " << omega << " is below the admissibility threshold C^4 m^2 = "
        << admissibility_threshold(mass, settings.gn_constant) << "; the constraint is monitored only";
    warn(msg.str());
  }

  SpectralField3D u = init ? *init : embed_1d(basis, soliton(mass, grid).profile);
  if (!u.same_discretization(SpectralField3D(basis, grid)))
    throw Error(ErrorKind::ShapeMismatch, "initial field does not match the requested discretization");
  const double initial_mass = ::nlsred::mass(u);
  if (!(initial_mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial field is zero");
  u.coeffs() *= std::sqrt(mass / initial_mass);

  const RMatrix a = linear_symbol(*basis, *grid, omega);
  const RMatrix denom = (1.0 + settings.tau * a.array()).matrix();
  const double constraint = std::sqrt(omega);

  GroundStateRecord rec;
  rec.omega = omega;
  rec.mass = mass;
  double increment = 0.0, residual = 0.0, scale = 1.0, previous_energy = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < settings.max_iter; ++it) {
    const CMatrix physical = to_physical(u);
    const CMatrix cubic = cubic_term(u, physical);
    const CMatrix& c = u.coeffs();
    const double s = sigma_y_norm_sq(u), d = dz_norm_sq(u), f = l4_norm_4(u, physical);
    const double mu = (f - omega * s - d) / mass;
    const double e = 0.5 * omega * s + 0.5 * d - 0.25 * f;

    if (s > constraint) {
      std::ostringstream msg;
      msg << "constraint breach at iteration " << it << ": sigma_y^2 = " << s << " > sqrt(omega) = " << constraint;
      throw Error(ErrorKind::ConstraintBreach, msg.str());
    }
    if (it > 0 && e > previous_energy)
      rec.max_energy_rise = std::max(rec.max_energy_rise, (e - previous_energy) / std::max(1.0, std::abs(e)));
    previous_energy = e;

    // Residual is only needed once the increment is small.
    if (increment > 0.0 && increment < settings.tol_increment) {
      scale = cubic.norm();
      residual = el_operator(u, omega, mu, cubic).norm();
      if (residual < settings.tol_residual * scale) {
        rec.flow_mu = mu;
        converged = true;
        break;
      }
    }

    CMatrix next = (c + settings.tau * (cubic - mu * c)).cwiseQuotient(denom.cast<cdouble>());
    next *= std::sqrt(mass / next.squaredNorm());
    increment = (next - c).norm() / settings.tau;
    u.coeffs() = std::move(next);
    if (!std::isfinite(increment)) throw Error(ErrorKind::NonConvergence, "gradient flow produced non-finite values");
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "gradient flow did not converge in " << settings.max_iter << " iterations (increment " << increment
        << ", EL residual " << residual << ")";
    throw Error(ErrorKind::NonConvergence, msg.str());
  }
  if (rec.max_energy_rise > settings.energy_slack) {
    std::ostringstream msg;
    msg << "energy increased along the flow by a relative " << rec.max_energy_rise;
    warn(msg.str());
  }

  rec.state = center_even_real(u);
  rec.iterations = it;
  rec.mu = lagrange_multiplier(rec.state, omega, mass);
  rec.energy = energy(rec.state, omega);
  rec.sigma_y_sq = sigma_y_norm_sq(rec.state);
  const CMatrix cubic = cubic_term(rec.state);
  rec.residual_scale = cubic.norm();
  rec.residual_el = el_operator(rec.state, omega, rec.mu, cubic).norm();
  rec.pohozaev = pohozaev_residuals(rec.state, rec.mu, omega);
  if (rec.mu < 0.0) warn("negative Lagrange multiplier: state is not a minimizer");
  return rec;
}

}  // namespace nlsred
