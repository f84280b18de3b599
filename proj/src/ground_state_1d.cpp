#include "nlsred/ground_state_1d.hpp"

#include <cmath>
#include <sstream>

namespace nlsred {

double soliton_multiplier(double mass) { return mass * mass / (64.0 * kPi * kPi); }

Soliton1D soliton(double mass, GridPtr grid) {
  if (!(mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "soliton mass must be positive");
  const double mu = soliton_multiplier(mass);
  const double root = std::sqrt(mu);
  const double tail = 1.0 / std::cosh(root * grid->half_length());
  if (tail > 1e-4) {
    std::ostringstream msg;
    msg << "axial domain too short for soliton of mass " << mass << ": boundary tail " << tail;
    throw Error(ErrorKind::Underresolved, msg.str());
  }
  if (tail > 1e-7) {
    std::ostringstream msg;
    msg << "soliton boundary tail " << tail << " exceeds 1e-7";
    warn(msg.str());
  }
  Eigen::VectorXcd values(grid->point_count());
  const double amplitude = std::sqrt(4.0 * kPi * mu);
  for (int j = 0; j < values.size(); ++j) values[j] = amplitude / std::cosh(root * grid->nodes()[j]);
  Field1D profile = Field1D::from_values(grid, values);
  const double e = energy_1d(profile);
  return Soliton1D{mass, mu, e, tail, std::move(profile)};
}

double energy_1d(const Field1D& v) { return 0.5 * dz_norm_sq(v) - l4_norm_4(v) / (8.0 * kPi); }

Eigen::VectorXcd cubic_term_1d(const Field1D& v) {
  const Eigen::VectorXcd values = v.values();
  Eigen::VectorXcd cubic = values.array() * values.array().abs2() / (2.0 * kPi);
  v.grid().forward(cubic.data(), 1);
  return cubic;
}

double el_residual_1d(const Field1D& q, double mu) {
  const Eigen::VectorXd xi2 = q.grid().wavenumbers().array().square();
  const Eigen::VectorXcd r = xi2.cast<cdouble>().cwiseProduct(q.coeffs()) - cubic_term_1d(q) + mu * q.coeffs();
  return r.norm();
}

double peak_position(const Field1D& v) {
  const Eigen::VectorXcd values = v.values();
  Eigen::Index best = 0;
  values.cwiseAbs2().maxCoeff(&best);
  double z = v.grid().nodes()[best];
  // Newton on d/dz |v|² = 2 Re(conj(v) v').
  for (int it = 0; it < 50; ++it) {
    const auto [f, df, d2f] = evaluate_with_derivatives(v, z);
    const double g1 = 2.0 * std::real(std::conj(f) * df);
    const double g2 = 2.0 * (std::norm(df) + std::real(std::conj(f) * d2f));
    if (!(g2 < 0.0)) break;
    const double step = -g1 / g2;
    z += std::clamp(step, -v.grid().spacing(), v.grid().spacing());
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

Field1D center_even_real(const Field1D& v) {
  Field1D centered = shift_z(v, -peak_position(v));
  const cdouble at_zero = evaluate_with_derivatives(centered, 0.0)[0];
  if (std::abs(at_zero) > 0.0) centered.coeffs() *= std::conj(at_zero) / std::abs(at_zero);
  const auto& grid = v.grid();
  Eigen::VectorXcd sym(grid.point_count());
  for (int n = 0; n < grid.point_count(); ++n)
    sym[n] = 0.5 * (centered.coeffs()[n].real() + centered.coeffs()[grid.mirror(n)].real());
  return Field1D(v.grid_ptr(), std::move(sym));
}

GroundState1D solve_1d_ground_state(double mass, GridPtr grid, const Flow1DSettings& settings,
                                    const std::optional<Field1D>& init) {
  if (!(mass > 0.0) || !(settings.tau > 0.0) || !(settings.tol > 0.0))
    throw Error(ErrorKind::InvalidArgument, "1D ground state needs positive mass, step and tolerance");

  Field1D v(grid);
  if (init) {
    v = *init;
  } else {
    Eigen::VectorXcd gauss(grid->point_count());
    for (int j = 0; j < gauss.size(); ++j) gauss[j] = std::exp(-0.5 * grid->nodes()[j] * grid->nodes()[j]);
    v = Field1D::from_values(grid, gauss);
  }
  v.coeffs() *= std::sqrt(mass / ::nlsred::mass(v));

  const Eigen::VectorXd xi2 = grid->wavenumbers().array().square();
  const Eigen::VectorXd denom = (1.0 + settings.tau * xi2.array()).matrix();
  double increment = 0.0;
  int it = 0;
  for (; it < settings.max_iter; ++it) {
    const Eigen::VectorXcd cubic = cubic_term_1d(v);
    const Eigen::VectorXcd& c = v.coeffs();
    const double mu = (c.dot(cubic).real() - c.cwiseAbs2().dot(xi2)) / mass;
    Eigen::VectorXcd next = (c + settings.tau * (cubic - mu * c)).cwiseQuotient(denom.cast<cdouble>());
    next *= std::sqrt(mass / next.squaredNorm());
    increment = (next - c).norm() / settings.tau;
    v.coeffs() = std::move(next);
    if (increment < settings.tol) {
      ++it;
      break;
    }
  }
  if (!(increment < settings.tol)) {
    std::ostringstream msg;
    msg << "1D gradient flow did not converge in " << settings.max_iter << " iterations (increment " << increment
        << ")";
    throw Error(ErrorKind::NonConvergence, msg.str());
  }

  GroundState1D out{mass, 0.0, 0.0, 0.0, it, center_even_real(v)};
  out.mu = (l4_norm_4(out.profile) / (2.0 * kPi) - dz_norm_sq(out.profile)) / mass;
  out.energy = energy_1d(out.profile);
  out.residual = el_residual_1d(out.profile, out.mu);
  return out;
}

}  // namespace nlsred
