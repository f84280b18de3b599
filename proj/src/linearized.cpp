#include "nlsred/linearized.hpp"

#include <cmath>
#include <sstream>

#include "nlsred/ground_state_1d.hpp"

namespace nlsred {

const char* sector_name(Sector sector) {
  switch (sector) {
    case Sector::Even: return "even";
    case Sector::Odd: return "odd";
    case Sector::Full: return "full";
  }
  return "?";
}

Sector parse_sector(const std::string& name) {
  if (name == "even") return Sector::Even;
  if (name == "odd") return Sector::Odd;
  if (name == "full") return Sector::Full;
  throw Error(ErrorKind::InvalidArgument, "unknown sector '" + name + "' (expected even, odd or full)");
}

namespace {

struct AxialFunction {
  int n;
  bool odd;
};

std::vector<AxialFunction> sector_functions(const AxialGrid& grid, Sector sector) {
  std::vector<AxialFunction> out;
  const int half = grid.nyquist();
  if (sector != Sector::Odd)
    for (int n = 0; n <= half; ++n) out.push_back({n, false});
  if (sector != Sector::Even)
    for (int n = 1; n < half; ++n) out.push_back({n, true});
  return out;
}

}  // namespace

Eigen::MatrixXd sector_basis(const AxialGrid& grid, Sector sector) {
  const auto functions = sector_functions(grid, sector);
  const double length = grid.half_length();
  const double dk = kPi / length;
  Eigen::MatrixXd b(grid.point_count(), functions.size());
  for (std::size_t a = 0; a < functions.size(); ++a) {
    const auto [n, odd] = functions[a];
    const bool edge = n == 0 || n == grid.nyquist();
    const double norm = 1.0 / std::sqrt(edge ? 2.0 * length : length);
    for (int j = 0; j < grid.point_count(); ++j) {
      const double phase = n * dk * grid.nodes()[j];
      b(j, a) = norm * (odd ? std::sin(phase) : std::cos(phase));
    }
  }
  return b;
}

Eigen::VectorXd sector_symbol(const AxialGrid& grid, Sector sector) {
  const auto functions = sector_functions(grid, sector);
  const double dk = kPi / grid.half_length();
  Eigen::VectorXd s(functions.size());
  for (std::size_t a = 0; a < functions.size(); ++a) s[a] = std::pow(functions[a].n * dk, 2);
  return s;
}

Eigen::VectorXd sector_coordinates(const AxialGrid& grid, Sector sector, const Eigen::VectorXd& values) {
  if (values.size() != grid.point_count()) throw Error(ErrorKind::ShapeMismatch, "values do not match the axial grid");
  return grid.spacing() * (sector_basis(grid, sector).transpose() * values);
}

Eigen::VectorXd sector_coordinates(const Field1D& v, Sector sector) {
  return sector_coordinates(v.grid(), sector, v.values().real());
}

Eigen::VectorXd sector_coordinates(const SpectralField3D& u, Sector sector) {
  const Eigen::MatrixXd b = sector_basis(u.grid(), sector);
  const int dim = static_cast<int>(b.cols());
  Eigen::VectorXd out(u.coeffs().rows() * dim);
  for (int k = 0; k < u.coeffs().rows(); ++k) {
    const Eigen::VectorXd line = u.grid().inverse(Eigen::VectorXcd(u.coeffs().row(k).transpose())).real();
    out.segment(k * dim, dim) = u.grid().spacing() * (b.transpose() * line);
  }
  return out;
}

LinearOperatorMatrix assemble_L1d(const Field1D& q, double mu, Sector sector) {
  const auto& grid = q.grid();
  if (q.coeffs().norm() > 0.0 && std::abs(peak_position(q)) > grid.spacing())
    throw Error(ErrorKind::InvalidArgument, "linearization needs a profile centred at z = 0");
  const Eigen::MatrixXd b = sector_basis(grid, sector);
  const Eigen::VectorXd values = q.values().real();
  const Eigen::VectorXd potential = (3.0 / (2.0 * kPi)) * grid.spacing() * values.array().square();

  LinearOperatorMatrix op;
  op.sector = sector;
  op.axial_symbol = sector_symbol(grid, sector);
  op.mu = mu;
  op.source = "1d";
  op.matrix = -(b.transpose() * potential.asDiagonal() * b);
  op.matrix.diagonal().array() += op.axial_symbol.array() + mu;
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

LinearOperatorMatrix assemble_L3d(const GroundStateRecord& rec, Sector sector) {
  const auto& basis = rec.state.basis();
  const auto& grid = rec.state.grid();
  const int modes = basis.mode_count();
  const int nq = basis.quad_size();
  const int nz = grid.point_count();
  const Eigen::MatrixXd b = sector_basis(grid, sector);
  const int dim = static_cast<int>(b.cols());

  // W_{kk'}(z_j) = Σ_q w_q φ_k φ_k' 3Q², scaled by dz.
  const RMatrix q2 = to_physical(rec.state).real().array().square();
  std::vector<Eigen::MatrixXd> w(modes * modes, Eigen::MatrixXd());
  Eigen::MatrixXd weighted(nq, nz);
  for (int k = 0; k < modes; ++k) {
    for (int q = 0; q < nq; ++q)
      weighted.row(q) = (3.0 * grid.spacing() * basis.weights()[q] * basis.mode_values()(q, k)) * q2.row(q);
    for (int l = 0; l < modes; ++l) {
      Eigen::VectorXd line = weighted.transpose() * basis.mode_values().col(l);
      w[k * modes + l] = b.transpose() * line.asDiagonal() * b;
    }
  }

  LinearOperatorMatrix op;
  op.sector = sector;
  op.transverse_modes = modes;
  op.axial_symbol = sector_symbol(grid, sector);
  op.omega = rec.omega;
  op.mu = rec.mu;
  std::ostringstream src;
  src << "3d omega=" << rec.omega << " mass=" << rec.mass;
  op.source = src.str();
  op.matrix.resize(modes * dim, modes * dim);
  for (int k = 0; k < modes; ++k)
    for (int l = 0; l < modes; ++l) op.matrix.block(k * dim, l * dim, dim, dim) = -w[k * modes + l];
  for (int k = 0; k < modes; ++k)
    op.matrix.diagonal().segment(k * dim, dim).array() +=
        rec.omega * basis.gaps()[k] + op.axial_symbol.array() + rec.mu;

  const double asym = (op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff();
  const double size = op.matrix.cwiseAbs().maxCoeff();
  if (asym > 1e-10 * size) {
    std::ostringstream msg;
    msg << "linearized operator asymmetric by " << asym << " (quadrature inconsistency)";
    throw Error(ErrorKind::ShapeMismatch, msg.str());
  }
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

Eigen::VectorXd eigenvalues(const LinearOperatorMatrix& op) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(op.matrix, Eigen::EigenvaluesOnly).eigenvalues();
}

CoercivityResult coercivity_check(const LinearOperatorMatrix& op, const Eigen::VectorXd& q) {
  const int n = op.dimension();
  if (q.size() != n) throw Error(ErrorKind::ShapeMismatch, "constraint vector does not match the operator");
  const double norm = q.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "constraint vector is zero");
  // Householder reflector mapping q to a multiple of e_0; its other columns
  // span q's orthogonal complement.
  Eigen::VectorXd v = q / norm;
  v[0] += v[0] >= 0.0 ? 1.0 : -1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / v.squaredNorm()) * v * v.transpose();
  const Eigen::MatrixXd complement = h.rightCols(n - 1);
  const Eigen::MatrixXd restricted = complement.transpose() * op.matrix * complement;
  const double lowest =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(restricted, Eigen::EigenvaluesOnly).eigenvalues()[0];
  return {lowest, lowest};
}

double nondegeneracy_estimate_1d(const LinearOperatorMatrix& op) {
  Eigen::VectorXd scale(op.dimension());
  for (int k = 0; k < op.transverse_modes; ++k)
    scale.segment(k * op.axial_dimension(), op.axial_dimension()) =
        (1.0 + op.axial_symbol.array()).rsqrt().matrix();
  const Eigen::MatrixXd normalized = scale.asDiagonal() * op.matrix * scale.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(normalized, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .minCoeff();
}

SpectralField3D apply_linearized(const GroundStateRecord& rec, const SpectralField3D& phi) {
  if (!phi.same_discretization(rec.state))
    throw Error(ErrorKind::ShapeMismatch, "field does not match the ground state discretization");
  const auto& basis = phi.basis();
  const auto& grid = phi.grid();
  const CMatrix q = to_physical(rec.state);
  CMatrix product = to_physical(phi);
  product.array() *= 3.0 * q.array().abs2();
  SpectralField3D out = to_spectral(phi.basis_ptr(), phi.grid_ptr(), product);
  out *= -1.0;
  for (int k = 0; k < basis.mode_count(); ++k)
    for (int n = 0; n < grid.point_count(); ++n)
      out.coeffs()(k, n) += (rec.omega * basis.gaps()[k] + grid.wavenumbers()[n] * grid.wavenumbers()[n] + rec.mu) *
                            phi.coeffs()(k, n);
  return out;
}

double i_functional(const SpectralField3D& u, double omega, double mu) {
  return energy(u, omega) + 0.5 * mu * mass(u);
}

SpectralField3D random_start(BasisPtr basis, GridPtr grid, double mass, Rng& rng) {
  const double amplitude = rng.uniform(0.5, 2.0);
  const double width = rng.uniform(0.5, 2.0);
  const double center = rng.uniform(-3.0, 3.0);
  Eigen::VectorXcd values(grid->point_count());
  for (int j = 0; j < values.size(); ++j)
    values[j] = amplitude / std::cosh(width * (grid->nodes()[j] - center));
  SpectralField3D u = embed_1d(basis, Field1D::from_values(grid, values));
  const double base = std::sqrt(::nlsred::mass(u));
  for (int k = 1; k < std::min(4, basis->mode_count()); ++k) {
    const double noise_center = center + rng.uniform(-1.0, 1.0);
    const double noise_width = rng.uniform(0.5, 2.0);
    const double level = 1e-2 * rng.normal();
    Eigen::VectorXcd line(grid->point_count());
    for (int j = 0; j < line.size(); ++j) {
      const double d = (grid->nodes()[j] - noise_center) / noise_width;
      line[j] = std::exp(-0.5 * d * d);
    }
    grid->forward(line.data(), 1);
    u.coeffs().row(k) = (level * base / line.norm()) * line.transpose();
  }
  u.coeffs() *= std::sqrt(mass) / std::sqrt(::nlsred::mass(u));
  u.set_real_valued(true);
  return u;
}

UniquenessResult uniqueness_experiment(double omega, double mass, int n_starts, std::uint64_t seed, BasisPtr basis,
                                       GridPtr grid, const FlowSettings& flow) {
  if (n_starts < 2) throw Error(ErrorKind::InvalidArgument, "uniqueness experiment needs at least two starts");
  UniquenessResult result;
  result.starts = n_starts;
  Rng rng(seed);
  for (int s = 0; s < n_starts; ++s) {
    const SpectralField3D init = random_start(basis, grid, mass, rng);
    try {
      result.records.push_back(minimize(omega, mass, basis, grid, flow, init));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "start " << s << ": " << e.what();
      result.failures.push_back(msg.str());
    }
  }
  result.survivors = static_cast<int>(result.records.size());
  const auto& recs = result.records;
  for (std::size_t i = 0; i < recs.size(); ++i)
    for (std::size_t j = i + 1; j < recs.size(); ++j) {
      result.max_distance = std::max(result.max_distance, sigma_norm(recs[i].state - recs[j].state));
      const double ii = i_functional(recs[i].state, omega, recs[i].mu);
      const double ij = i_functional(recs[j].state, omega, recs[j].mu);
      result.max_i_spread = std::max(result.max_i_spread, std::abs(ii - ij) / std::abs(ii));
    }
  return result;
}

}  // namespace nlsred
