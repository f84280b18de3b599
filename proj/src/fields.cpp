#include "nlsred/fields.hpp"

#include <cmath>
#include <string>

namespace nlsred {

SpectralField3D::SpectralField3D(BasisPtr basis, GridPtr grid)
    : basis_(std::move(basis)), grid_(std::move(grid)) {
  coeffs_ = CMatrix::Zero(basis_->mode_count(), grid_->point_count());
}

SpectralField3D::SpectralField3D(BasisPtr basis, GridPtr grid, CMatrix coeffs, bool real_valued)
    : basis_(std::move(basis)), grid_(std::move(grid)), coeffs_(std::move(coeffs)),
      real_valued_(real_valued) {
  if (coeffs_.rows() != basis_->mode_count() || coeffs_.cols() != grid_->point_count())
    throw Error(ErrorKind::ShapeMismatch, "coefficient matrix does not match basis/grid");
}

bool SpectralField3D::same_discretization(const SpectralField3D& other) const {
  if (basis_ == other.basis_ && grid_ == other.grid_) return true;
  return basis_->mode_count() == other.basis_->mode_count() &&
         basis_->quad_size() == other.basis_->quad_size() &&
         grid_->point_count() == other.grid_->point_count() &&
         grid_->half_length() == other.grid_->half_length();
}

namespace {
void require_same(const SpectralField3D& a, const SpectralField3D& b) {
  if (!a.same_discretization(b)) throw Error(ErrorKind::ShapeMismatch, "fields use different discretizations");
}
}  // namespace

SpectralField3D& SpectralField3D::operator+=(const SpectralField3D& other) {
  require_same(*this, other);
  coeffs_ += other.coeffs_;
  real_valued_ = real_valued_ && other.real_valued_;
  return *this;
}

SpectralField3D& SpectralField3D::operator-=(const SpectralField3D& other) {
  require_same(*this, other);
  coeffs_ -= other.coeffs_;
  real_valued_ = real_valued_ && other.real_valued_;
  return *this;
}

SpectralField3D& SpectralField3D::operator*=(cdouble scale) {
  coeffs_ *= scale;
  if (scale.imag() != 0.0) real_valued_ = false;
  return *this;
}

SpectralField3D operator+(SpectralField3D a, const SpectralField3D& b) { return a += b; }
SpectralField3D operator-(SpectralField3D a, const SpectralField3D& b) { return a -= b; }
SpectralField3D operator*(cdouble s, SpectralField3D a) { return a *= s; }

Field1D::Field1D(GridPtr grid) : grid_(std::move(grid)) {
  coeffs_ = Eigen::VectorXcd::Zero(grid_->point_count());
}

Field1D::Field1D(GridPtr grid, Eigen::VectorXcd coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_->point_count())
    throw Error(ErrorKind::ShapeMismatch, "1D coefficient length does not match grid");
}

Field1D Field1D::from_values(GridPtr grid, const Eigen::VectorXcd& values) {
  Eigen::VectorXcd c = grid->forward(values);
  return Field1D(std::move(grid), std::move(c));
}

Eigen::VectorXcd Field1D::values() const { return grid_->inverse(coeffs_); }

CMatrix to_physical(const SpectralField3D& u) {
  CMatrix values = u.basis().mode_values().cast<cdouble>() * u.coeffs();
  u.grid().inverse(values.data(), static_cast<int>(values.rows()));
  return values;
}

SpectralField3D to_spectral(BasisPtr basis, GridPtr grid, const CMatrix& values) {
  if (values.rows() != basis->quad_size() || values.cols() != grid->point_count())
    throw Error(ErrorKind::ShapeMismatch,
                "physical grid is " + std::to_string(values.rows()) + "x" + std::to_string(values.cols()) +
                    ", expected " + std::to_string(basis->quad_size()) + "x" +
                    std::to_string(grid->point_count()));
  CMatrix lines = values;
  grid->forward(lines.data(), static_cast<int>(lines.rows()));
  CMatrix coeffs = basis->projector().cast<cdouble>() * lines;
  return SpectralField3D(std::move(basis), std::move(grid), std::move(coeffs));
}

CMatrix cubic_term(const SpectralField3D& u, const CMatrix& physical) {
  CMatrix cubic = physical.array() * physical.array().abs2();
  return to_spectral(u.basis_ptr(), u.grid_ptr(), cubic).coeffs();
}

CMatrix cubic_term(const SpectralField3D& u) { return cubic_term(u, to_physical(u)); }

double mass(const SpectralField3D& u) { return u.coeffs().squaredNorm(); }

double sigma_y_norm_sq(const SpectralField3D& u) {
  return (u.basis().gaps().asDiagonal() * u.coeffs().cwiseAbs2()).sum();
}

double dz_norm_sq(const SpectralField3D& u) {
  const Eigen::VectorXd xi2 = u.grid().wavenumbers().array().square();
  return (u.coeffs().cwiseAbs2() * xi2).sum();
}

double l4_norm_4(const SpectralField3D& u, const CMatrix& physical) {
  const Eigen::VectorXd line_sums = physical.cwiseAbs2().cwiseAbs2().rowwise().sum();
  return u.grid().spacing() * u.basis().weights().dot(line_sums);
}

double l4_norm_4(const SpectralField3D& u) { return l4_norm_4(u, to_physical(u)); }

double energy(const SpectralField3D& u, double omega) {
  return 0.5 * omega * sigma_y_norm_sq(u) + 0.5 * dz_norm_sq(u) - 0.25 * l4_norm_4(u);
}

double unshifted_energy(const SpectralField3D& u, double omega) { return energy(u, omega) + omega * mass(u); }

cdouble inner_product(const SpectralField3D& a, const SpectralField3D& b) {
  require_same(a, b);
  return (a.coeffs().conjugate().cwiseProduct(b.coeffs())).sum();
}

double sigma_norm(const SpectralField3D& u) {
  return std::sqrt(sigma_y_norm_sq(u)) + std::sqrt(dz_norm_sq(u)) + std::sqrt(mass(u));
}

SpectralField3D project_p0(const SpectralField3D& u) {
  SpectralField3D out(u.basis_ptr(), u.grid_ptr());
  out.coeffs().row(0) = u.coeffs().row(0);
  out.set_real_valued(u.real_valued());
  return out;
}

SpectralField3D project_p1(const SpectralField3D& u) {
  SpectralField3D out = u;
  out.coeffs().row(0).setZero();
  return out;
}

Field1D parallel_component(const SpectralField3D& u) {
  return Field1D(u.grid_ptr(), u.coeffs().row(0).transpose());
}

SpectralField3D embed_1d(BasisPtr basis, const Field1D& v) {
  SpectralField3D out(std::move(basis), v.grid_ptr());
  out.coeffs().row(0) = v.coeffs().transpose();
  return out;
}

namespace {
Eigen::VectorXcd shift_phases(const AxialGrid& grid, double shift) {
  Eigen::VectorXcd phases(grid.point_count());
  for (int n = 0; n < grid.point_count(); ++n)
    phases[n] = std::polar(1.0, -grid.wavenumbers()[n] * shift);
  // The Nyquist mode is its own mirror; a real field keeps a real Nyquist
  // coefficient only under its cosine part.
  phases[grid.nyquist()] = std::cos(grid.wavenumbers()[grid.nyquist()] * shift);
  return phases;
}
}  // namespace

SpectralField3D shift_z(const SpectralField3D& u, double shift) {
  SpectralField3D out = u;
  out.coeffs() = u.coeffs() * shift_phases(u.grid(), shift).asDiagonal();
  return out;
}

Field1D shift_z(const Field1D& v, double shift) {
  return Field1D(v.grid_ptr(), v.coeffs().cwiseProduct(shift_phases(v.grid(), shift)));
}

double gn_ratio(const SpectralField3D& u) {
  const SpectralField3D p0 = project_p0(u);
  const SpectralField3D p1 = project_p1(u);
  const double p0_norm = std::sqrt(mass(p0));
  const double p1_norm = std::sqrt(mass(p1));
  const double rhs = p0_norm * p0_norm * p0_norm * std::sqrt(dz_norm_sq(p0)) +
                     p1_norm * std::sqrt(dz_norm_sq(p1)) * sigma_y_norm_sq(p1);
  if (!(rhs > 0.0)) throw Error(ErrorKind::Vacuous, "Gagliardo-Nirenberg inequality vacuous: right-hand side is zero");
  return l4_norm_4(u) / rhs;
}

namespace {
// Σ (Λ_k + ξ_n²)^{2p} |c_{k,n}|².
double multiplier_sum(const SpectralField3D& u, double power) {
  const auto& lambda = u.basis().eigenvalues();
  const auto& xi = u.grid().wavenumbers();
  double total = 0.0;
  for (int k = 0; k < u.coeffs().rows(); ++k)
    for (int n = 0; n < u.coeffs().cols(); ++n) {
      const double symbol = lambda[k] + xi[n] * xi[n];
      total += std::pow(symbol, 2.0 * power) * std::norm(u.coeffs()(k, n));
    }
  return total;
}
}  // namespace

double hermite_sobolev_norm(const SpectralField3D& u, double power) {
  return std::sqrt(multiplier_sum(u, power));
}

InterpolationSides interpolation_check(const SpectralField3D& u, int k, double theta) {
  if (k < 1 || !(theta > 0.0 && theta < 1.0))
    throw Error(ErrorKind::InvalidArgument, "interpolation needs k >= 1 and 0 < theta < 1");
  const double ratio = k / theta;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "interpolation needs k/theta to be an integer");
  InterpolationSides sides;
  sides.lhs = std::sqrt(multiplier_sum(u, k));
  sides.rhs = std::pow(mass(u), 0.5 * (1.0 - theta)) * std::pow(multiplier_sum(u, std::round(ratio)), 0.5 * theta);
  return sides;
}

double mass(const Field1D& v) { return v.coeffs().squaredNorm(); }

double dz_norm_sq(const Field1D& v) {
  return (v.coeffs().cwiseAbs2().array() * v.grid().wavenumbers().array().square()).sum();
}

double l4_norm_4(const Field1D& v) { return v.grid().spacing() * v.values().cwiseAbs2().squaredNorm(); }

double h1_norm(const Field1D& v) { return std::sqrt(mass(v) + dz_norm_sq(v)); }

cdouble inner_product(const Field1D& a, const Field1D& b) { return a.coeffs().dot(b.coeffs()); }

Field1D derivative(const Field1D& v) {
  Eigen::VectorXcd c = v.coeffs();
  const auto& xi = v.grid().wavenumbers();
  for (int n = 0; n < c.size(); ++n) c[n] *= cdouble(0.0, xi[n]);
  c[v.grid().nyquist()] = 0.0;
  return Field1D(v.grid_ptr(), std::move(c));
}

std::array<cdouble, 3> evaluate_with_derivatives(const Field1D& v, double z) {
  const auto& grid = v.grid();
  const auto& xi = grid.wavenumbers();
  const double scale = 1.0 / std::sqrt(2.0 * grid.half_length());
  std::array<cdouble, 3> out{0.0, 0.0, 0.0};
  for (int n = 0; n < xi.size(); ++n) {
    cdouble term = v.coeffs()[n] * std::polar(scale, xi[n] * z);
    if (n == grid.nyquist()) {
      // Real interpolant of the Nyquist mode: cos(ξ z).
      term = v.coeffs()[n] * scale * std::cos(xi[n] * z);
      out[0] += term;
      out[2] -= xi[n] * xi[n] * term;
      continue;
    }
    out[0] += term;
    out[1] += cdouble(0.0, xi[n]) * term;
    out[2] -= xi[n] * xi[n] * term;
  }
  return out;
}

std::vector<SpectralField3D> standard_corpus(BasisPtr basis, GridPtr grid, int count, std::uint64_t seed) {
  std::vector<SpectralField3D> corpus;
  corpus.reserve(count + 3);
  Rng rng(seed);
  const int modes = basis->mode_count();
  const double half = grid->half_length();
  const auto& z = grid->nodes();
  for (int f = 0; f < count; ++f) {
    const int active = 1 + static_cast<int>(rng.uniform() * std::min(modes, 6));
    const bool complex_field = rng.uniform() < 0.5;
    const double amplitude = rng.uniform(0.2, 3.0);
    CMatrix coeffs = CMatrix::Zero(modes, grid->point_count());
    for (int k = 0; k < std::min(active, modes); ++k) {
      Eigen::VectorXcd line = Eigen::VectorXcd::Zero(grid->point_count());
      for (int b = 0; b < 3; ++b) {
        const double center = rng.uniform(-half / 3.0, half / 3.0);
        const double width = rng.uniform(0.5, 2.5);
        const double wave = complex_field ? rng.uniform(-2.0, 2.0) : 0.0;
        const cdouble amp(rng.normal(), complex_field ? rng.normal() : 0.0);
        for (int j = 0; j < z.size(); ++j) {
          const double d = (z[j] - center) / width;
          line[j] += amp * std::exp(-0.5 * d * d) * std::polar(1.0, wave * z[j]);
        }
      }
      grid->forward(line.data(), 1);
      coeffs.row(k) = amplitude * std::pow(0.5, k) * line.transpose();
    }
    corpus.emplace_back(basis, grid, std::move(coeffs), !complex_field);
  }
  for (double m : {4.0 * kPi, 8.0 * kPi, 16.0 * kPi}) {
    const double mu = m * m / (64.0 * kPi * kPi);
    Eigen::VectorXcd profile(grid->point_count());
    for (int j = 0; j < z.size(); ++j) profile[j] = std::sqrt(4.0 * kPi * mu) / std::cosh(std::sqrt(mu) * z[j]);
    SpectralField3D field = embed_1d(basis, Field1D::from_values(grid, profile));
    field.set_real_valued(true);
    corpus.push_back(std::move(field));
  }
  return corpus;
}

}  // namespace nlsred
