#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "nlsred/spectral_basis.hpp"

namespace nlsred {

/// u(y, z) = Σ_{k,n} c_{k,n} φ_k(|y|) e_n(z) over the radial transverse
/// basis and the axial Fourier modes. Coefficients are complex, K × N.
/// `real_valued` marks fields whose physical values are real (ground states).
class SpectralField3D {
 public:
  /// Empty placeholder without a discretization; assign before use.
  SpectralField3D() = default;
  SpectralField3D(BasisPtr basis, GridPtr grid);
  SpectralField3D(BasisPtr basis, GridPtr grid, CMatrix coeffs, bool real_valued = false);

  const TransverseBasis& basis() const { return *basis_; }
  const AxialGrid& grid() const { return *grid_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const GridPtr& grid_ptr() const { return grid_; }

  const CMatrix& coeffs() const { return coeffs_; }
  CMatrix& coeffs() { return coeffs_; }
  bool real_valued() const { return real_valued_; }
  void set_real_valued(bool flag) { real_valued_ = flag; }

  bool same_discretization(const SpectralField3D& other) const;

  SpectralField3D& operator+=(const SpectralField3D& other);
  SpectralField3D& operator-=(const SpectralField3D& other);
  SpectralField3D& operator*=(cdouble scale);

 private:
  BasisPtr basis_;
  GridPtr grid_;
  CMatrix coeffs_;
  bool real_valued_ = false;
};

SpectralField3D operator+(SpectralField3D a, const SpectralField3D& b);
SpectralField3D operator-(SpectralField3D a, const SpectralField3D& b);
SpectralField3D operator*(cdouble s, SpectralField3D a);

/// A function of z alone: v(t), Q_∞, u_∥, r_ω.
class Field1D {
 public:
  explicit Field1D(GridPtr grid);
  Field1D(GridPtr grid, Eigen::VectorXcd coeffs);
  static Field1D from_values(GridPtr grid, const Eigen::VectorXcd& values);

  const AxialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }
  Eigen::VectorXcd values() const;

 private:
  GridPtr grid_;
  Eigen::VectorXcd coeffs_;
};

// Transforms between coefficients and the physical grid (quad nodes × axial nodes).
CMatrix to_physical(const SpectralField3D& u);
SpectralField3D to_spectral(BasisPtr basis, GridPtr grid, const CMatrix& values);

/// Spectral coefficients of |u|²u (the L²-projection of the cubic term).
CMatrix cubic_term(const SpectralField3D& u);
CMatrix cubic_term(const SpectralField3D& u, const CMatrix& physical);

// Functionals. All L² quantities use the physical measure dy dz.
double mass(const SpectralField3D& u);
double sigma_y_norm_sq(const SpectralField3D& u);
double dz_norm_sq(const SpectralField3D& u);
double l4_norm_4(const SpectralField3D& u);
double l4_norm_4(const SpectralField3D& u, const CMatrix& physical);
double energy(const SpectralField3D& u, double omega);
/// Ẽ_ω = E_ω + ω M, the energy before the mass shift.
double unshifted_energy(const SpectralField3D& u, double omega);
cdouble inner_product(const SpectralField3D& a, const SpectralField3D& b);

/// ‖u‖_{Σ̇_y} + ‖∂_z u‖ + ‖u‖, equivalent to the weighted energy norm ‖u‖_Σ.
double sigma_norm(const SpectralField3D& u);

SpectralField3D project_p0(const SpectralField3D& u);
SpectralField3D project_p1(const SpectralField3D& u);
/// u_∥(z) = ⟨u(·, z), Φ_0⟩.
Field1D parallel_component(const SpectralField3D& u);
/// Φ_0(y) v(z).
SpectralField3D embed_1d(BasisPtr basis, const Field1D& v);

/// Translate in z by `shift` (u(z - shift)), exact for band-limited fields.
SpectralField3D shift_z(const SpectralField3D& u, double shift);
Field1D shift_z(const Field1D& v, double shift);

/// ‖u‖⁴_{L⁴} over the anisotropic Gagliardo-Nirenberg right-hand side.
/// Throws Error(Vacuous) when that right-hand side vanishes.
double gn_ratio(const SpectralField3D& u);

struct InterpolationSides {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs * (1.0 + 1e-10); }
};

/// Both sides of ‖(H_y-∂²)^k u‖ ≤ ‖u‖^{1-θ}‖(H_y-∂²)^{k/θ} u‖^θ as diagonal
/// spectral multipliers. Requires 0 < θ < 1 with k/θ an integer.
InterpolationSides interpolation_check(const SpectralField3D& u, int k, double theta);

/// ‖(H_y - ∂_z²)^p u‖ for real p >= 0.
double hermite_sobolev_norm(const SpectralField3D& u, double power);

// 1D functionals.
double mass(const Field1D& v);
double dz_norm_sq(const Field1D& v);
double l4_norm_4(const Field1D& v);
double h1_norm(const Field1D& v);
cdouble inner_product(const Field1D& a, const Field1D& b);
Field1D derivative(const Field1D& v);
/// Values of v and its first two derivatives at an arbitrary z (trigonometric
/// interpolation).
std::array<cdouble, 3> evaluate_with_derivatives(const Field1D& v, double z);

/// Fixed-seed corpus of smooth localized fields plus solitons Φ_0 ⊗ Q_∞ for
/// a few masses. The first `count` entries are random.
std::vector<SpectralField3D> standard_corpus(BasisPtr basis, GridPtr grid, int count,
                                             std::uint64_t seed);

}  // namespace nlsred
