#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsred/minimizer.hpp"

namespace nlsred {

/// Real axial subspaces. Even: 1, cos(ξ_n z) up to and including the Nyquist
/// mode. Odd: sin(ξ_n z) for 0 < n < N/2. Full: even followed by odd.
enum class Sector { Even, Odd, Full };

const char* sector_name(Sector sector);
Sector parse_sector(const std::string& name);

/// Grid values of the orthonormal real sector basis, N × dim, orthonormal in
/// the trapezoid inner product dz Σ_j.
Eigen::MatrixXd sector_basis(const AxialGrid& grid, Sector sector);
/// ξ_n² for each sector basis function.
Eigen::VectorXd sector_symbol(const AxialGrid& grid, Sector sector);

/// Coordinates of a real function of z (grid values) in the sector basis.
Eigen::VectorXd sector_coordinates(const AxialGrid& grid, Sector sector, const Eigen::VectorXd& values);
Eigen::VectorXd sector_coordinates(const Field1D& v, Sector sector);
/// Coordinates of Re u, ordered (k, a) -> k * dim + a.
Eigen::VectorXd sector_coordinates(const SpectralField3D& u, Sector sector);

/// Dense symmetric matrix of a linearized operator in a real sector basis.
struct LinearOperatorMatrix {
  Sector sector = Sector::Even;
  int transverse_modes = 1;   // 1 for the 1D operator
  Eigen::MatrixXd matrix;
  Eigen::VectorXd axial_symbol;  // ξ² per axial basis function
  double omega = 0.0;  // 0 for the 1D operator
  double mu = 0.0;
  std::string source;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  int axial_dimension() const { return static_cast<int>(axial_symbol.size()); }
};

/// -∂² + μ - (3/2π)Q² on one sector. Throws Error(InvalidArgument) when the
/// peak of Q is more than one grid spacing away from z = 0.
LinearOperatorMatrix assemble_L1d(const Field1D& q, double mu, Sector sector);

/// ω(H_y-2) - ∂² + μ_ω - 3Q_ω² over (transverse mode) × (axial sector). The
/// potential is integrated with the transverse quadrature and the axial
/// trapezoid rule. Throws Error(ShapeMismatch) if the assembled matrix is not
/// symmetric to 1e-10 relative.
LinearOperatorMatrix assemble_L3d(const GroundStateRecord& rec, Sector sector);

/// Ascending eigenvalues.
Eigen::VectorXd eigenvalues(const LinearOperatorMatrix& op);

struct CoercivityResult {
  double min_eig_orthogonal = 0.0;
  /// Largest C with ⟨Lφ, φ⟩ ≥ C‖φ‖² on the complement of q (equals the
  /// deflated minimum eigenvalue).
  double c_l_estimate = 0.0;
};

/// Smallest eigenvalue of L restricted to the orthogonal complement of q
/// (Householder deflation). Throws Error(ShapeMismatch) if q has the wrong
/// length and Error(InvalidArgument) if it is zero.
CoercivityResult coercivity_check(const LinearOperatorMatrix& op, const Eigen::VectorXd& q);

/// min |eig| of D^{-1/2} L D^{-1/2} with D = 1 + ξ², the discrete H¹ → H⁻¹
/// lower bound.
double nondegeneracy_estimate_1d(const LinearOperatorMatrix& op);

/// L_ω φ for the record's state, matrix-free in spectral space.
SpectralField3D apply_linearized(const GroundStateRecord& rec, const SpectralField3D& phi);

struct UniquenessResult {
  int starts = 0;
  int survivors = 0;
  std::vector<std::string> failures;
  double max_distance = 0.0;   // pairwise Σ-equivalent distance
  double max_i_spread = 0.0;   // max |I_i - I_j| / |I|
  std::vector<GroundStateRecord> records;
};

/// I_ω(u) = E_ω(u) + (μ/2)M(u).
double i_functional(const SpectralField3D& u, double omega, double mu);

/// Random admissible start: Φ_0 ⊗ (a sech(b(z - c))) plus small transverse
/// noise in modes 1-3, scaled to mass m.
SpectralField3D random_start(BasisPtr basis, GridPtr grid, double mass, Rng& rng);

/// Minimize from n_starts random starts and compare the centred results.
UniquenessResult uniqueness_experiment(double omega, double mass, int n_starts, std::uint64_t seed, BasisPtr basis,
                                       GridPtr grid, const FlowSettings& flow = {});

}  // namespace nlsred
