#pragma once

#include <memory>
#include <vector>

#include "nlsred/common.hpp"

namespace nlsred {

/// Radial (zero angular momentum) eigenbasis of the 2D Hermite operator
/// H_y = -Δ_y + |y|². Mode k is φ_k(r) = π^{-1/2} L_k(r²) e^{-r²/2} with
/// eigenvalue Λ_k = 4k + 2. Only the radial sector is represented, so the
/// spectral gap above the ground mode is Λ_1 - 2 = 4 (the full 2D spectrum
/// has Λ_1 = 4; that value only enters as a constant in bounds).
///
/// Quadrature is Gauss-Laguerre in s = r² with the e^{-s} envelope absorbed
/// into the weights, so bilinear products φ_j φ_k are integrated exactly for
/// quad_size >= K. Quartic products are integrated with a geometrically
/// small error that the unit tests bound.
class TransverseBasis {
 public:
  /// Throws Error(Underresolved) when quad_size < 2K or the discrete
  /// orthonormality check fails.
  TransverseBasis(int mode_count, int quad_size);

  int mode_count() const { return mode_count_; }
  int quad_size() const { return static_cast<int>(nodes_.size()); }

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Λ_k - 2, the transverse excitation energy entering ‖·‖_{Σ̇_y}.
  const Eigen::VectorXd& gaps() const { return gaps_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }  // r_q
  const Eigen::VectorXd& weights() const { return weights_; }  // w_q, measure dy on R²
  /// φ_k(r_q), rows q, columns k.
  const RMatrix& mode_values() const { return modes_; }
  /// w_q φ_k(r_q) transposed: rows k, columns q. Applies ⟨·, φ_k⟩_{L²_y}.
  const RMatrix& projector() const { return projector_; }

  /// max_{j,k} |Σ_q w_q φ_j φ_k - δ_jk|.
  double orthonormality_defect() const;

  /// φ_k(r) at arbitrary r, all k < K.
  Eigen::VectorXd evaluate(double r) const;

 private:
  int mode_count_;
  Eigen::VectorXd eigenvalues_, gaps_, nodes_, weights_;
  RMatrix modes_, projector_;
};

using BasisPtr = std::shared_ptr<const TransverseBasis>;

std::shared_ptr<const TransverseBasis> build_transverse_basis(int mode_count, int quad_size);

/// Periodic grid on [-L, L) with N points and the unitary Fourier convention
///
///   c_n = (2L)^{-1/2} ∫ u(z) e^{-i ξ_n z} dz,   u(z) = (2L)^{-1/2} Σ_n c_n e^{i ξ_n z},
///
/// evaluated with the trapezoid rule. Phases are taken about z = 0, so an
/// even real profile has real symmetric coefficients, and Σ|c_n|² equals the
/// grid L² norm exactly.
class AxialGrid {
 public:
  /// Throws Error(InvalidArgument) for odd N, N < 8 or L <= 0.
  AxialGrid(double half_length, int point_count);
  ~AxialGrid();
  AxialGrid(const AxialGrid&) = delete;
  AxialGrid& operator=(const AxialGrid&) = delete;

  double half_length() const { return half_length_; }
  int point_count() const { return point_count_; }
  double spacing() const { return spacing_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  /// ξ_n in FFT order: 0, 1, …, N/2-1, -N/2, …, -1 (times π/L).
  const Eigen::VectorXd& wavenumbers() const { return wavenumbers_; }
  /// Index of the mode with wavenumber -ξ_n.
  int mirror(int n) const { return n == 0 ? 0 : point_count_ - n; }
  int nyquist() const { return point_count_ / 2; }

  /// In-place transforms of `rows` contiguous lines of length N.
  void forward(cdouble* data, int rows) const;  // values -> coefficients
  void inverse(cdouble* data, int rows) const;  // coefficients -> values

  Eigen::VectorXcd forward(const Eigen::VectorXcd& values) const;
  Eigen::VectorXcd inverse(const Eigen::VectorXcd& coeffs) const;

 private:
  double half_length_;
  int point_count_;
  double spacing_;
  Eigen::VectorXd nodes_, wavenumbers_;
  Eigen::VectorXd alternating_;  // (-1)^n, moves the phase origin to z = 0
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

using GridPtr = std::shared_ptr<const AxialGrid>;

std::shared_ptr<const AxialGrid> build_axial_grid(double half_length, int point_count);

}  // namespace nlsred
