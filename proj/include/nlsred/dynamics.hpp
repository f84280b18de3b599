#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsred/minimizer.hpp"

namespace nlsred {

/// Transverse factor of the linear step. `Exact` applies e^{-iΔtω(Λ_k-2)}.
/// `Cayley` applies (1 - iΔtω(Λ_k-2)/2)/(1 + iΔtω(Λ_k-2)/2), which is also
/// unitary and second order but keeps the standing wave a fixed point of the
/// discrete step for every ωΔt. The exact factor biases the P_1 response by
/// (θ/2)cot(θ/2), θ = 4kωΔt, which resonates at θ = 2π.
enum class TransverseStep { Exact, Cayley };

std::string transverse_step_name(TransverseStep step);
TransverseStep parse_transverse_step(const std::string& name);

struct EvolveSettings {
  double dt = 1e-3;
  double t_end = 1.0;
  /// Steps between saved snapshots; 0 picks the smallest interval that keeps
  /// at most 500 snapshots.
  int save_every = 0;
  /// Drops the cubic term (test hook for the exact linear propagator).
  bool linear_only = false;
  bool keep_snapshots = true;
  double gn_constant = 4.0;
  TransverseStep transverse_step = TransverseStep::Cayley;
};

/// Saved states and per-snapshot diagnostics of one run.
struct Trajectory {
  double omega = 0.0;  // 0 for the 1D equation
  std::vector<double> times;
  std::vector<SpectralField3D> snapshots;
  std::vector<Field1D> snapshots_1d;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> sigma_series;      // ‖u‖²_{Σ̇_y}
  std::vector<double> p1_mass_series;    // ‖P_1u‖²
  std::vector<double> virial_series;
  std::vector<double> orbital_distance;  // filled when a reference is given
  std::vector<double> parallel_sup;      // ‖u_∥(t)‖_{L^∞_z} (‖v‖_∞ in 1D)
  bool blow_up = false;
  double last_valid_time = 0.0;

  /// max_t |M(t) - M(0)| / M(0).
  double mass_drift() const;
  /// max_t |E(t) - E(0)| / |E(0)|.
  double energy_drift() const;
};

/// Strang splitting for i u_t = (ω(H_y-2) - ∂_z²)u - |u|²u: half nonlinear
/// phase on the physical grid, diagonal linear step (see TransverseStep), half nonlinear
/// phase. Stops with blow_up = true at the first non-finite state. Warns when
/// E_ω(u0) ≥ 0 or ‖u0‖²_{Σ̇_y} > √ω. With `reference`, the orbital distance
/// to it is recorded at each save point.
Trajectory evolve_3d(const SpectralField3D& u0, double omega, const EvolveSettings& settings,
                     const std::optional<SpectralField3D>& reference = std::nullopt);

/// The same scheme for i v_t = -v'' - (1/2π)|v|²v.
Trajectory evolve_1d(const Field1D& v0, const EvolveSettings& settings);

/// Σ-equivalent distance from u to the orbit {e^{iθ}Q(· - s)}. The shift is
/// located on the grid by cross-correlation and refined by Newton's method,
/// the phase is the closed-form L² optimum.
double orbital_distance(const SpectralField3D& u, const SpectralField3D& q);

/// 24E_ω - 4ω‖u‖²_{Σ̇_y} - 4‖∂_zu‖² + 16ωM.
double virial_second_derivative(const SpectralField3D& u, double omega);

struct StabilityResult {
  double perturbation = 0.0;     // ‖u0 - Q_ω‖_{L²}
  double initial_distance = 0.0;
  double max_distance = 0.0;
  double max_sigma = 0.0;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  bool blow_up = false;
};

/// Even, real, unit-L² perturbation direction in transverse modes 0-3.
SpectralField3D perturbation_direction(BasisPtr basis, GridPtr grid, std::uint64_t seed);

/// Evolves Q_ω + δη (renormalized to the mass of Q_ω) and records the orbital
/// distance to Q_ω. Snapshots are not kept.
StabilityResult stability_experiment(const GroundStateRecord& rec, double delta, const EvolveSettings& settings,
                                     std::uint64_t seed);

struct CauchyResult {
  double omega = 0.0;
  std::vector<double> times;
  std::vector<double> error;  // ‖u_ω(t) - v_ω(t)Φ_0‖_{L²}
  double c1 = 0.0;            // e^{intercept}·√ω from the affine log fit
  double c2 = 0.0;            // growth rate of the affine log fit
  double fit_max_residual = 0.0;
  /// ‖u_∥‖_{L⁴_t L^∞_z} over the run.
  double parallel_l4_linf = 0.0;
  double error_at(double t) const;
};

/// Co-evolves the 3D equation from u0 and the 1D equation from u0's parallel
/// component, then fits log(error) ≈ log(C_1/√ω) + C_2 t over t ≥ fit_start.
CauchyResult cauchy_reduction_error(const SpectralField3D& u0, double omega, const EvolveSettings& settings,
                                    double fit_start = 0.1);

}  // namespace nlsred
