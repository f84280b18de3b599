#pragma once

#include <array>
#include <optional>

#include "nlsred/fields.hpp"

namespace nlsred {

struct FlowSettings {
  double tau = 2e-2;
  double tol_increment = 1e-10;  // on ‖Δc‖ / τ
  double tol_residual = 1e-8;    // EL residual relative to ‖Q³‖
  int max_iter = 200000;
  double gn_constant = 4.0;
  /// Relative slack allowed for a per-step energy increase.
  double energy_slack = 1e-12;
};

/// Converged constrained minimizer of E_ω at mass m.
struct GroundStateRecord {
  double omega = 0.0;
  double mass = 0.0;
  SpectralField3D state;
  double mu = 0.0;        // from the EL pairing on the final state
  double flow_mu = 0.0;   // last multiplier used inside the flow
  double energy = 0.0;
  double residual_el = 0.0;
  double residual_scale = 0.0;  // ‖Q³‖, the natural size of each EL term
  double sigma_y_sq = 0.0;
  std::array<double, 2> pohozaev{0.0, 0.0};
  int iterations = 0;
  /// Largest relative per-step energy increase seen along the flow (0 if
  /// the energy never increased).
  double max_energy_rise = 0.0;
};

/// Normalized gradient flow: (1 + τA)c⁺ = c + τ(N(c) - μ(c)c) with
/// A = ω(Λ_k - 2) + ξ², followed by mass renormalization. The fixed points
/// are exactly the solutions of the discrete EL equation.
///
/// Starts from Φ_0 ⊗ Q_∞ unless `init` is given. Throws
/// Error(ConstraintBreach) if ‖u‖²_{Σ̇_y} exceeds √ω during the flow and
/// Error(NonConvergence) after max_iter steps.
GroundStateRecord minimize(double omega, double mass, BasisPtr basis, GridPtr grid, const FlowSettings& settings = {},
                           const std::optional<SpectralField3D>& init = std::nullopt);

/// (‖Q‖⁴_{L⁴} - ω‖Q‖²_{Σ̇_y} - ‖∂_zQ‖²) / m.
double lagrange_multiplier(const SpectralField3D& q, double omega, double mass);

/// ‖ω(H_y-2)Q - ∂_z²Q - |Q|²Q + μQ‖_{L²}.
double el_residual(const SpectralField3D& q, double omega, double mu);

/// Mass pairing and dilation pairing of the EL equation.
std::array<double, 2> pohozaev_residuals(const SpectralField3D& q, double mu, double omega);

/// E_ω - (-μm/6 + (ω/3)‖Q‖²_{Σ̇_y}).
double energy_identity_check(const GroundStateRecord& rec);

/// C⁴m².
double admissibility_threshold(double mass, double gn_constant = 4.0);

/// C²m³/(2ω).
double forbidden_region_bound(double mass, double omega, double gn_constant = 4.0);

/// Shift the z-peak of u_∥ to the origin, fix the global phase so u_∥(0) > 0
/// and project onto real coefficients even in z.
SpectralField3D center_even_real(const SpectralField3D& u);

}  // namespace nlsred
