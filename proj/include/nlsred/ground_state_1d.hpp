#pragma once

#include <optional>

#include "nlsred/fields.hpp"

namespace nlsred {

/// Ground state of E_∞(w) = ½‖w'‖² - (1/8π)‖w‖⁴_{L⁴} at fixed mass m.
struct Soliton1D {
  double mass = 0.0;
  double mu = 0.0;      // μ_∞ = m² / (64π²)
  double energy = 0.0;  // E_∞ evaluated on the grid
  double boundary_tail = 0.0;  // sech(√μ L), the relative profile height at ±L
  Field1D profile;
};

/// μ_∞(m) for -Q'' - (1/2π)Q³ = -μQ with ‖Q‖² = m.
double soliton_multiplier(double mass);

/// Closed form Q_∞(z) = sqrt(4πμ) sech(√μ z). Warns when the boundary tail
/// exceeds 1e-7 and throws Error(Underresolved) above 1e-4.
Soliton1D soliton(double mass, GridPtr grid);

double energy_1d(const Field1D& v);

/// ‖-Q'' - (1/2π)Q³ + μQ‖_{L²}.
double el_residual_1d(const Field1D& q, double mu);

/// Spectral coefficients of (1/2π)|v|²v.
Eigen::VectorXcd cubic_term_1d(const Field1D& v);

struct Flow1DSettings {
  double tau = 1e-2;
  double tol = 1e-10;  // on ‖Δc‖/τ per step
  int max_iter = 500000;
};

struct GroundState1D {
  double mass = 0.0;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  Field1D profile;
};

/// Normalized gradient flow on E_∞ (backward Euler in -∂², explicit cubic
/// term and multiplier, mass renormalized every step). Starts from a Gaussian
/// of mass m unless `init` is given. The result is centered with its peak at
/// z = 0 and made real and positive.
GroundState1D solve_1d_ground_state(double mass, GridPtr grid, const Flow1DSettings& settings = {},
                                    const std::optional<Field1D>& init = std::nullopt);

/// Location of the maximum of |v|, refined to sub-grid accuracy.
double peak_position(const Field1D& v);

/// Shift the peak to z = 0, remove the global phase and project onto real
/// even coefficients.
Field1D center_even_real(const Field1D& v);

}  // namespace nlsred
