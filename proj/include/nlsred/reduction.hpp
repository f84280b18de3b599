#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlsred/minimizer.hpp"

namespace nlsred {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares on (log x, log y). Throws Error(InvalidArgument) for fewer
/// than three points, mismatched lengths or non-positive values.
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// One row per ω. Column order matches the sweep CSV.
struct SweepRow {
  double omega = 0.0;
  double p1_mass = 0.0;          // ‖P_1Q_ω‖_{L²}
  double sigma_y = 0.0;          // ‖Q_ω‖_{Σ̇_y}
  double dz_p1 = 0.0;            // ‖∂_z P_1Q_ω‖_{L²}
  double h1_parallel_err = 0.0;  // ‖Q_{ω,∥} - Q_∞‖_{H¹}
  double mu_err = 0.0;           // |μ_ω - μ_∞|
  double energy_err = 0.0;       // |E_ω - E_∞|
  double sigma_total_err = 0.0;  // ‖Q_ω - Q_∞Φ_0‖, Σ-equivalent
  double high_norm_err = 0.0;    // ‖(H_y - ∂_z²)(Q_ω - Q_∞Φ_0)‖
  int iterations = 0;

  static constexpr int kErrorColumns = 7;
  std::array<double, kErrorColumns> errors() const {
    return {p1_mass, sigma_y, dz_p1, h1_parallel_err, mu_err, energy_err, sigma_total_err};
  }
};

inline const std::array<std::string, SweepRow::kErrorColumns> kSweepColumns = {
    "p1_mass", "sigma_y", "dz_p1", "h1_parallel_err", "mu_err", "energy_err", "sigma_total_err"};

struct SweepResult {
  double mass = 0.0;
  std::vector<SweepRow> rows;
  std::vector<GroundStateRecord> records;
  /// Present only when at least three rows completed.
  std::array<SlopeFit, SweepRow::kErrorColumns> slopes{};
  SlopeFit high_norm_slope;
  bool complete = false;
  std::string failure;
  /// Σ-equivalent distance between the warm-started and a cold-started
  /// minimizer at the largest ω (negative if not run).
  double cold_start_distance = -1.0;
};

/// Minimizes at each ω in ascending order, warm-starting from the previous
/// state. A minimize failure stops the sweep; the rows completed so far are
/// returned with complete = false.
SweepResult sweep(std::vector<double> omegas, double mass, BasisPtr basis, GridPtr grid,
                  const FlowSettings& flow = {}, bool cold_start_check = true);

/// Row of error quantities for a converged record against Q_∞ Φ_0.
SweepRow measure_reduction(const GroundStateRecord& rec);

/// ‖(H_y - ∂_z²)^k (Q_ω - Q_∞Φ_0)‖_{L²}. Requires k/η to be an integer.
double high_norm_convergence(const GroundStateRecord& rec, int k, double eta);

}  // namespace nlsred
