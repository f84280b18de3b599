#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsred/dynamics.hpp"
#include "nlsred/linearized.hpp"

namespace nlsred {

/// Every free parameter of a run. Serialized as key = value lines under
/// [problem], [grid], [flow], [spectrum], [dynamics] and [output]; see
/// to_text for the full key list.
struct RunConfig {
  // [problem]
  double mass = 8.0 * kPi;
  double omega = 256.0;  // single-ω commands
  std::vector<double> omegas{64.0, 128.0, 256.0, 512.0, 1024.0};
  double gn_constant = 4.0;
  std::uint64_t seed = 1;

  // [grid]
  int modes = 24;
  int quad_points = 48;
  int axial_points = 384;
  double half_length = 28.0;

  // [flow]
  double tau = 2e-2;
  double tol_increment = 1e-10;
  double tol_residual = 1e-8;
  int max_iter = 200000;

  // [spectrum] Dense eigenproblems run on their own, coarser grid.
  Sector sector = Sector::Even;
  int spectrum_modes = 8;
  int spectrum_quad_points = 32;
  int spectrum_axial_points = 256;
  double spectrum_half_length = 24.0;

  // [dynamics]
  double dt = 1e-3;
  double t_end = 1.0;
  double epsilon = 1e-3;  // perturbation size for evolve
  int save_every = 0;
  TransverseStep transverse_step = TransverseStep::Cayley;

  // [output]
  std::string out_dir = "out";
  /// Every n-th saved snapshot is written as a state file (0: none).
  int snapshot_stride = 50;

  FlowSettings flow() const;
  EvolveSettings evolve() const;
  BasisPtr basis() const;
  GridPtr grid() const;
  BasisPtr spectrum_basis() const;
  GridPtr spectrum_grid() const;

  /// Throws Error(InvalidArgument) naming the first bad field.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Canonical text form. Doubles use the shortest representation that reads
/// back to the same value, so parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& config);

/// Unknown sections or keys, duplicate keys and malformed values throw
/// Error(InvalidArgument). Missing keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// FNV-1a 64 of to_text(config) as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace nlsred
