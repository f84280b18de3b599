#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "nlsred/config.hpp"
#include "nlsred/reduction.hpp"

namespace nlsred {

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2, kExitNumerical = 3 };

int exit_code_for(ErrorKind kind);
const char* error_kind_name(ErrorKind kind);

/// Upper bounds on the fitted log-log slopes, in sweep column order.
inline constexpr std::array<double, SweepRow::kErrorColumns> kSweepSlopeBounds = {-0.8, -0.8, -0.4, -0.8,
                                                                                  -0.8, -0.8, -0.4};
inline constexpr double kSweepMinRSquared = 0.98;

// Each command writes its artifacts under config.out_dir, prints a short
// summary to stdout and returns an ExitCode. Errors propagate; wrap the call
// in run_guarded to turn them into exit codes and a failure report.

/// ground_state.state and ground_state.json.
int cmd_ground_state(const RunConfig& config);

/// sweep.csv (one row per ω plus a slope row) and sweep.json.
int cmd_sweep(const RunConfig& config);

/// spectrum_<sector>.json. The ground state comes from `state_path` when
/// given, otherwise from the configured ω and m. It is re-minimized on the
/// [spectrum] grid when the discretizations differ.
int cmd_spectrum(const RunConfig& config, const std::optional<std::string>& state_path);

/// trajectory.json, trajectory.csv and snapshots/snap_<index>.state for every
/// snapshot_stride-th save point. Starts from the state (or the configured
/// ground state) perturbed by ε along perturbation_direction(seed).
int cmd_evolve(const RunConfig& config, const std::optional<std::string>& state_path);

/// PASS/FAIL table over the inequality and identity suite; check.json.
int cmd_check(const RunConfig& config);

/// Runs `command`; an Error becomes exit_code_for(kind) and failure.json
/// under out_dir (best effort), anything else exit code 3.
int run_guarded(const RunConfig& config, const std::string& name, const std::function<int()>& command);

/// Truncates or pads the transverse modes and resamples the axial lines by
/// trigonometric interpolation (zero outside the source domain).
SpectralField3D resample(const SpectralField3D& u, BasisPtr basis, GridPtr grid);

}  // namespace nlsred
