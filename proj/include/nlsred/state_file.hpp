#pragma once

#include <string>

#include "nlsred/fields.hpp"

namespace nlsred {

inline constexpr int kStateFileVersion = 1;

/// Metadata stored ahead of the coefficient payload.
struct StateHeader {
  int version = kStateFileVersion;
  std::string kind = "ground_state";  // or "snapshot", "initial"
  double omega = 0.0;
  double mass = 0.0;
  double mu = 0.0;
  double energy = 0.0;
  double time = 0.0;
  int modes = 0;
  int quad_points = 0;
  int axial_points = 0;
  double half_length = 0.0;
  /// Payload carries real parts only (every imaginary part is exactly 0).
  bool real_payload = false;
  bool real_valued = false;  // physical values are real
};

struct StateFile {
  StateHeader header;
  SpectralField3D field;
};

/// Layout: a text header of `key = value` lines opened by "nlsred-state" and
/// closed by "end", whose byte length (including the closing newline) is
/// recorded in the zero-padded `header_bytes` line. The payload follows:
/// K·N little-endian float64 values row-major over [k][n], one per entry for
/// a real payload, interleaved (re, im) pairs otherwise.
///
/// The discretization fields and real_payload of `header` are overwritten
/// from `field`.
void save_state(const std::string& path, StateHeader header, const SpectralField3D& field);

/// Throws Error(VersionMismatch) for another format version and Error(Io) for
/// a missing file, a malformed header or a payload of the wrong length.
StateFile load_state(const std::string& path);

/// Same as load_state, on the file contents.
StateFile parse_state(const std::string& bytes);
std::string serialize_state(StateHeader header, const SpectralField3D& field);

}  // namespace nlsred
