#include "nlsred/state_file.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "nlsred/config.hpp"

namespace nlsred {

namespace {

constexpr const char* kMagic = "nlsred-state";
constexpr int kHeaderDigits = 10;

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorKind::Io, "state file: " + why); }

void put_le(std::string& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

std::string header_text(const StateHeader& h, std::size_t header_bytes) {
  char padded[32];
  std::snprintf(padded, sizeof padded, "%0*zu", kHeaderDigits, header_bytes);
  std::ostringstream out;
  out << kMagic << '\n'
      << "version = " << h.version << '\n'
      << "header_bytes = " << padded << '\n'
      << "kind = " << h.kind << '\n'
      << "omega = " << format_double(h.omega) << '\n'
      << "mass = " << format_double(h.mass) << '\n'
      << "mu = " << format_double(h.mu) << '\n'
      << "energy = " << format_double(h.energy) << '\n'
      << "time = " << format_double(h.time) << '\n'
      << "modes = " << h.modes << '\n'
      << "quad_points = " << h.quad_points << '\n'
      << "axial_points = " << h.axial_points << '\n'
      << "half_length = " << format_double(h.half_length) << '\n'
      << "real_payload = " << (h.real_payload ? 1 : 0) << '\n'
      << "real_valued = " << (h.real_valued ? 1 : 0) << '\n'
      << "end\n";
  return out.str();
}

double number(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) malformed("missing header key " + key);
  const std::string& text = it->second;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) malformed("bad value for " + key);
  return v;
}

}  // namespace

std::string serialize_state(StateHeader header, const SpectralField3D& field) {
  const CMatrix& c = field.coeffs();
  header.modes = static_cast<int>(c.rows());
  header.quad_points = field.basis().quad_size();
  header.axial_points = static_cast<int>(c.cols());
  header.half_length = field.grid().half_length();
  // Bitwise +0 only, so that -0.0 survives the round trip.
  header.real_payload = true;
  for (Eigen::Index i = 0; i < c.size() && header.real_payload; ++i)
    header.real_payload = std::bit_cast<std::uint64_t>(c.data()[i].imag()) == 0;
  header.real_valued = field.real_valued();

  // The recorded length has a fixed number of digits, so measuring once with
  // a zero placeholder gives the final length.
  const std::size_t length = header_text(header, 0).size();
  std::string out = header_text(header, length);
  out.reserve(length + c.size() * (header.real_payload ? 8 : 16));
  for (Eigen::Index k = 0; k < c.rows(); ++k)
    for (Eigen::Index n = 0; n < c.cols(); ++n) {
      put_le(out, c(k, n).real());
      if (!header.real_payload) put_le(out, c(k, n).imag());
    }
  return out;
}

void save_state(const std::string& path, StateHeader header, const SpectralField3D& field) {
  const std::string bytes = serialize_state(std::move(header), field);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write state file " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to state file " + path);
}

StateFile parse_state(const std::string& bytes) {
  const std::string magic = std::string(kMagic) + "\n";
  if (bytes.compare(0, magic.size(), magic) != 0) malformed("not an nlsred state file");
  const auto end = bytes.find("\nend\n");
  if (end == std::string::npos) malformed("header is not terminated");
  const std::size_t header_length = end + 5;

  std::map<std::string, std::string> kv;
  std::istringstream in(bytes.substr(magic.size(), end + 1 - magic.size()));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) malformed("bad header line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }

  StateHeader h;
  h.version = static_cast<int>(number(kv, "version"));
  if (h.version != kStateFileVersion)
    throw Error(ErrorKind::VersionMismatch, "state file version " + std::to_string(h.version) +
                                                " is not supported (expected " +
                                                std::to_string(kStateFileVersion) + ")");
  if (static_cast<std::size_t>(number(kv, "header_bytes")) != header_length)
    malformed("recorded header length does not match");
  h.kind = kv.count("kind") ? kv["kind"] : "";
  h.omega = number(kv, "omega");
  h.mass = number(kv, "mass");
  h.mu = number(kv, "mu");
  h.energy = number(kv, "energy");
  h.time = number(kv, "time");
  h.modes = static_cast<int>(number(kv, "modes"));
  h.quad_points = static_cast<int>(number(kv, "quad_points"));
  h.axial_points = static_cast<int>(number(kv, "axial_points"));
  h.half_length = number(kv, "half_length");
  h.real_payload = number(kv, "real_payload") != 0.0;
  h.real_valued = number(kv, "real_valued") != 0.0;
  if (h.modes < 1 || h.axial_points < 1) malformed("empty discretization");

  const std::size_t per = h.real_payload ? 8 : 16;
  const std::size_t expected = static_cast<std::size_t>(h.modes) * h.axial_points * per;
  if (bytes.size() - header_length != expected)
    malformed("payload has " + std::to_string(bytes.size() - header_length) + " bytes, expected " +
              std::to_string(expected));

  auto basis = build_transverse_basis(h.modes, h.quad_points);
  auto grid = build_axial_grid(h.half_length, h.axial_points);
  CMatrix c(h.modes, h.axial_points);
  const char* p = bytes.data() + header_length;
  for (int k = 0; k < h.modes; ++k)
    for (int n = 0; n < h.axial_points; ++n) {
      const double re = get_le(p);
      const double im = h.real_payload ? 0.0 : get_le(p + 8);
      c(k, n) = cdouble(re, im);
      p += per;
    }
  return {h, SpectralField3D(basis, grid, std::move(c), h.real_valued)};
}

StateFile load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read state file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_state(buf.str());
}

}  // namespace nlsred
