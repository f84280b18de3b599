#include "nlsred/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace nlsred {

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorKind::InvalidArgument, message); }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) bad("config key '" + key + "': not a number: " + text);
  return value;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) bad("config key '" + key + "': not an integer: " + text);
  return value;
}

int parse_int32(const std::string& key, const std::string& text) {
  const std::int64_t v = parse_int(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    bad("config key '" + key + "': out of range: " + text);
  return static_cast<int>(v);
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) bad("config key '" + key + "': not a non-negative integer: " + text);
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) bad("config key '" + key + "': empty list");
  return out;
}

struct Entry {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define NLSRED_DOUBLE(sec, name, field)                                     \
  Entry { sec, name, [](const RunConfig& c) { return format_double(c.field); }, \
          [](RunConfig& c, const std::string& v) { c.field = parse_double(name, v); } }
#define NLSRED_INT(sec, name, field)                                            \
  Entry { sec, name, [](const RunConfig& c) { return std::to_string(c.field); }, \
          [](RunConfig& c, const std::string& v) { c.field = parse_int32(name, v); } }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      NLSRED_DOUBLE("problem", "mass", mass),
      NLSRED_DOUBLE("problem", "omega", omega),
      Entry{"problem", "omegas",
            [](const RunConfig& c) {
              std::string s;
              for (std::size_t i = 0; i < c.omegas.size(); ++i) s += (i ? ", " : "") + format_double(c.omegas[i]);
              return s;
            },
            [](RunConfig& c, const std::string& v) { c.omegas = parse_list("omegas", v); }},
      NLSRED_DOUBLE("problem", "gn_constant", gn_constant),
      Entry{"problem", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
            [](RunConfig& c, const std::string& v) { c.seed = parse_uint("seed", v); }},
      NLSRED_INT("grid", "modes", modes),
      NLSRED_INT("grid", "quad_points", quad_points),
      NLSRED_INT("grid", "axial_points", axial_points),
      NLSRED_DOUBLE("grid", "half_length", half_length),
      NLSRED_DOUBLE("flow", "tau", tau),
      NLSRED_DOUBLE("flow", "tol_increment", tol_increment),
      NLSRED_DOUBLE("flow", "tol_residual", tol_residual),
      NLSRED_INT("flow", "max_iter", max_iter),
      Entry{"spectrum", "sector", [](const RunConfig& c) { return std::string(sector_name(c.sector)); },
            [](RunConfig& c, const std::string& v) { c.sector = parse_sector(v); }},
      NLSRED_INT("spectrum", "modes", spectrum_modes),
      NLSRED_INT("spectrum", "quad_points", spectrum_quad_points),
      NLSRED_INT("spectrum", "axial_points", spectrum_axial_points),
      NLSRED_DOUBLE("spectrum", "half_length", spectrum_half_length),
      NLSRED_DOUBLE("dynamics", "dt", dt),
      NLSRED_DOUBLE("dynamics", "t_end", t_end),
      NLSRED_DOUBLE("dynamics", "epsilon", epsilon),
      NLSRED_INT("dynamics", "save_every", save_every),
      Entry{"dynamics", "transverse_step",
            [](const RunConfig& c) { return transverse_step_name(c.transverse_step); },
            [](RunConfig& c, const std::string& v) { c.transverse_step = parse_transverse_step(v); }},
      Entry{"output", "out_dir", [](const RunConfig& c) { return c.out_dir; },
            [](RunConfig& c, const std::string& v) {
              if (v.empty()) bad("config key 'out_dir': empty");
              c.out_dir = v;
            }},
      NLSRED_INT("output", "snapshot_stride", snapshot_stride),
  };
  return table;
}

#undef NLSRED_DOUBLE
#undef NLSRED_INT

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

FlowSettings RunConfig::flow() const {
  FlowSettings f;
  f.tau = tau;
  f.tol_increment = tol_increment;
  f.tol_residual = tol_residual;
  f.max_iter = max_iter;
  f.gn_constant = gn_constant;
  return f;
}

EvolveSettings RunConfig::evolve() const {
  EvolveSettings e;
  e.dt = dt;
  e.t_end = t_end;
  e.save_every = save_every;
  e.gn_constant = gn_constant;
  e.transverse_step = transverse_step;
  return e;
}

BasisPtr RunConfig::basis() const { return build_transverse_basis(modes, quad_points); }
GridPtr RunConfig::grid() const { return build_axial_grid(half_length, axial_points); }
BasisPtr RunConfig::spectrum_basis() const { return build_transverse_basis(spectrum_modes, spectrum_quad_points); }
GridPtr RunConfig::spectrum_grid() const { return build_axial_grid(spectrum_half_length, spectrum_axial_points); }

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) bad(std::string("config: ") + name + " must be positive");
  };
  positive(mass, "mass");
  positive(omega, "omega");
  for (double w : omegas) positive(w, "omegas entry");
  positive(gn_constant, "gn_constant");
  positive(modes, "grid.modes");
  positive(quad_points, "grid.quad_points");
  positive(axial_points, "grid.axial_points");
  positive(half_length, "grid.half_length");
  positive(tau, "tau");
  positive(tol_increment, "tol_increment");
  positive(tol_residual, "tol_residual");
  positive(max_iter, "max_iter");
  positive(spectrum_modes, "spectrum.modes");
  positive(spectrum_quad_points, "spectrum.quad_points");
  positive(spectrum_axial_points, "spectrum.axial_points");
  positive(spectrum_half_length, "spectrum.half_length");
  positive(dt, "dt");
  positive(t_end, "t_end");
  if (!(epsilon >= 0.0)) bad("config: epsilon must be non-negative");
  if (save_every < 0) bad("config: save_every must be non-negative");
  if (snapshot_stride < 0) bad("config: snapshot_stride must be non-negative");
}

std::string to_text(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& e : entries()) {
    if (section != e.section) {
      if (!section.empty()) out << '\n';
      section = e.section;
      out << '[' << section << "]\n";
    }
    out << e.key << " = " << e.get(config) << '\n';
  }
  return out.str();
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, const Entry*> lookup;
  std::set<std::string> sections;
  for (const auto& e : entries()) {
    lookup[std::string(e.section) + "." + e.key] = &e;
    sections.insert(e.section);
  }

  RunConfig config;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') bad(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) bad(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(where + "expected key = value");
    if (section.empty()) bad(where + "key outside any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = lookup.find(key);
    if (it == lookup.end()) bad(where + "unknown key " + key);
    if (!seen.insert(key).second) bad(where + "duplicate key " + key);
    try {
      it->second->set(config, trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      bad(where + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nlsred
