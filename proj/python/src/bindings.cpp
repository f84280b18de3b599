// Python bindings for the nlsred core.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlsred/commands.hpp"
#include "nlsred/ground_state_1d.hpp"
#include "nlsred/state_file.hpp"

namespace py = pybind11;
using namespace nlsred;

namespace {

py::dict slope_dict(const SlopeFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["r_squared"] = f.r_squared;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solvers for the cubic NLS with strong two-dimensional harmonic confinement";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(error_kind_name(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("set_quiet", &set_quiet, py::arg("quiet"));

  py::class_<TransverseBasis, std::shared_ptr<TransverseBasis>>(m, "TransverseBasis")
      .def_property_readonly("mode_count", &TransverseBasis::mode_count)
      .def_property_readonly("quad_size", &TransverseBasis::quad_size)
      .def_property_readonly("gaps", &TransverseBasis::gaps)
      .def("orthonormality_defect", &TransverseBasis::orthonormality_defect)
      .def("evaluate", &TransverseBasis::evaluate, py::arg("r"));
  py::class_<AxialGrid, std::shared_ptr<AxialGrid>>(m, "AxialGrid")
      .def_property_readonly("half_length", &AxialGrid::half_length)
      .def_property_readonly("point_count", &AxialGrid::point_count)
      .def_property_readonly("spacing", &AxialGrid::spacing)
      .def_property_readonly("nodes", &AxialGrid::nodes)
      .def_property_readonly("wavenumbers", &AxialGrid::wavenumbers);

  m.def(
      "transverse_basis",
      [](int modes, int quad) { return std::const_pointer_cast<TransverseBasis>(build_transverse_basis(modes, quad)); },
      py::arg("modes") = 24, py::arg("quad_points") = 48);
  m.def(
      "axial_grid",
      [](double half_length, int points) { return std::const_pointer_cast<AxialGrid>(build_axial_grid(half_length, points)); },
      py::arg("half_length") = 28.0, py::arg("points") = 384);

  py::class_<Field1D>(m, "Field1D")
      .def_property_readonly("coeffs", [](const Field1D& v) { return v.coeffs(); })
      .def_property_readonly("values", &Field1D::values)
      .def("mass", [](const Field1D& v) { return mass(v); });

  py::class_<SpectralField3D>(m, "SpectralField3D")
      .def(py::init([](std::shared_ptr<TransverseBasis> basis, std::shared_ptr<AxialGrid> grid, const CMatrix& coeffs) {
             if (coeffs.rows() != basis->mode_count() || coeffs.cols() != grid->point_count())
               throw Error(ErrorKind::ShapeMismatch, "coefficient array must be modes x axial points");
             return SpectralField3D(basis, grid, coeffs);
           }),
           py::arg("basis"), py::arg("grid"), py::arg("coeffs"))
      .def_property_readonly("coeffs", [](const SpectralField3D& u) { return u.coeffs(); })
      .def("physical", &to_physical)
      .def("mass", [](const SpectralField3D& u) { return mass(u); })
      .def("energy", [](const SpectralField3D& u, double omega) { return energy(u, omega); }, py::arg("omega"))
      .def("sigma_y_norm_sq", &sigma_y_norm_sq)
      .def("dz_norm_sq", [](const SpectralField3D& u) { return dz_norm_sq(u); })
      .def("l4_norm_4", [](const SpectralField3D& u) { return l4_norm_4(u); })
      .def("sigma_norm", &sigma_norm)
      .def("gn_ratio", &gn_ratio)
      .def("parallel_component", &parallel_component)
      .def("shift_z", [](const SpectralField3D& u, double s) { return shift_z(u, s); }, py::arg("shift"))
      .def("__add__", [](const SpectralField3D& a, const SpectralField3D& b) { return a + b; })
      .def("__sub__", [](const SpectralField3D& a, const SpectralField3D& b) { return a - b; })
      .def("__mul__", [](const SpectralField3D& a, cdouble s) { return s * a; })
      .def("__rmul__", [](const SpectralField3D& a, cdouble s) { return s * a; });
  m.def("embed_1d", [](std::shared_ptr<TransverseBasis> basis, const Field1D& v) { return embed_1d(basis, v); });
  m.def("orbital_distance", &orbital_distance, py::arg("u"), py::arg("q"));

  py::class_<Soliton1D>(m, "Soliton1D")
      .def_readonly("mass", &Soliton1D::mass)
      .def_readonly("mu", &Soliton1D::mu)
      .def_readonly("energy", &Soliton1D::energy)
      .def_readonly("boundary_tail", &Soliton1D::boundary_tail)
      .def_readonly("profile", &Soliton1D::profile);
  m.def(
      "soliton", [](double m_, std::shared_ptr<AxialGrid> grid) { return soliton(m_, grid); }, py::arg("mass"),
      py::arg("grid"));

  py::class_<GroundState1D>(m, "GroundState1D")
      .def_readonly("mass", &GroundState1D::mass)
      .def_readonly("mu", &GroundState1D::mu)
      .def_readonly("energy", &GroundState1D::energy)
      .def_readonly("residual", &GroundState1D::residual)
      .def_readonly("iterations", &GroundState1D::iterations)
      .def_readonly("profile", &GroundState1D::profile);
  m.def(
      "solve_1d_ground_state", [](double m_, std::shared_ptr<AxialGrid> grid) { return solve_1d_ground_state(m_, grid); },
      py::arg("mass"), py::arg("grid"));

  py::class_<FlowSettings>(m, "FlowSettings")
      .def(py::init<>())
      .def_readwrite("tau", &FlowSettings::tau)
      .def_readwrite("tol_increment", &FlowSettings::tol_increment)
      .def_readwrite("tol_residual", &FlowSettings::tol_residual)
      .def_readwrite("max_iter", &FlowSettings::max_iter)
      .def_readwrite("gn_constant", &FlowSettings::gn_constant);

  py::class_<GroundStateRecord>(m, "GroundStateRecord")
      .def_readonly("omega", &GroundStateRecord::omega)
      .def_readonly("mass", &GroundStateRecord::mass)
      .def_readonly("state", &GroundStateRecord::state)
      .def_readonly("mu", &GroundStateRecord::mu)
      .def_readonly("energy", &GroundStateRecord::energy)
      .def_readonly("residual_el", &GroundStateRecord::residual_el)
      .def_readonly("residual_scale", &GroundStateRecord::residual_scale)
      .def_readonly("sigma_y_sq", &GroundStateRecord::sigma_y_sq)
      .def_readonly("pohozaev", &GroundStateRecord::pohozaev)
      .def_readonly("iterations", &GroundStateRecord::iterations);
  m.def(
      "minimize",
      [](double omega, double m_, std::shared_ptr<TransverseBasis> basis, std::shared_ptr<AxialGrid> grid,
         const FlowSettings& flow, std::optional<SpectralField3D> init) {
        py::gil_scoped_release release;
        return minimize(omega, m_, basis, grid, flow, init);
      },
      py::arg("omega"), py::arg("mass"), py::arg("basis"), py::arg("grid"), py::arg("flow") = FlowSettings{},
      py::arg("init") = py::none());
  m.def("energy_identity_check", &energy_identity_check);
  m.def("forbidden_region_bound", &forbidden_region_bound, py::arg("mass"), py::arg("omega"),
        py::arg("gn_constant") = 4.0);
  m.def("admissibility_threshold", &admissibility_threshold, py::arg("mass"), py::arg("gn_constant") = 4.0);

  m.def(
      "sweep",
      [](std::vector<double> omegas, double m_, std::shared_ptr<TransverseBasis> basis,
         std::shared_ptr<AxialGrid> grid) {
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = sweep(std::move(omegas), m_, basis, grid);
        }
        py::dict out;
        py::list rows;
        for (const auto& r : res.rows) {
          py::dict d;
          d["omega"] = r.omega;
          const auto errors = r.errors();
          for (int c = 0; c < SweepRow::kErrorColumns; ++c) d[py::str(kSweepColumns[c])] = errors[c];
          d["iterations"] = r.iterations;
          rows.append(d);
        }
        out["rows"] = rows;
        out["complete"] = res.complete;
        out["failure"] = res.failure;
        py::dict slopes;
        if (res.rows.size() >= 3)
          for (int c = 0; c < SweepRow::kErrorColumns; ++c) slopes[py::str(kSweepColumns[c])] = slope_dict(res.slopes[c]);
        out["slopes"] = slopes;
        out["cold_start_distance"] = res.cold_start_distance;
        return out;
      },
      py::arg("omegas"), py::arg("mass"), py::arg("basis"), py::arg("grid"));
  m.def("fit_slope", [](const std::vector<double>& x, const std::vector<double>& y) { return slope_dict(fit_slope(x, y)); });

  m.def(
      "spectrum",
      [](const GroundStateRecord& rec, const std::string& sector) {
        const auto op = assemble_L3d(rec, parse_sector(sector));
        Eigen::VectorXd ev = eigenvalues(op);
        py::dict out;
        out["eigenvalues"] = ev;
        if (op.sector == Sector::Even)
          out["deflated_min"] = coercivity_check(op, sector_coordinates(rec.state, Sector::Even)).min_eig_orthogonal;
        return out;
      },
      py::arg("record"), py::arg("sector") = "even");

  py::enum_<TransverseStep>(m, "TransverseStep")
      .value("Exact", TransverseStep::Exact)
      .value("Cayley", TransverseStep::Cayley);
  py::class_<EvolveSettings>(m, "EvolveSettings")
      .def(py::init<>())
      .def_readwrite("dt", &EvolveSettings::dt)
      .def_readwrite("t_end", &EvolveSettings::t_end)
      .def_readwrite("save_every", &EvolveSettings::save_every)
      .def_readwrite("linear_only", &EvolveSettings::linear_only)
      .def_readwrite("keep_snapshots", &EvolveSettings::keep_snapshots)
      .def_readwrite("transverse_step", &EvolveSettings::transverse_step);
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("snapshots_1d", &Trajectory::snapshots_1d)
      .def_readonly("mass", &Trajectory::mass_series)
      .def_readonly("energy", &Trajectory::energy_series)
      .def_readonly("sigma", &Trajectory::sigma_series)
      .def_readonly("p1_mass", &Trajectory::p1_mass_series)
      .def_readonly("virial", &Trajectory::virial_series)
      .def_readonly("orbital_distance", &Trajectory::orbital_distance)
      .def_readonly("blow_up", &Trajectory::blow_up)
      .def("mass_drift", &Trajectory::mass_drift)
      .def("energy_drift", &Trajectory::energy_drift);
  m.def(
      "evolve_3d",
      [](const SpectralField3D& u0, double omega, const EvolveSettings& s, std::optional<SpectralField3D> ref) {
        py::gil_scoped_release release;
        return evolve_3d(u0, omega, s, ref);
      },
      py::arg("u0"), py::arg("omega"), py::arg("settings") = EvolveSettings{}, py::arg("reference") = py::none());
  m.def(
      "evolve_1d",
      [](const Field1D& v0, const EvolveSettings& s) {
        py::gil_scoped_release release;
        return evolve_1d(v0, s);
      },
      py::arg("v0"), py::arg("settings") = EvolveSettings{});
  m.def("perturbation_direction",
        [](std::shared_ptr<TransverseBasis> basis, std::shared_ptr<AxialGrid> grid, std::uint64_t seed) {
          return perturbation_direction(basis, grid, seed);
        });

  m.def("config_defaults", [] { return to_text(RunConfig{}); });
  m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); });
  m.def("normalize_config", [](const std::string& text) { return to_text(parse_config(text)); });

  m.def("save_state", [](const std::string& path, const GroundStateRecord& rec) {
    StateHeader h;
    h.omega = rec.omega;
    h.mass = rec.mass;
    h.mu = rec.mu;
    h.energy = rec.energy;
    save_state(path, h, rec.state);
  });
  m.def("load_state", [](const std::string& path) {
    StateFile f = load_state(path);
    py::dict header;
    header["version"] = f.header.version;
    header["kind"] = f.header.kind;
    header["omega"] = f.header.omega;
    header["mass"] = f.header.mass;
    header["mu"] = f.header.mu;
    header["energy"] = f.header.energy;
    header["time"] = f.header.time;
    return py::make_tuple(header, f.field);
  });

  // Command runners take config text (as in a --config file) and return the
  // exit code.
  auto command = [&m](const char* name, auto fn) {
    m.def(name, [fn, name](const std::string& text, const std::optional<std::string>& state) {
      const RunConfig config = parse_config(text);
      py::gil_scoped_release release;
      return run_guarded(config, name, [&] { return fn(config, state); });
    }, py::arg("config_text") = "", py::arg("state") = py::none());
  };
  command("cmd_ground_state", [](const RunConfig& c, const std::optional<std::string>&) { return cmd_ground_state(c); });
  command("cmd_sweep", [](const RunConfig& c, const std::optional<std::string>&) { return cmd_sweep(c); });
  command("cmd_spectrum", [](const RunConfig& c, const std::optional<std::string>& s) { return cmd_spectrum(c, s); });
  command("cmd_evolve", [](const RunConfig& c, const std::optional<std::string>& s) { return cmd_evolve(c, s); });
  command("cmd_check", [](const RunConfig& c, const std::optional<std::string>&) { return cmd_check(c); });
}
