#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tether/asymptotics/suite.hpp"
#include "tether/core/error.hpp"
#include "tether/ibm/run.hpp"
#include "tether/ibm/statistics.hpp"
#include "tether/kernels.hpp"
#include "tether/macro1d/run.hpp"
#include "tether/stability.hpp"

#ifdef TETHER_WITH_CLI
#include "tether/cli/config.hpp"
#include "tether/cli/experiment.hpp"
#include "tether/cli/presets.hpp"
#endif

namespace py = pybind11;
using namespace tether;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> stack(const std::vector<DensityField>& fields) {
    const std::size_t rows = fields.size();
    const std::size_t cols = rows ? fields.front().size() : 0;
    py::array_t<double> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = fields[r][c];
    return out;
}

py::array_t<double> positions(const std::vector<Vec2>& pts, int dimension) {
    if (dimension == 1) {
        py::array_t<double> out(static_cast<py::ssize_t>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) out.mutable_data()[i] = pts[i].x;
        return out;
    }
    py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m(i, 0) = pts[i].x;
        m(i, 1) = pts[i].y;
    }
    return out;
}

py::dict state_dict(const IbmState& s) {
    const int d = s.domain.dimension();
    py::dict out;
    out["t"] = s.t;
    out["step"] = s.step;
    out["spp"] = positions(s.Z, d);
    out["orientation"] = positions(s.alpha, 2);
    out["obstacles"] = positions(s.X, d);
    out["anchors"] = positions(s.Y, d);
    return out;
}

}  // namespace

PYBIND11_MODULE(_tether, m) {
    m.doc() = "Particle and continuum models of self-propelled particles among tethered obstacles";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<KernelFamily>(m, "KernelFamily")
        .value("QuadraticCompact", KernelFamily::QuadraticCompact)
        .value("ExponentialForce", KernelFamily::ExponentialForce);
    py::enum_<ClosureOrder>(m, "ClosureOrder")
        .value("Gamma1", ClosureOrder::Gamma1)
        .value("Gamma2", ClosureOrder::Gamma2);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init([](KernelFamily f, double mass, double radius, int dimension) {
                 return KernelSpec{f, mass, radius, dimension};
             }),
             py::arg("family") = KernelFamily::QuadraticCompact, py::arg("mass") = 1.0,
             py::arg("radius") = 0.1, py::arg("dimension") = 1)
        .def_readwrite("family", &KernelSpec::family)
        .def_readwrite("mass", &KernelSpec::mass)
        .def_readwrite("radius", &KernelSpec::radius)
        .def_readwrite("dimension", &KernelSpec::dimension)
        .def("__repr__", [](const KernelSpec& k) {
            return "KernelSpec(" + std::string(to_string(k.family)) + ", mass=" + std::to_string(k.mass) +
                   ", radius=" + std::to_string(k.radius) + ", dimension=" + std::to_string(k.dimension) + ")";
        });
    m.def("potential", py::overload_cast<const KernelSpec&, double>(&potential));
    m.def("force", py::overload_cast<const KernelSpec&, double>(&force));
    m.def("fourier_coefficient", &fourier_coefficient);

    py::class_<MacroParams>(m, "MacroParams")
        .def(py::init<>())
        .def_readwrite("c1", &MacroParams::c1)
        .def_readwrite("zeta", &MacroParams::zeta)
        .def_readwrite("mu", &MacroParams::mu)
        .def_readwrite("gamma", &MacroParams::gamma)
        .def_readwrite("eta", &MacroParams::eta)
        .def_readwrite("delta", &MacroParams::delta)
        .def_readwrite("rho0", &MacroParams::rho0)
        .def_readwrite("kernel", &MacroParams::kernel)
        .def_readwrite("closure", &MacroParams::closure)
        .def("validate", &MacroParams::validate);

    py::class_<MacroNumerics>(m, "MacroNumerics")
        .def(py::init<>())
        .def_readwrite("n_cells", &MacroNumerics::n_cells)
        .def_readwrite("dt", &MacroNumerics::dt)
        .def_readwrite("t_end", &MacroNumerics::t_end)
        .def_readwrite("output_interval", &MacroNumerics::output_interval)
        .def_readwrite("adaptive", &MacroNumerics::adaptive)
        .def_readwrite("cfl_target", &MacroNumerics::cfl_target)
        .def_readwrite("comoving", &MacroNumerics::comoving);

    py::class_<InitialCondition> ic(m, "InitialCondition");
    py::enum_<InitialCondition::Kind>(ic, "Kind")
        .value("PerturbedUniform", InitialCondition::Kind::PerturbedUniform)
        .value("Gaussian", InitialCondition::Kind::Gaussian);
    ic.def(py::init<>())
        .def_readwrite("kind", &InitialCondition::kind)
        .def_readwrite("amplitude", &InitialCondition::amplitude)
        .def_readwrite("seed", &InitialCondition::seed)
        .def_readwrite("center", &InitialCondition::center)
        .def_readwrite("variance", &InitialCondition::variance);

    m.def(
        "run_macro",
        [](const MacroParams& p, const MacroNumerics& n, const InitialCondition& init) {
            const MacroRunResult r = [&] {
                py::gil_scoped_release release;
                return run_macro(p, n, init);
            }();
            py::dict out;
            const auto& grid = r.final_state.rho_g.grid();
            std::vector<double> xs;
            for (std::size_t i = 0; i < grid.size(); ++i) xs.push_back(grid.x(i));
            out["x"] = to_array(xs);
            out["t"] = to_array(r.times);
            out["rho_g"] = stack(r.rho_g);
            out["rho_f"] = stack(r.rho_f);
            out["mass"] = to_array(r.mass);
            out["peaks"] = r.peaks;
            out["min_rho_f"] = r.min_rho_f;
            out["valid"] = r.valid();
            return out;
        },
        py::arg("params"), py::arg("numerics") = MacroNumerics{}, py::arg("initial") = InitialCondition{},
        "Runs the 1D continuum model; returns lab-frame snapshots at every output time.");

    m.def(
        "dispersion",
        [](double k, const MacroParams& p, ClosureOrder order) {
            DispersionOptions o;
            o.order = order;
            const auto d = dispersion(k, p, o);
            return std::complex<double>(d.alpha_re, d.alpha_im);
        },
        py::arg("k"), py::arg("params"), py::arg("order") = ClosureOrder::Gamma1);
    m.def("stability_threshold_r_I", &stability_threshold_r_I);
    m.def("predicted_peak_count", &predicted_peak_count, py::arg("params"), py::arg("l_max") = 0);
    m.def(
        "is_linearly_stable",
        [](const MacroParams& p, int l_max) {
            const auto r = is_linearly_stable(p, ModeSet::discrete(l_max));
            py::dict out;
            out["stable"] = r.stable;
            out["max_re_alpha"] = r.max_re_alpha;
            out["k_max"] = r.k_max;
            out["l_max"] = r.l_max;
            out["predicted_peaks"] = r.predicted_peaks;
            out["r_I_threshold"] = r.threshold_r_I;
            return out;
        },
        py::arg("params"), py::arg("l_max") = 0);

    py::class_<IbmParams>(m, "IbmParams")
        .def(py::init<>())
        .def_readwrite("kappa", &IbmParams::kappa)
        .def_readwrite("eta", &IbmParams::eta)
        .def_readwrite("zeta", &IbmParams::zeta)
        .def_readwrite("nu", &IbmParams::nu)
        .def_readwrite("d_s", &IbmParams::d_s)
        .def_readwrite("d_o", &IbmParams::d_o)
        .def_readwrite("r_A", &IbmParams::r_A)
        .def_readwrite("phi", &IbmParams::phi)
        .def_readwrite("psi", &IbmParams::psi)
        .def_readwrite("dt", &IbmParams::dt)
        .def_readwrite("N", &IbmParams::N)
        .def_readwrite("M", &IbmParams::M);

    m.def(
        "run_ibm",
        [](const IbmParams& p, int dimension, double length, double t_end, std::uint64_t seed) {
            IbmNumerics n;
            n.t_end = t_end;
            n.output_interval = std::max(t_end, p.dt);
            n.seed = seed;
            IbmRunResult r;
            {
                py::gil_scoped_release release;
                auto init = dimension == 1 ? make_initial_state_1d(p, length, seed)
                                           : make_initial_state_2d(p, PeriodicDomain(2, length), seed);
                r = run_ibm(p, n, std::move(init));
            }
            return state_dict(r.final_state);
        },
        py::arg("params"), py::arg("dimension") = 2, py::arg("length") = 1.0, py::arg("t_end") = 1.0,
        py::arg("seed") = 1, "Runs the particle model and returns the final state as arrays.");

    m.def(
        "estimate_density_1d",
        [](const std::vector<double>& x, double variance, std::size_t n_cells, double length) {
            const auto f = estimate_density_1d(x, variance, Grid1D(n_cells, length));
            return to_array(f.values());
        },
        py::arg("positions"), py::arg("variance"), py::arg("n_cells") = 333, py::arg("length") = 1.0);

    m.def(
        "run_asymptotics_suite",
        [](std::uint64_t seed) {
            py::list out;
            VerificationOptions o;
            o.seed = seed;
            for (const auto& c : run_asymptotics_suite(o))
                out.append(py::make_tuple(c.name, c.residual, c.tolerance, c.passed()));
            return out;
        },
        py::arg("seed") = 7, "Returns (name, residual, tolerance, passed) per check.");

#ifdef TETHER_WITH_CLI
    m.def("preset_names", &cli::preset_names);
    m.def("preset_text", [](const std::string& name) { return std::string(cli::preset_text(name)); });
    m.def(
        "run_config",
        [](const std::string& text, const std::filesystem::path& out_dir) {
            const auto c = cli::parse_config(text, "config");
            py::gil_scoped_release release;
            cli::run_experiment(c, out_dir);
        },
        py::arg("text"), py::arg("out_dir"),
        "Parses YAML config text and runs it into out_dir, as the command-line tool does.");
#endif
}
