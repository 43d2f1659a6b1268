#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavecrit/bounds.hpp"
#include "wavecrit/diagnostics.hpp"
#include "wavecrit/errors.hpp"
#include "wavecrit/pdesim.hpp"
#include "wavecrit/solver.hpp"

namespace py = pybind11;
using namespace wavecrit;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict checks_dict(const std::vector<Check>& checks) {
  py::dict d;
  for (const auto& c : checks) {
    d[py::str(c.name)] = py::dict(py::arg("pass") = c.pass, py::arg("value") = c.value,
                                  py::arg("threshold") = c.threshold,
                                  py::arg("detail") = c.detail);
  }
  return d;
}

WaveProfile profile_from(py::array_t<double> xi, py::array_t<double> s, py::array_t<double> i) {
  const auto n = static_cast<std::size_t>(xi.size());
  if (n < 3 || static_cast<std::size_t>(s.size()) != n || static_cast<std::size_t>(i.size()) != n)
    throw GridMismatch("xi, s and i must have the same length >= 3");
  const WaveGrid g{xi.at(0), xi.at(n - 1), n};
  WaveProfile p{g, std::vector<double>(s.data(), s.data() + n),
                std::vector<double>(i.data(), i.data() + n), 0};
  p.refresh_right_limit();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical traveling waves of the diffusive SIR model with incidence beta S I / (S + I)";

  static py::handle error_type =
      py::exception<Error>(m, "WavecritError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = e.code();
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double d1, double d2, double d3, double beta, double gamma,
                       double s_minus_inf) {
             ModelParams p{d1, d2, d3, beta, gamma, s_minus_inf};
             p.validate();
             return p;
           }),
           py::arg("d1") = 1.0, py::arg("d2") = 1.0, py::arg("d3") = 1.0, py::arg("beta") = 2.0,
           py::arg("gamma") = 1.0, py::arg("s_minus_inf") = 1.0)
      .def_readwrite("d1", &ModelParams::d1)
      .def_readwrite("d2", &ModelParams::d2)
      .def_readwrite("d3", &ModelParams::d3)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("s_minus_inf", &ModelParams::s_minus_inf)
      .def_property_readonly("r0", &ModelParams::r0)
      .def_property_readonly("plateau", &ModelParams::plateau)
      .def("__repr__", [](const ModelParams& p) {
        return py::str("ModelParams(d1={}, d2={}, d3={}, beta={}, gamma={}, s_minus_inf={})")
            .format(p.d1, p.d2, p.d3, p.beta, p.gamma, p.s_minus_inf);
      });

  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("params", &SpectralData::params)
      .def_readonly("r0", &SpectralData::r0)
      .def_readonly("c_star", &SpectralData::c_star)
      .def_readonly("lambda_star", &SpectralData::lambda_star)
      .def_readonly("beta1", &SpectralData::beta1)
      .def_readonly("beta2", &SpectralData::beta2)
      .def_readonly("lambda1_minus", &SpectralData::lambda1_minus)
      .def_readonly("lambda1_plus", &SpectralData::lambda1_plus)
      .def_readonly("lambda2_minus", &SpectralData::lambda2_minus)
      .def_readonly("lambda2_plus", &SpectralData::lambda2_plus)
      .def_readonly("big_lambda1", &SpectralData::big_lambda1)
      .def_readonly("big_lambda2", &SpectralData::big_lambda2)
      .def_readonly("mu", &SpectralData::mu);

  py::class_<BoundSet>(m, "BoundSet")
      .def_readonly("lambda_star", &BoundSet::lambda_star)
      .def_readonly("m", &BoundSet::m)
      .def_readonly("l1", &BoundSet::l1)
      .def_readonly("l2", &BoundSet::l2)
      .def_readonly("eps", &BoundSet::eps)
      .def_readonly("xi1", &BoundSet::xi1)
      .def_readonly("xi2", &BoundSet::xi2)
      .def_readonly("xi3", &BoundSet::xi3)
      .def("profiles", [](const BoundSet& bs, py::array_t<double> xi) {
        auto x = xi.unchecked<1>();
        const auto n = x.shape(0);
        py::array_t<double> sb(n), ib(n), sl(n), il(n);
        for (py::ssize_t k = 0; k < n; ++k) {
          const ProfileValues v = eval_profiles(bs, x(k));
          sb.mutable_at(k) = v.s_bar;
          ib.mutable_at(k) = v.i_bar;
          sl.mutable_at(k) = v.s_low;
          il.mutable_at(k) = v.i_low;
        }
        return py::dict(py::arg("s_bar") = sb, py::arg("i_bar") = ib, py::arg("s_low") = sl,
                        py::arg("i_low") = il);
      }, py::arg("xi"), "Super- and sub-solution profiles at the points xi.");

  m.def("critical_speed", &critical_speed, py::arg("params"));
  m.def("derive_spectral", [](const ModelParams& p) { return derive_spectral(p); },
        py::arg("params"));
  m.def("select_constants", [](const SpectralData& s) { return select_constants(s); },
        py::arg("spectral"));
  m.def("certify", [](const BoundSet& bs, const SpectralData& s, int n) {
    const CertReport rep = certify_inequalities(bs, s, certification_grid(bs, n));
    py::list ineq;
    for (const auto& q : rep.inequalities) {
      ineq.append(py::dict(py::arg("name") = q.name, py::arg("pass") = q.pass,
                           py::arg("worst_scaled") = q.worst_scaled,
                           py::arg("worst_xi") = q.worst_xi));
    }
    return py::dict(py::arg("pass") = rep.pass, py::arg("grid_points") = rep.grid_points,
                    py::arg("inequalities") = ineq);
  }, py::arg("bounds"), py::arg("spectral"), py::arg("n") = 4096);

  m.def("solve", [](const ModelParams& p, std::optional<double> h, double tol, int max_iter) {
    SolveConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    if (h) {
      const SpectralData spec = derive_spectral(p);
      const WaveGrid g = default_grid(spec, select_constants(spec));
      cfg.grid = WaveGrid::with_spacing(g.xi_min, g.xi_max, *h);
    }
    SolveResult r;
    {
      py::gil_scoped_release release;
      r = solve_critical_wave(p, cfg);
    }
    const WaveReport rep = diagnose(r.profile, r.spectral, r.bounds);
    py::dict out;
    out["xi"] = to_array(r.profile.grid.nodes());
    out["s"] = to_array(r.profile.s);
    out["i"] = to_array(r.profile.i);
    out["spectral"] = r.spectral;
    out["bounds"] = r.bounds;
    out["iterations"] = r.iterations;
    out["residual"] = r.converged_residual;
    out["final_residual"] = r.final_residual;
    out["s_infinity"] = rep.s_infinity;
    out["wave_mass"] = rep.wave_mass;
    out["i_max"] = rep.i_max;
    out["checks"] = checks_dict(rep.checks);
    out["pass"] = rep.pass;
    return out;
  }, py::arg("params") = ModelParams{}, py::arg("h") = py::none(), py::arg("tol") = 1e-8,
     py::arg("max_iter") = 500,
     "Solves for the critical wave and runs the diagnostics on the result.");

  m.def("diagnose", [](py::array_t<double> xi, py::array_t<double> s, py::array_t<double> i,
                       const ModelParams& p) {
    const SpectralData spec = derive_spectral(p);
    const WaveReport rep = diagnose(profile_from(xi, s, i), spec, select_constants(spec));
    return py::dict(py::arg("pass") = rep.pass, py::arg("checks") = checks_dict(rep.checks),
                    py::arg("s_infinity") = rep.s_infinity, py::arg("wave_mass") = rep.wave_mass,
                    py::arg("i_max") = rep.i_max, py::arg("ode_residual") = rep.ode_residual);
  }, py::arg("xi"), py::arg("s"), py::arg("i"), py::arg("params") = ModelParams{});

  m.def("ode_residual", [](py::array_t<double> xi, py::array_t<double> s, py::array_t<double> i,
                           const ModelParams& p, double c) {
    return ode_residual(profile_from(xi, s, i), p, c);
  }, py::arg("xi"), py::arg("s"), py::arg("i"), py::arg("params"), py::arg("c"));

  m.def("simulate", [](const ModelParams& p, double domain_length, double t_end, double dx) {
    SimConfig cfg;
    cfg.domain_length = domain_length;
    cfg.t_end = t_end;
    cfg.dx = dx;
    SimResult r;
    {
      py::gil_scoped_release release;
      r = run_simulation(p, cfg);
    }
    std::vector<double> t, x;
    for (const auto& f : r.front) {
      t.push_back(f.t);
      x.push_back(f.x);
    }
    py::dict out;
    out["t"] = r.final_state.t;
    out["s"] = to_array(r.final_state.s);
    out["i"] = to_array(r.final_state.i);
    out["front_t"] = to_array(t);
    out["front_x"] = to_array(x);
    out["tracking"] = r.tracking;
    out["max_i_final"] = r.max_i.back().x;
    if (r.tracking) {
      const SpeedEstimate e = measure_front_speed(r.front);
      out["speed"] = e.speed;
      out["log_speed"] = e.log_speed;
    }
    return out;
  }, py::arg("params") = ModelParams{}, py::arg("domain_length") = 400.0,
     py::arg("t_end") = 150.0, py::arg("dx") = 0.1);
}
