#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <vector>

#include "hypetc/error.hpp"
#include "hypetc/experiment.hpp"

namespace py = pybind11;
using namespace hypetc;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

KernelFamily parse_family(const std::string& name) {
    for (auto f : {KernelFamily::Controller, KernelFamily::Observer,
                   KernelFamily::InverseController, KernelFamily::InverseObserver}) {
        if (name == to_string(f)) return f;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown kernel family '" + name + "'");
}

py::object nan_or(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::cast(std::nan(""));
}

py::dict summary_dict(const RunSummary& s) {
    py::dict d;
    d["mode"] = std::string(to_string(s.mode));
    d["steps"] = s.steps;
    d["dt"] = s.dt;
    d["t_end"] = s.t_end;
    d["tau"] = s.tau;
    d["h"] = s.h;
    d["transit"] = s.transit;
    d["min_dwell"] = s.min_dwell;
    d["mean_dwell"] = s.mean_dwell;
    d["initial_norm"] = s.initial_norm;
    d["final_norm"] = s.final_norm;
    d["min_norm_ratio"] = s.min_norm_ratio;
    d["time_to_1pct"] = nan_or(s.time_to_1pct);
    d["initial_error_norm"] = s.initial_error_norm;
    d["max_error_ratio_after_transit"] = s.max_error_ratio_after_transit;
    d["max_gamma_c"] = s.max_gamma_c;
    d["max_m"] = s.max_m;
    d["min_H"] = s.min_H;
    d["gate_clamps"] = s.gate_clamps;
    d["error_digest"] = s.error_digest;
    d["files"] = s.files;
    d["warnings"] = s.warnings;

    std::vector<double> et, ed, eu;
    for (const auto& e : s.events) {
        et.push_back(e.t);
        ed.push_back(e.dwell);
        eu.push_back(e.U_held);
    }
    py::dict ev;
    ev["t"] = to_array(et);
    ev["dwell"] = to_array(ed);
    ev["U_held"] = to_array(eu);
    d["events"] = ev;

    std::vector<double> cols[9];
    for (const auto& r : s.trajectory) {
        const double row[9] = {r.t,      r.norm_plant, r.norm_observer, r.norm_error, r.U_held,
                               r.U_continuous, r.d,   r.m,             r.gamma_c};
        for (int i = 0; i < 9; ++i) cols[i].push_back(row[i]);
    }
    const char* names[9] = {"t", "norm_plant", "norm_observer", "norm_error", "U_held",
                            "U_continuous", "d", "m", "gamma_c"};
    py::dict tr;
    for (int i = 0; i < 9; ++i) tr[names[i]] = to_array(cols[i]);
    d["trajectory"] = tr;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hypetc, m) {
    m.doc() = "Event-triggered boundary control of 2x2 hyperbolic systems";

    // Raised with args (code, message).
    static py::exception<Error> exc(m, "HypetcError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto args = py::make_tuple(std::string(to_string(e.code())), std::string(e.what()));
            PyErr_SetObject(exc.ptr(), args.ptr());
        }
    });

    m.def("default_config_json", [] { return dump_config(default_config()); },
          "Reference configuration as JSON text.");
    m.def("normalize_config_json",
          [](const std::string& text) { return dump_config(parse_config(text)); },
          "Parses and re-serializes a configuration, filling defaults.");
    m.def("constants_json",
          [](const std::string& text) {
              const RunConfig cfg = parse_config(text);
              return constants_json(prepare(cfg), cfg);
          },
          "Design constants of a configuration as JSON text.");
    m.def("warnings",
          [](const std::string& text) { return prepare(parse_config(text)).warnings; });
    m.def("simulate",
          [](const std::string& text) {
              const RunConfig cfg = parse_config(text);
              RunSummary s;
              {
                  py::gil_scoped_release release;
                  s = run_scenario(cfg);
              }
              return summary_dict(s);
          },
          "Runs one scenario and returns its summary with the stored trajectory.");
    m.def("compare",
          [](const std::vector<std::string>& texts) {
              std::vector<RunConfig> cfgs;
              for (const auto& t : texts) cfgs.push_back(parse_config(t));
              std::vector<RunSummary> sums;
              {
                  py::gil_scoped_release release;
                  compare_modes(cfgs, &sums);
              }
              py::list out;
              for (const auto& s : sums) out.append(summary_dict(s));
              return out;
          },
          "Runs several configurations that differ only in mode and output settings.");
    m.def("solve_kernels",
          [](const std::string& family, const std::string& text) {
              const RunConfig cfg = parse_config(text);
              cfg.validate();
              const PlantCoefficients c =
                  cfg.canal ? linearize(*cfg.canal).plant : cfg.raw->coefficients();
              const TriangularGrid grid(cfg.sim.n_x, c.ell);
              const KernelSet k = solve_kernels(parse_family(family), c, grid, cfg.kernel);
              const auto n = static_cast<py::ssize_t>(grid.n_x);
              py::dict out;
              const char* names[4] = {"k11", "k12", "k21", "k22"};
              for (std::size_t w = 0; w < 4; ++w) {
                  py::array_t<double> a({n, n});
                  auto r = a.mutable_unchecked<2>();
                  for (py::ssize_t i = 0; i < n; ++i)
                      for (py::ssize_t j = 0; j < n; ++j)
                          r(i, j) = j <= i ? k.at(w, static_cast<std::size_t>(i),
                                                  static_cast<std::size_t>(j))
                                           : std::nan("");
                  out[names[w]] = a;
              }
              out["x"] = to_array(grid.line().nodes());
              out["iterations"] = k.iterations;
              out["max_residual"] = kernel_residuals(k, c).max();
              return out;
          },
          py::arg("family"), py::arg("config_json"),
          "Kernel family K, P, L or R on the configured plant; entries above the diagonal are NaN.");
    m.def("dwell_time", &dwell_time, py::arg("a"), py::arg("theta"), py::arg("sigma"),
          py::arg("theta_m"));
}
