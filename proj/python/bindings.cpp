#include "mice/estimator.hpp"
#include "mice/experiment.hpp"
#include "mice/problems.hpp"
#include "mice/rng.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

py::dict record_to_dict(const mice::RunRecord& r) {
  py::dict d;
  d["iter"] = r.iter;
  d["grad_evals_cum"] = r.grad_evals_cum;
  d["time_s"] = r.time_s;
  d["objective"] = r.objective;
  d["opt_gap"] = r.opt_gap;
  d["grad_norm_est"] = r.grad_norm_est;
  d["stat_err_sq"] = r.stat_err_sq;
  d["action"] = r.action;
  d["hierarchy_len"] = r.hierarchy_len;
  d["xi"] = r.xi;
  return d;
}

// Runs one replicate of a key/value experiment config in memory.
py::list run_config(const std::map<std::string, std::string>& kv, std::uint64_t replicate) {
  const auto cfg = mice::ExperimentConfig::from_key_values(kv);
  const auto inst = mice::make_problem(cfg.problem);
  std::vector<mice::RunRecord> records;
  mice::RunOptions opts;
  opts.stop = cfg.stop;
  opts.log_stride = cfg.log_stride;
  opts.record_time = cfg.record_time;
  opts.sink = [&](const mice::RunRecord& r) { records.push_back(r); };
  {
    py::gil_scoped_release release;
    mice::run_method(*inst.problem, inst.start, cfg.method, opts,
                     mice::RngStream(cfg.seed, 1000 + replicate));
  }
  py::list out;
  for (const auto& r : records) out.append(record_to_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-iteration stochastic gradient estimator and optimizers";

  static py::exception<mice::MiceError> mice_error(m, "MiceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mice::MiceError& e) {
      py::set_error(mice_error,
                    (std::string(mice::to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<mice::MiceConfig>(m, "MiceConfig")
      .def(py::init<>())
      .def_readwrite("eps", &mice::MiceConfig::eps)
      .def_readwrite("delta_drop", &mice::MiceConfig::delta_drop)
      .def_readwrite("delta_rest", &mice::MiceConfig::delta_rest)
      .def_readwrite("delta_re", &mice::MiceConfig::delta_re)
      .def_readwrite("n_part", &mice::MiceConfig::n_part)
      .def_readwrite("p_re", &mice::MiceConfig::p_re)
      .def_readwrite("min_resample", &mice::MiceConfig::min_resample)
      .def_readwrite("max_resample", &mice::MiceConfig::max_resample)
      .def_readwrite("m_min", &mice::MiceConfig::m_min)
      .def_readwrite("m_min_restart", &mice::MiceConfig::m_min_restart)
      .def_readwrite("max_hierarchy_size", &mice::MiceConfig::max_hierarchy_size)
      .def_readwrite("max_layer_samples", &mice::MiceConfig::max_layer_samples)
      .def_property(
          "clipping", [](const mice::MiceConfig& c) { return std::string(mice::to_string(c.clipping)); },
          [](mice::MiceConfig& c, const std::string& s) { c.clipping = mice::parse_clipping(s); })
      .def("validate", &mice::MiceConfig::validate);

  py::class_<mice::StochasticProblem>(m, "StochasticProblem")
      .def_property_readonly("dimension", &mice::StochasticProblem::dimension)
      .def("true_gradient", &mice::StochasticProblem::true_gradient)
      .def("true_objective", &mice::StochasticProblem::true_objective)
      .def("optimum_point", [](const mice::StochasticProblem& p) -> std::optional<mice::Vector> {
        auto o = p.optimum();
        if (!o) return std::nullopt;
        return o->point;
      });

  py::class_<mice::QuadraticProblem, mice::StochasticProblem>(m, "QuadraticProblem")
      .def(py::init<double>(), py::arg("kappa"))
      .def_static("default_start", &mice::QuadraticProblem::default_start);
  py::class_<mice::ShiftedQuadraticProblem, mice::StochasticProblem>(m, "ShiftedQuadraticProblem")
      .def(py::init<double>(), py::arg("sigma"));
  py::class_<mice::RosenbrockProblem, mice::StochasticProblem>(m, "RosenbrockProblem")
      .def(py::init<double, double, double>(), py::arg("sigma"), py::arg("a") = 1.0,
           py::arg("b") = 100.0)
      .def_static("default_start", &mice::RosenbrockProblem::default_start);

  py::class_<mice::MiceEstimator>(m, "MiceEstimator")
      .def(py::init([](const mice::StochasticProblem& p, const mice::MiceConfig& cfg,
                       std::uint64_t seed) {
             return std::make_unique<mice::MiceEstimator>(p, cfg, mice::RngStream(seed));
           }),
           py::arg("problem"), py::arg("config"), py::arg("seed") = 0, py::keep_alive<1, 2>())
      .def("estimate",
           [](mice::MiceEstimator& est, const mice::Vector& xi) {
             const auto rep = est.estimate(xi);
             py::dict d;
             d["gradient"] = rep.gradient;
             d["stat_error_sq"] = rep.stat_error_sq;
             d["resampled_norm"] = rep.resampled_norm;
             d["action"] = std::string(mice::to_string(rep.action));
             d["new_gradient_evals"] = rep.new_gradient_evals;
             d["hierarchy_len"] = rep.layers.size();
             d["stop"] = rep.stop;
             return d;
           })
      .def_property_readonly("gradient_evals", &mice::MiceEstimator::gradient_evals)
      .def_property_readonly("iteration", &mice::MiceEstimator::iteration);

  m.def("step_size_strongly_convex", &mice::step_size_strongly_convex, py::arg("lipschitz"),
        py::arg("mu"), py::arg("eps"));
  m.def("run_config", &run_config, py::arg("config"), py::arg("replicate") = 0,
        "Run one replicate of a key/value experiment config and return its records.");
}
