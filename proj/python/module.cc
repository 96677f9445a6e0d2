//
// Copyright 2026 The BinCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Python bindings for the core library.

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "bincp/certify.h"
#include "bincp/conformal.h"
#include "bincp/error.h"
#include "bincp/intervals.h"
#include "bincp/scores.h"
#include "bincp/simulate.h"

namespace py = pybind11;

namespace bincp {
namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

ScoreSamples MakeSamples(const FloatArray& values,
                         std::optional<std::vector<std::uint32_t>> labels,
                         bool exact_mode) {
  if (values.ndim() != 3) {
    throw ValidationError("scores must have shape (points, classes, samples)");
  }
  std::vector<float> flat(values.data(), values.data() + values.size());
  return ScoreSamples(values.shape(0), values.shape(1), values.shape(2),
                      std::move(flat), std::move(labels), exact_mode);
}

}  // namespace
}  // namespace bincp

PYBIND11_MODULE(_core, m) {
  using namespace bincp;
  m.doc() = "Binarized conformal prediction";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<ThreatModel>(m, "ThreatModel")
      .def_static("l2", &ThreatModel::L2, py::arg("r"))
      .def_static("l1", &ThreatModel::L1, py::arg("r"))
      .def_static("binary_flip", &ThreatModel::BinaryFlip, py::arg("r_add"),
                  py::arg("r_del"))
      .def("__repr__", &ThreatModel::describe)
      .def(py::self == py::self);

  py::class_<SmoothingScheme>(m, "SmoothingScheme")
      .def_static("gaussian", &SmoothingScheme::Gaussian, py::arg("sigma"))
      .def_static("uniform", &SmoothingScheme::Uniform, py::arg("lam"),
                  py::arg("exact") = false)
      .def_static("sparse", &SmoothingScheme::SparseBernoulli,
                  py::arg("p_plus"), py::arg("p_minus"))
      .def("__repr__", &SmoothingScheme::describe);

  m.def("invert_ball", &invert_ball, py::arg("ball"));
  m.def(
      "cert_lower",
      [](double p, const SmoothingScheme& s, const ThreatModel& b) {
        return cert_lower(p, s, b).value();
      },
      py::arg("p"), py::arg("scheme"), py::arg("ball"));
  m.def(
      "cert_upper",
      [](double p, const SmoothingScheme& s, const ThreatModel& b) {
        return cert_upper(p, s, b).value();
      },
      py::arg("p"), py::arg("scheme"), py::arg("ball"));

  m.def("cp_lower", &cp_lower, py::arg("successes"), py::arg("m"),
        py::arg("eta"));
  m.def("cp_upper", &cp_upper, py::arg("successes"), py::arg("m"),
        py::arg("eta"));
  m.def("hoeffding_bound", &hoeffding_bound, py::arg("m"), py::arg("eta"));
  m.def("cp_vs_hoeffding_probability", &cp_vs_hoeffding_probability,
        py::arg("a"), py::arg("b"), py::arg("tau"), py::arg("m"),
        py::arg("eta"));

  m.def(
      "conformal_quantile",
      [](const std::vector<double>& values, double alpha) {
        return conformal_quantile(values, alpha);
      },
      py::arg("values"), py::arg("alpha"));

  py::class_<ScoreSamples>(m, "ScoreSamples")
      .def(py::init(&MakeSamples), py::arg("values"),
           py::arg("labels") = std::nullopt, py::arg("exact_mode") = false)
      .def_property_readonly("n_points", &ScoreSamples::n_points)
      .def_property_readonly("n_classes", &ScoreSamples::n_classes)
      .def_property_readonly("m_samples", &ScoreSamples::m_samples)
      .def_property_readonly("exact_mode", &ScoreSamples::exact_mode);

  py::enum_<CalibrationMode>(m, "CalibrationMode")
      .value("FIXED_P", CalibrationMode::kFixedP)
      .value("FIXED_TAU", CalibrationMode::kFixedTau);

  py::class_<CalibrationConfig>(m, "CalibrationConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &CalibrationConfig::alpha)
      .def_readwrite("eta", &CalibrationConfig::eta)
      .def_readwrite("mode", &CalibrationConfig::mode)
      .def_readwrite("p", &CalibrationConfig::p)
      .def_readwrite("tau", &CalibrationConfig::tau)
      .def_readwrite("scheme", &CalibrationConfig::scheme)
      .def_readwrite("ball", &CalibrationConfig::ball)
      .def_readwrite("exact", &CalibrationConfig::exact);

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("p_alpha", &CalibrationResult::p_alpha)
      .def_readonly("tau_alpha", &CalibrationResult::tau_alpha)
      .def_readonly("p_alpha_down", &CalibrationResult::p_alpha_down)
      .def_readonly("cert_threshold", &CalibrationResult::cert_threshold)
      .def_readonly("n", &CalibrationResult::n)
      .def_readonly("k", &CalibrationResult::k)
      .def_readonly("m", &CalibrationResult::m)
      .def_readonly("degenerate", &CalibrationResult::degenerate)
      .def_readonly("warnings", &CalibrationResult::warnings);

  py::class_<PredictionSet>(m, "PredictionSet")
      .def_readonly("point", &PredictionSet::point)
      .def_readonly("classes", &PredictionSet::classes)
      .def_readonly("per_class_fraction", &PredictionSet::per_class_fraction)
      .def_readonly("per_class_bound", &PredictionSet::per_class_bound);

  m.def("corrected_calibrate", &corrected_calibrate, py::arg("samples"),
        py::arg("config"));
  m.def("predict", &predict, py::arg("calibration"), py::arg("test"));

  py::class_<MetricSummary>(m, "MetricSummary")
      .def_readonly("mean", &MetricSummary::mean)
      .def_readonly("std", &MetricSummary::std)
      .def_readonly("min", &MetricSummary::min)
      .def_readonly("max", &MetricSummary::max)
      .def_readonly("se", &MetricSummary::se);

  py::class_<Report>(m, "Report")
      .def_readonly("coverage", &Report::coverage)
      .def_readonly("set_size", &Report::set_size)
      .def_property_readonly("trials",
                             [](const Report& r) { return r.trials.size(); });

  m.def(
      "evaluate",
      [](const std::string& mode, const std::string& adversary,
         const CalibrationConfig& calibration, std::size_t n, std::size_t k,
         std::size_t m_samples, std::size_t trials, std::uint64_t seed) {
        EvalConfig config;
        config.pipeline = pipeline_mode_from_string(mode);
        config.adversary = adversary_mode_from_string(adversary);
        config.calibration = calibration;
        config.generator.n_points = n;
        config.generator.n_classes = k;
        config.generator.m_samples = m_samples;
        config.generator.seed = seed;
        config.trials = trials;
        py::gil_scoped_release release;
        return evaluate(config);
      },
      py::arg("mode"), py::arg("adversary"), py::arg("calibration"),
      py::arg("n"), py::arg("k"), py::arg("m"), py::arg("trials"),
      py::arg("seed"));
}
