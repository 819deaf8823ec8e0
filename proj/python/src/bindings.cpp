// Copyright 2026 The GOAS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "goas/cli.hpp"
#include "goas/dataset.hpp"
#include "goas/error.hpp"
#include "goas/evaluation.hpp"
#include "goas/spectrum.hpp"
#include "goas/synthetic.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const goas::Tensor<double>& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  Array out(shape);
  std::copy(t.data(), t.data() + t.size(), out.mutable_data());
  return out;
}

goas::Tensor<double> to_map(const Array& a) {
  if (a.ndim() != 2) throw goas::ShapeError("expected a 2-D array, got " + std::to_string(a.ndim()) + " dimensions");
  const auto* p = a.data();
  return goas::Tensor<double>({static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1))},
                              std::vector<double>(p, p + a.size()));
}

std::vector<goas::VideoScore> video_scores(const std::vector<double>& scores, const std::vector<bool>& spoof) {
  if (scores.size() != spoof.size()) {
    throw goas::ValidationError("scores and labels differ in length: " + std::to_string(scores.size()) + " vs " +
                                std::to_string(spoof.size()));
  }
  std::vector<goas::VideoScore> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back(goas::make_video_score("v" + std::to_string(i), scores[i], spoof[i]));
  }
  return out;
}

py::dict record_dict(const goas::VideoRecord& r) {
  py::dict d;
  d["id"] = r.id;
  d["path"] = r.path;
  d["sensor_id"] = r.sensor_id;
  d["medium_id"] = r.medium_id;
  d["object_id"] = r.object_id;
  d["background_id"] = r.background_id;
  d["split"] = goas::to_string(r.split);
  return d;
}

py::dict manifest_dict(const goas::DatasetManifest& m) {
  py::list records;
  for (const auto& r : m.records) records.append(record_dict(r));
  py::dict d;
  d["records"] = records;
  d["num_sensors"] = m.n_c;
  d["num_mediums"] = m.n_m;
  return d;
}

}  // namespace

PYBIND11_MODULE(_goas, m) {
  m.doc() = "Noise-prototype face anti-spoofing toolkit";

  auto error = py::register_exception<goas::Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<goas::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<goas::SchemaError>(m, "SchemaError", validation.ptr());
  py::register_exception<goas::ShapeError>(m, "ShapeError", validation.ptr());
  py::register_exception<goas::IoError>(m, "IoError", error.ptr());
  py::register_exception<goas::DivergenceError>(m, "DivergenceError", error.ptr());

  m.def("version", &goas::cli::version);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = goas::cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");

  m.def(
      "auc", [](const std::vector<double>& s, const std::vector<bool>& y) { return goas::compute_auc(video_scores(s, y)); },
      py::arg("scores"), py::arg("spoof"), "Area under the ROC curve in percent.");
  m.def(
      "eer",
      [](const std::vector<double>& s, const std::vector<bool>& y) {
        const auto r = goas::compute_eer(video_scores(s, y));
        return py::make_tuple(r.eer, r.threshold);
      },
      py::arg("scores"), py::arg("spoof"), "Equal error rate in percent and its threshold.");
  m.def(
      "hter",
      [](const std::vector<double>& dev_s, const std::vector<bool>& dev_y, const std::vector<double>& test_s,
         const std::vector<bool>& test_y) {
        return goas::compute_hter(video_scores(dev_s, dev_y), video_scores(test_s, test_y));
      },
      py::arg("dev_scores"), py::arg("dev_spoof"), py::arg("test_scores"), py::arg("test_spoof"),
      "Half total error rate on the test set at the development-set equal-error threshold, in percent.");
  m.def(
      "roc",
      [](const std::vector<double>& s, const std::vector<bool>& y) {
        py::list points;
        for (const auto& p : goas::compute_roc(video_scores(s, y))) points.append(py::make_tuple(p.threshold, p.far, p.frr));
        return points;
      },
      py::arg("scores"), py::arg("spoof"), "ROC points as (threshold, far, frr) tuples.");

  m.def(
      "sensor_pattern", [](int i, int n, int size, std::uint64_t seed) { return to_numpy(goas::sensor_pattern(i, n, size, seed)); },
      py::arg("index"), py::arg("num_sensors"), py::arg("size"), py::arg("seed"));
  m.def(
      "medium_pattern", [](int i, int size) { return to_numpy(goas::medium_pattern(i, size)); }, py::arg("index"),
      py::arg("size"));
  m.def(
      "log_power_spectrum", [](const Array& a) { return to_numpy(goas::log_power_spectrum(to_map(a))); },
      py::arg("map"));
  m.def(
      "spectral_correlation",
      [](const Array& a, const Array& b) { return goas::spectral_correlation(to_map(a), to_map(b)); }, py::arg("a"),
      py::arg("b"));

  m.def(
      "generate_synthetic_dataset",
      [](const std::filesystem::path& out_dir, int sensors, int mediums, int size, double amplitude, std::uint64_t seed,
         int videos_per_combo, int frames) {
        goas::SyntheticLayout layout;
        layout.videos_per_combo = videos_per_combo;
        layout.frames = frames;
        const auto spec = goas::make_noise_spec(sensors, mediums, size, amplitude, seed);
        return manifest_dict(goas::generate_synthetic_dataset(spec, layout, out_dir));
      },
      py::arg("out_dir"), py::arg("sensors") = 3, py::arg("mediums") = 3, py::arg("size") = 128,
      py::arg("amplitude") = 0.08, py::arg("seed") = 0, py::arg("videos_per_combo") = 2, py::arg("frames") = 4);
  m.def(
      "load_manifest", [](const std::filesystem::path& path) { return manifest_dict(goas::load_manifest(path)); },
      py::arg("path"));
}
