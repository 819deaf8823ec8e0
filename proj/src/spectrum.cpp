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

#include "goas/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace goas {
namespace {

// fftw's planner is not reentrant.
std::mutex g_plan_mutex;

void require_map(const Tensor<double>& map, const char* who) {
  if (map.rank() != 2 || map.empty()) {
    throw ShapeError(std::string(who) + ": expected a non-empty H x W map, got " + shape_string(map.shape()));
  }
  if (!map.all_finite()) throw ValidationError(std::string(who) + ": map contains non-finite values");
}

}  // namespace

Tensor<double> fft_power_spectrum(const Tensor<double>& map) {
  require_map(map, "fft_power_spectrum");
  const int h = map.dim(0), w = map.dim(1);
  const std::size_t n = static_cast<std::size_t>(h) * w;
  auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    plan = fftw_plan_dft_2d(h, w, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buffer[i][0] = map[i];
    buffer[i][1] = 0.0;
  }
  fftw_execute(plan);
  Tensor<double> power({h, w});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& c = buffer[static_cast<std::size_t>(y) * w + x];
      power.at((y + h / 2) % h, (x + w / 2) % w) = c[0] * c[0] + c[1] * c[1];
    }
  }
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(buffer);
  return power;
}

Tensor<double> filter_spectrum(const Tensor<double>& map, const std::function<double(double, double)>& gain) {
  require_map(map, "filter_spectrum");
  const int h = map.dim(0), w = map.dim(1);
  const std::size_t n = static_cast<std::size_t>(h) * w;
  auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_plan forward, inverse;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    forward = fftw_plan_dft_2d(h, w, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_2d(h, w, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buffer[i][0] = map[i];
    buffer[i][1] = 0.0;
  }
  fftw_execute(forward);
  for (int y = 0; y < h; ++y) {
    const double fy = static_cast<double>(y <= h / 2 ? y : y - h) / h;
    for (int x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x <= w / 2 ? x : x - w) / w;
      const double g = gain(fy, fx);
      auto& c = buffer[static_cast<std::size_t>(y) * w + x];
      c[0] *= g;
      c[1] *= g;
    }
  }
  fftw_execute(inverse);
  Tensor<double> out({h, w});
  for (std::size_t i = 0; i < n; ++i) out[i] = buffer[i][0] / static_cast<double>(n);
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  fftw_free(buffer);
  return out;
}

Tensor<double> log_power_spectrum(const Tensor<double>& map) {
  Tensor<double> power = fft_power_spectrum(map);
  for (auto& v : power.values()) v = std::log1p(v);
  return power;
}

double spectral_correlation(const Tensor<double>& a, const Tensor<double>& b) {
  a.require_same_shape(b, "spectral_correlation");
  const Tensor<double> pa = fft_power_spectrum(a);
  const Tensor<double> pb = fft_power_spectrum(b);
  const int h = a.dim(0), w = a.dim(1);
  const std::size_t dc = static_cast<std::size_t>(h / 2) * w + w / 2;
  const std::size_t n = pa.size() - 1;
  if (n < 2) throw ValidationError("spectral_correlation: map too small");
  double mean_a = 0, mean_b = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (i == dc) continue;
    mean_a += pa[i];
    mean_b += pb[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double cov = 0, var_a = 0, var_b = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (i == dc) continue;
    const double da = pa[i] - mean_a, db = pb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  // Round-off leaves ~1e-16 relative energy in the bins of a constant map.
  const double floor_a = 1e-24 * pa[dc] * pa[dc] * static_cast<double>(n);
  const double floor_b = 1e-24 * pb[dc] * pb[dc] * static_cast<double>(n);
  if (var_a <= floor_a || var_b <= floor_b) {
    throw ValidationError("spectral_correlation: power spectrum has zero variance");
  }
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

}  // namespace goas
