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

#pragma once

#include <functional>

#include "goas/tensor.hpp"

namespace goas {

// Squared magnitude of the 2-D DFT of an H x W map, with the zero-frequency
// bin moved to (H/2, W/2).
Tensor<double> fft_power_spectrum(const Tensor<double>& map);

// log(1 + power), for rendering.
Tensor<double> log_power_spectrum(const Tensor<double>& map);

// Pearson correlation of the two power spectra with the DC bin excluded.
// Throws ValidationError when either spectrum has zero variance.
double spectral_correlation(const Tensor<double>& a, const Tensor<double>& b);

// Multiplies the DFT of a real map by gain(fy, fx), with signed frequencies in
// cycles per pixel, and returns the real part of the inverse transform.
Tensor<double> filter_spectrum(const Tensor<double>& map, const std::function<double(double, double)>& gain);

}  // namespace goas
