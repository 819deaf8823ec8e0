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

#include <array>
#include <string>
#include <vector>

#include "goas/evaluation.hpp"
#include "goas/image_io.hpp"
#include "goas/tensor.hpp"

namespace goas {

struct RocCurve {
  std::string label;
  std::vector<RocPoint> points;
};

// Square ROC plot: x = live rejection rate (FRR), y = spoof detection rate
// (1 - FAR). Draws a light grid, the chance diagonal and one colored polyline per curve.
RgbImage render_roc_plot(const std::vector<RocCurve>& curves, int size = 400);

// Row-normalized matrix as a grid of cells, white (0) to dark blue (1).
RgbImage render_heatmap(const std::vector<std::vector<double>>& matrix, int cell = 32);

// Grayscale tiles, each map min-max normalized on its own, laid out in rows.
RgbImage render_map_grid(const std::vector<std::vector<Tensor<double>>>& rows, int gap = 4);

std::array<std::uint8_t, 3> palette_color(int index);

}  // namespace goas
