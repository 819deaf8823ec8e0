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

#include "goas/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "goas/error.hpp"

namespace goas {

namespace {

using Color = std::array<std::uint8_t, 3>;

void fill(RgbImage& image, Color color) {
  for (std::size_t i = 0; i < image.pixels.size(); i += 3) {
    image.pixels[i] = color[0];
    image.pixels[i + 1] = color[1];
    image.pixels[i + 2] = color[2];
  }
}

void put(RgbImage& image, int x, int y, Color color) {
  if (x < 0 || y < 0 || x >= image.width || y >= image.height) return;
  for (int c = 0; c < 3; ++c) image.at(y, x, c) = color[c];
}

void line(RgbImage& image, int x0, int y0, int x1, int y1, Color color, int thickness = 1) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  const int r = thickness / 2;
  while (true) {
    for (int oy = -r; oy <= r; ++oy) {
      for (int ox = -r; ox <= r; ++ox) put(image, x0 + ox, y0 + oy, color);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

Color palette_color(int index) {
  static constexpr Color kPalette[] = {{31, 119, 180}, {214, 39, 40},  {44, 160, 44},  {255, 127, 14},
                                       {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {23, 190, 207}};
  return kPalette[static_cast<std::size_t>(index) % std::size(kPalette)];
}

RgbImage render_roc_plot(const std::vector<RocCurve>& curves, int size) {
  if (size < 64) throw ValidationError("ROC plot size must be at least 64 pixels");
  RgbImage image(size, size);
  fill(image, {255, 255, 255});
  const int margin = size / 10;
  const int span = size - 2 * margin;
  auto px = [&](double x) { return margin + static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * span)); };
  auto py = [&](double y) { return size - margin - static_cast<int>(std::lround(std::clamp(y, 0.0, 1.0) * span)); };
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    line(image, px(t), py(0), px(t), py(1), {225, 225, 225});
    line(image, px(0), py(t), px(1), py(t), {225, 225, 225});
  }
  line(image, px(0), py(0), px(1), py(1), {170, 170, 170});
  line(image, px(0), py(0), px(1), py(0), {0, 0, 0}, 2);
  line(image, px(0), py(0), px(0), py(1), {0, 0, 0}, 2);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& pts = curves[c].points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      line(image, px(pts[i - 1].frr), py(1.0 - pts[i - 1].far), px(pts[i].frr), py(1.0 - pts[i].far),
           palette_color(static_cast<int>(c)), 2);
    }
  }
  return image;
}

RgbImage render_heatmap(const std::vector<std::vector<double>>& matrix, int cell) {
  if (matrix.empty() || cell < 1) throw ValidationError("heatmap needs a non-empty matrix and positive cell size");
  const int rows = static_cast<int>(matrix.size());
  const int cols = static_cast<int>(matrix.front().size());
  RgbImage image(rows * cell, cols * cell);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(matrix[r].size()) != cols) throw ShapeError("heatmap rows differ in length");
    for (int c = 0; c < cols; ++c) {
      const double v = std::clamp(matrix[r][c], 0.0, 1.0);
      const Color color{to_byte(1.0 - 0.9 * v), to_byte(1.0 - 0.7 * v), to_byte(1.0 - 0.3 * v)};
      for (int y = 0; y < cell; ++y) {
        for (int x = 0; x < cell; ++x) {
          const bool border = y == 0 || x == 0;
          put(image, c * cell + x, r * cell + y, border ? Color{200, 200, 200} : color);
        }
      }
    }
  }
  return image;
}

RgbImage render_map_grid(const std::vector<std::vector<Tensor<double>>>& rows, int gap) {
  if (rows.empty()) throw ValidationError("map grid needs at least one row");
  int tile_h = 0, tile_w = 0, cols = 0;
  for (const auto& row : rows) {
    cols = std::max(cols, static_cast<int>(row.size()));
    for (const auto& m : row) {
      if (m.rank() != 2) throw ShapeError("map grid tiles must be H x W");
      tile_h = std::max(tile_h, m.dim(0));
      tile_w = std::max(tile_w, m.dim(1));
    }
  }
  if (cols == 0) throw ValidationError("map grid has no tiles");
  const int n_rows = static_cast<int>(rows.size());
  RgbImage image(n_rows * tile_h + (n_rows + 1) * gap, cols * tile_w + (cols + 1) * gap);
  fill(image, {255, 255, 255});
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < static_cast<int>(rows[r].size()); ++c) {
      const auto& m = rows[r][c];
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (double v : m.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double scale = hi > lo ? 1.0 / (hi - lo) : 0.0;
      const int top = gap + r * (tile_h + gap), left = gap + c * (tile_w + gap);
      for (int y = 0; y < m.dim(0); ++y) {
        for (int x = 0; x < m.dim(1); ++x) {
          const std::uint8_t g = to_byte(hi > lo ? (m.at(y, x) - lo) * scale : 0.5);
          put(image, left + x, top + y, {g, g, g});
        }
      }
    }
  }
  return image;
}

}  // namespace goas
