#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "holo/analysis.hpp"

namespace holo {

/// CSV with header x,y,z,<metric columns...>, one row per cell, v outer.
std::string format_field_csv(const FieldGrid& grid);
void write_field_csv(const std::string& path, const FieldGrid& grid);

enum class Colormap {
  Sequential,  // black -> purple -> orange -> pale yellow, for amplitudes
  Diverging,   // blue -> white -> red, centred on zero, for signed values
};

/// Default map for a metric: sequential for pressure, diverging otherwise.
Colormap colormap_for(Metric metric);
std::array<std::uint8_t, 3> map_color(Colormap map, double t);

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // top row first
  Colormap colormap = Colormap::Sequential;
  double min = 0.0;
  double max = 0.0;
};

/// Renders one metric (or force component) with the highest v row at the top.
/// Diverging maps use a range symmetric about zero.
Raster render_field(const FieldGrid& grid, Metric metric, int component = 0);
std::string encode_ppm(const Raster& raster);

/// Writes the P6 image and a sidecar `<path>.txt` listing metric, colormap and value range.
void write_field_image(const std::string& path, const FieldGrid& grid, Metric metric, int component = 0);

}  // namespace holo
