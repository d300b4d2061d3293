#include "holo/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "holo/hologram_io.hpp"

namespace holo {

namespace {

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

struct Stop {
  double t;
  double r, g, b;
};

// Sampled from a perceptually ordered dark-to-light ramp.
constexpr Stop kSequential[] = {
    {0.00, 0, 0, 4},       {0.25, 87, 16, 110},  {0.50, 188, 55, 84},
    {0.75, 249, 142, 9},   {1.00, 252, 255, 164},
};

constexpr Stop kDiverging[] = {
    {0.00, 5, 48, 97},     {0.25, 67, 147, 195}, {0.50, 247, 247, 247},
    {0.75, 214, 96, 77},   {1.00, 103, 0, 31},
};

template <std::size_t N>
std::array<std::uint8_t, 3> interpolate(const Stop (&stops)[N], double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  std::size_t i = 1;
  while (i < N - 1 && t > stops[i].t) ++i;
  const Stop& a = stops[i - 1];
  const Stop& b = stops[i];
  const double f = (t - a.t) / (b.t - a.t);
  auto channel = [f](double x, double y) { return static_cast<std::uint8_t>(std::lround(x + f * (y - x))); };
  return {channel(a.r, b.r), channel(a.g, b.g), channel(a.b, b.b)};
}

}  // namespace

std::string format_field_csv(const FieldGrid& grid) {
  std::string out = "x,y,z";
  for (Metric m : grid.metrics) {
    for (auto col : metric_columns(m)) {
      out += ',';
      out += col;
    }
  }
  out += '\n';
  for (std::size_t n = 0; n < grid.samples.size(); ++n) {
    const Vec3& p = grid.samples[n].position;
    out += format_double(p.x()) + ',' + format_double(p.y()) + ',' + format_double(p.z());
    for (Metric m : grid.metrics) {
      const int components = m == Metric::Force ? 3 : 1;
      for (int c = 0; c < components; ++c) out += ',' + format_double(grid.value(n, m, c));
    }
    out += '\n';
  }
  return out;
}

void write_field_csv(const std::string& path, const FieldGrid& grid) { write_bytes(path, format_field_csv(grid)); }

Colormap colormap_for(Metric metric) {
  return metric == Metric::Pressure ? Colormap::Sequential : Colormap::Diverging;
}

std::array<std::uint8_t, 3> map_color(Colormap map, double t) {
  return map == Colormap::Sequential ? interpolate(kSequential, t) : interpolate(kDiverging, t);
}

Raster render_field(const FieldGrid& grid, Metric metric, int component) {
  Raster r;
  r.width = grid.spec.u_cells;
  r.height = grid.spec.v_cells;
  r.colormap = colormap_for(metric);
  std::vector<double> values(grid.samples.size());
  for (std::size_t n = 0; n < values.size(); ++n) values[n] = grid.value(n, metric, component);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  r.min = *lo;
  r.max = *hi;

  double offset = r.min;
  double span = r.max - r.min;
  if (r.colormap == Colormap::Diverging) {
    const double bound = std::max(std::abs(r.min), std::abs(r.max));
    offset = -bound;
    span = 2.0 * bound;
  }
  r.rgb.resize(3 * values.size());
  std::size_t k = 0;
  for (int row = r.height - 1; row >= 0; --row) {
    for (int col = 0; col < r.width; ++col) {
      const double v = values[static_cast<std::size_t>(row) * static_cast<std::size_t>(r.width) +
                              static_cast<std::size_t>(col)];
      const double t = span > 0.0 ? (v - offset) / span : 0.5;
      const auto rgb = map_color(r.colormap, t);
      r.rgb[k++] = rgb[0];
      r.rgb[k++] = rgb[1];
      r.rgb[k++] = rgb[2];
    }
  }
  return r;
}

std::string encode_ppm(const Raster& raster) {
  std::string out = "P6\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(raster.rgb.data()), raster.rgb.size());
  return out;
}

void write_field_image(const std::string& path, const FieldGrid& grid, Metric metric, int component) {
  const Raster raster = render_field(grid, metric, component);
  write_bytes(path, encode_ppm(raster));
  std::string label(to_string(metric));
  if (metric == Metric::Force) label = std::string(metric_columns(metric)[static_cast<std::size_t>(component)]);
  std::string side = "metric " + label + "\n";
  side += raster.colormap == Colormap::Sequential ? "colormap sequential\n" : "colormap diverging-symmetric\n";
  side += "min " + format_double(raster.min) + "\nmax " + format_double(raster.max) + "\n";
  write_bytes(path + ".txt", side);
}

}  // namespace holo
