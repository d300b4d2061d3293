#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "holo/config_io.hpp"
#include "holo/field_io.hpp"
#include "holo/hologram_io.hpp"
#include "holo/objectives.hpp"
#include "support/temp_dir.hpp"

using namespace holo;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

FieldGrid small_grid() {
  const MediumConfig m;
  const PistonPropagator prop(preset_board(BoardKind::Bottom), m);
  const ComplexVector x = random_phases(256, 3);
  return sample_grid(x, prop, GridSpec::plane("xz", Vec3(0, 0, 0.05), 0.02, 0.01, 4, 3),
                     {Metric::Pressure, Metric::Gorkov, Metric::Force}, gorkov_constants(m, ParticleConfig()));
}

}  // namespace

TEST_CASE("field CSV has a header and one parseable row per cell") {
  const FieldGrid grid = small_grid();
  const auto rows = lines(format_field_csv(grid));
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "x,y,z,pressure,gorkov,fx,fy,fz");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream in(rows[i]);
    std::vector<double> values;
    for (std::string cell; std::getline(in, cell, ',');) values.push_back(std::stod(cell));
    REQUIRE(values.size() == 8);
    const FieldSample& s = grid.samples[i - 1];
    // Shortest round-trip text reproduces the doubles exactly.
    CHECK(values[0] == s.position.x());
    CHECK(values[2] == s.position.z());
    CHECK(values[3] == *s.amplitude);
    CHECK(values[4] == *s.gorkov);
    CHECK(values[7] == (*s.force)[2]);
  }
  testing::TempDir dir;
  write_field_csv(dir.file("f.csv"), grid);
  CHECK(slurp(dir.file("f.csv")) == format_field_csv(grid));
  CHECK_THROWS_AS(write_field_csv(dir.file("missing/f.csv"), grid), IoError);
}

TEST_CASE("field images are P6 with a value-range sidecar") {
  const FieldGrid grid = small_grid();
  testing::TempDir dir;
  write_field_image(dir.file("p.ppm"), grid, Metric::Pressure);
  const std::string ppm = slurp(dir.file("p.ppm"));
  const std::string header = "P6\n4 3\n255\n";
  CHECK(ppm.substr(0, header.size()) == header);
  CHECK(ppm.size() == header.size() + 4 * 3 * 3);
  const auto side = lines(slurp(dir.file("p.ppm.txt")));
  REQUIRE(side.size() == 4);
  CHECK(side[0] == "metric pressure");
  CHECK(side[1] == "colormap sequential");
  double lo = 1e300, hi = 0;
  for (const auto& s : grid.samples) {
    lo = std::min(lo, *s.amplitude);
    hi = std::max(hi, *s.amplitude);
  }
  CHECK(std::stod(side[2].substr(4)) == lo);
  CHECK(std::stod(side[3].substr(4)) == hi);

  write_field_image(dir.file("fy.ppm"), grid, Metric::Force, 1);
  const auto fy = lines(slurp(dir.file("fy.ppm.txt")));
  CHECK(fy[0] == "metric fy");
  CHECK(fy[1] == "colormap diverging-symmetric");
}

TEST_CASE("colormaps") {
  CHECK(colormap_for(Metric::Pressure) == Colormap::Sequential);
  CHECK(colormap_for(Metric::Gorkov) == Colormap::Diverging);
  CHECK(colormap_for(Metric::Stiffness) == Colormap::Diverging);
  const auto mid = map_color(Colormap::Diverging, 0.5);
  CHECK(mid[0] == mid[1]);
  CHECK(mid[1] == mid[2]);
  CHECK(mid[0] > 240);
  const auto cold = map_color(Colormap::Diverging, 0.0);
  const auto hot = map_color(Colormap::Diverging, 1.0);
  CHECK(cold[2] > cold[0]);
  CHECK(hot[0] > hot[2]);
  // Sequential brightness increases monotonically.
  int last = -1;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto c = map_color(Colormap::Sequential, t);
    const int sum = c[0] + c[1] + c[2];
    CHECK(sum >= last);
    last = sum;
  }
  CHECK(map_color(Colormap::Sequential, -3.0) == map_color(Colormap::Sequential, 0.0));
  CHECK(map_color(Colormap::Sequential, 7.0) == map_color(Colormap::Sequential, 1.0));
}

TEST_CASE("diverging rasters are symmetric about zero") {
  FieldGrid grid;
  grid.spec = GridSpec::plane("xy", Vec3::Zero(), 1.0, 1.0, 2, 2);
  grid.metrics = {Metric::Gorkov};
  for (double u : {-1.0, 0.0, 3.0, 0.0}) {
    FieldSample s;
    s.gorkov = u;
    grid.samples.push_back(s);
  }
  const Raster r = render_field(grid, Metric::Gorkov);
  CHECK(r.min == -1.0);
  CHECK(r.max == 3.0);
  // Bottom-left cell (v row 0, u col 0) is drawn in the last image row.
  auto pixel = [&](int row, int col) {
    const std::size_t k = 3 * static_cast<std::size_t>(row * r.width + col);
    return std::array<std::uint8_t, 3>{r.rgb[k], r.rgb[k + 1], r.rgb[k + 2]};
  };
  CHECK(pixel(1, 0) == map_color(Colormap::Diverging, (-1.0 + 3.0) / 6.0));
  CHECK(pixel(1, 1) == map_color(Colormap::Diverging, 0.5));
  CHECK(pixel(0, 0) == map_color(Colormap::Diverging, 1.0));
}

TEST_CASE("hologram JSON round-trips exactly") {
  ComplexVector x = random_phases(256, 12);
  x[3] *= 0.25;
  const Hologram h(x, 0xDEADBEEF01234567ULL);
  const std::string text = encode_hologram(h, 40000.0);
  const HologramFile back = decode_hologram(text);
  CHECK(back.hologram.activations() == x);
  CHECK(back.hologram.board_hash() == h.board_hash());
  CHECK(back.frequency == 40000.0);
  CHECK(encode_hologram(back.hologram, back.frequency) == text);
  CHECK(text.find("\"version\": 1") != std::string::npos);
  CHECK(text.find("\"board_hash\": \"deadbeef01234567\"") != std::string::npos);

  testing::TempDir dir;
  write_hologram(dir.file("h.json"), h, 40000.0);
  CHECK(read_hologram(dir.file("h.json")).hologram.activations() == x);
  CHECK_THROWS_AS(read_hologram(dir.file("absent.json")), IoError);
}

TEST_CASE("malformed hologram JSON is a parse error") {
  CHECK_THROWS_AS(decode_hologram("{"), ParseError);
  CHECK_THROWS_AS(decode_hologram("[]"), ParseError);
  CHECK_THROWS_AS(decode_hologram(R"({"version":2,"board_hash":"0","frequency":40000,"transducers":1,"activations":[[1,0]]})"),
                  ParseError);
  CHECK_THROWS_AS(decode_hologram(R"({"version":1,"board_hash":"0","frequency":40000,"transducers":2,"activations":[[1,0]]})"),
                  ParseError);
  CHECK_THROWS_AS(decode_hologram(R"({"version":1,"board_hash":"0","frequency":40000,"transducers":1,"activations":[[1]]})"),
                  ParseError);
  CHECK_THROWS_AS(decode_hologram(R"({"version":1,"board_hash":"zz","frequency":40000,"transducers":1,"activations":[[1,0]]})"),
                  ParseError);
  try {
    decode_hologram("{\"version\": x}");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
  }
}

TEST_CASE("loss trace CSV") {
  testing::TempDir dir;
  write_loss_trace(dir.file("loss.csv"), {3.5, -0.25, 1e-20});
  CHECK(slurp(dir.file("loss.csv")) == "iteration,loss\n0,3.5\n1,-0.25\n2,1e-20\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("settings files override defaults key by key") {
  const Settings d = parse_settings("{}");
  CHECK(d.medium.frequency() == 40000.0);
  CHECK(d.medium.sound_speed() == 343.0);
  CHECK(d.p_ref == 8.02);
  const Settings s = parse_settings(
      R"({"frequency": 25000, "c0": 346, "rho0": 1.18, "particle_radius": 0.0005, "c_p": 1000, "rho_p": 50,
          "p_ref": 5.0, "transducer_radius": 0.004})");
  CHECK(s.medium.frequency() == 25000.0);
  CHECK(s.medium.sound_speed() == 346.0);
  CHECK(s.medium.density() == 1.18);
  CHECK(s.particle.radius() == 0.0005);
  CHECK(s.particle.sound_speed() == 1000.0);
  CHECK(s.particle.density() == 50.0);
  CHECK(s.p_ref == 5.0);
  CHECK(s.transducer_radius == 0.004);
  CHECK_THROWS_AS(parse_settings(R"({"freq": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_settings(R"({"c0": "fast"})"), ConfigError);
  CHECK_THROWS_AS(parse_settings(R"({"c0": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_settings("{,}"), ParseError);
}

TEST_CASE("settings resolve from an explicit path, then the environment") {
  testing::TempDir dir;
  {
    std::ofstream(dir.file("a.json")) << R"({"c0": 346})";
    std::ofstream(dir.file("b.json")) << R"({"c0": 340})";
  }
  ::unsetenv(kConfigEnvVar);
  CHECK(resolve_settings(std::nullopt).medium.sound_speed() == 343.0);
  ::setenv(kConfigEnvVar, dir.file("b.json").c_str(), 1);
  CHECK(resolve_settings(std::nullopt).medium.sound_speed() == 340.0);
  CHECK(resolve_settings(dir.file("a.json")).medium.sound_speed() == 346.0);
  ::unsetenv(kConfigEnvVar);
  CHECK_THROWS_AS(load_settings(dir.file("none.json")), IoError);
}
