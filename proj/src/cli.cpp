#include "holo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holo/analysis.hpp"
#include "holo/bem.hpp"
#include "holo/bem_cache.hpp"
#include "holo/config_io.hpp"
#include "holo/device_link.hpp"
#include "holo/field_io.hpp"
#include "holo/hologram_io.hpp"
#include "holo/objectives.hpp"
#include "holo/solvers.hpp"

namespace holo::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text, std::string_view flag) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw UsageError(std::string(flag) + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<double> parse_list(std::string_view text, std::string_view flag) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_number(part, flag));
  return out;
}

Vec3 parse_triple(std::string_view text, std::string_view flag) {
  const auto v = parse_list(text, flag);
  if (v.size() != 3) throw UsageError(std::string(flag) + ": expected x,y,z but got '" + std::string(text) + "'");
  return Vec3(v[0], v[1], v[2]);
}

std::vector<Vec3> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open points file '" + path + "'");
  std::vector<Vec3> out;
  std::string line;
  std::size_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (first && !line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])) != 0)) {
      first = false;
      continue;  // header row
    }
    first = false;
    try {
      out.push_back(parse_triple(line, "points file"));
    } catch (const UsageError& e) {
      throw ParseError(path + ": " + e.what(), line_start);
    }
  }
  return out;
}

// Flag groups shared by several subcommands.

struct CommonFlags {
  std::optional<std::string> config;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON settings file (default: $HOLO_CONFIG, else built-in values)");
}

struct BoardFlags {
  std::string board = "bottom";
  std::string mesh;
  bool inward = false;
  double separation = 0.14;
};

void add_board(CLI::App* app, BoardFlags& f) {
  app->add_option("--board", f.board, "Preset board: top, bottom or both")->capture_default_str();
  app->add_option("--board-mesh", f.mesh, "STL whose triangle centroids become transducers (overrides --board)");
  app->add_flag("--inward", f.inward, "Point mesh-derived transducers against the triangle normals");
  app->add_option("--separation", f.separation, "Distance between the two preset boards (m)")->capture_default_str();
}

struct PropagatorFlags {
  std::string kind;
  std::string bem;
  double bem_scale = 1.0;
  std::optional<double> bem_fit_x;
  std::string bem_translate;
  std::string bem_cache;
};

void add_propagator(CLI::App* app, PropagatorFlags& f) {
  app->add_option("--propagator", f.kind, "Field model: piston or bem (default: bem when --bem is given)")
      ->check(CLI::IsMember({"piston", "bem"}));
  app->add_option("--bem", f.bem, "STL of the rigid scatterer");
  app->add_option("--bem-scale", f.bem_scale, "Scale applied to scatterer vertices")->capture_default_str();
  app->add_option("--bem-fit-x", f.bem_fit_x, "Centre the scatterer and scale it to this half-width in x (m)");
  app->add_option("--bem-translate", f.bem_translate, "Scatterer translation x,y,z (m)");
  app->add_option("--bem-cache", f.bem_cache, "File for the solved surface operator (read if it matches, else written)");
}

struct PointFlags {
  std::vector<std::string> points;
  std::string points_file;
};

void add_points(CLI::App* app, PointFlags& f) {
  app->add_option("--points", f.points, "Target point x,y,z in metres (repeatable)");
  app->add_option("--points-file", f.points_file, "CSV of x,y,z rows (optional header)");
}

PointSet gather_points(const PointFlags& f) {
  std::vector<Vec3> pts;
  for (const auto& p : f.points) pts.push_back(parse_triple(p, "--points"));
  if (!f.points_file.empty()) {
    auto more = read_points_file(f.points_file);
    pts.insert(pts.end(), more.begin(), more.end());
  }
  if (pts.empty()) throw UsageError("no points given (use --points or --points-file)");
  return PointSet(std::move(pts));
}

TransducerArray make_board(const BoardFlags& f, const Settings& s) {
  if (!f.mesh.empty()) return mesh_to_board(load_mesh(f.mesh), f.inward, s.p_ref, s.transducer_radius);
  BoardConfig cfg;
  cfg.p_ref = s.p_ref;
  cfg.element_radius = s.transducer_radius;
  cfg.separation = f.separation;
  return preset_board(parse_board_kind(f.board), cfg);
}

std::unique_ptr<Propagator> make_propagator(const PropagatorFlags& f, const TransducerArray& board,
                                            const Settings& s) {
  std::string kind = f.kind.empty() ? (f.bem.empty() ? "piston" : "bem") : f.kind;
  if (kind == "piston") {
    if (!f.bem.empty()) throw UsageError("--bem given together with --propagator piston");
    return std::make_unique<PistonPropagator>(board, s.medium);
  }
  if (f.bem.empty()) throw UsageError("--propagator bem needs --bem <mesh.stl>");
  MeshLoadOptions load;
  load.scale = f.bem_scale;
  load.fit_x_extent = f.bem_fit_x;
  if (!f.bem_translate.empty()) load.translate = parse_triple(f.bem_translate, "--bem-translate");
  const SurfaceMesh mesh = load_mesh(f.bem, load);
  auto op = std::make_shared<const BemOperator>(f.bem_cache.empty() ? bem_build(mesh, board, s.medium)
                                                                    : bem_build_cached(f.bem_cache, mesh, board, s.medium));
  return std::make_unique<BemPropagator>(std::move(op), board, s.medium);
}

ConstraintMode parse_constraint(const std::string& name) {
  if (name == "unit") return ConstraintMode::Unit;
  if (name == "cap") return ConstraintMode::Cap;
  throw UsageError("--constraint must be unit or cap");
}

Hologram load_hologram_for(const std::string& path, const TransducerArray& board, const Settings& s) {
  HologramFile file = read_hologram(path);
  if (file.hologram.size() != static_cast<Eigen::Index>(board.size())) {
    throw ConfigError("hologram has " + std::to_string(file.hologram.size()) + " activations but the board has " +
                      std::to_string(board.size()) + " transducers");
  }
  if (file.hologram.board_hash() != 0 && file.hologram.board_hash() != board.hash()) {
    warn("hologram was solved for a different board (hash " + to_hex(file.hologram.board_hash()) + ")");
  }
  if (std::abs(file.frequency - s.medium.frequency()) > 1e-9 * s.medium.frequency()) {
    warn("hologram frequency " + format_double(file.frequency) + " Hz differs from the configured " +
         format_double(s.medium.frequency()) + " Hz");
  }
  return file.hologram;
}

// solve ---------------------------------------------------------------------

struct SolveFlags {
  CommonFlags common;
  BoardFlags board;
  PropagatorFlags propagator;
  PointFlags points;
  std::string solver;
  std::optional<int> iters;
  std::string amplitudes;
  std::string objective;
  std::string roles;
  double lambda = 0.0;
  double utarget = 0.0;
  double lr = 0.01;
  std::string optimizer = "adam";
  std::uint64_t seed = 0;
  std::string constraint = "unit";
  std::string out;
  std::string loss_trace;
};

int run_solve(const SolveFlags& f, std::ostream& out) {
  const Settings settings = resolve_settings(f.common.config);
  const TransducerArray board = make_board(f.board, settings);
  const PointSet points = gather_points(f.points);
  const auto prop = make_propagator(f.propagator, board, settings);
  const GorkovConstants constants = gorkov_constants(settings.medium, settings.particle);

  std::optional<TargetAmplitudes> targets;
  if (!f.amplitudes.empty()) {
    auto values = parse_list(f.amplitudes, "--amplitudes");
    if (values.size() != points.size()) throw UsageError("--amplitudes needs one value per point");
    targets = TargetAmplitudes(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
  }

  const std::string solver = f.solver.empty() ? (f.objective.empty() ? "ib" : "pgd") : f.solver;
  Hologram hologram;
  if (solver == "pgd") {
    ObjectiveSpec spec;
    spec.objective = parse_objective_kind(f.objective.empty() ? "focus-pressure" : f.objective);
    if (!f.roles.empty()) {
      for (auto r : split(f.roles, ',')) spec.roles.push_back(parse_point_role(r));
    }
    spec.coupling = f.lambda;
    spec.target_potential = f.utarget;
    spec.optimizer = parse_optimizer_kind(f.optimizer);
    spec.learning_rate = f.lr;
    spec.iterations = f.iters.value_or(1000);
    spec.seed = f.seed;
    spec.constraint = parse_constraint(f.constraint);
    spec.gorkov = constants;
    bool needs_gradients = spec.objective != ObjectiveKind::FocusPressure;
    for (PointRole r : spec.roles) needs_gradients |= r != PointRole::Focus;
    const auto inputs = make_objective_inputs(*prop, points, needs_gradients);
    auto result = gradient_descent_solve(spec, inputs, targets);
    hologram = std::move(result.hologram);
    if (!f.loss_trace.empty()) write_loss_trace(f.loss_trace, result.loss_trace);
    out << "objective " << to_string(spec.objective) << ", final loss " << format_double(result.loss_trace.back())
        << "\n";
  } else {
    if (!f.objective.empty()) throw UsageError("--objective requires --solver pgd");
    ProjectiveOptions options;
    options.iterations = f.iters.value_or(100);
    options.constraint = parse_constraint(f.constraint);
    const auto y = targets.value_or(TargetAmplitudes::uniform(static_cast<Eigen::Index>(points.size())));
    hologram = solve_projective(parse_projective_solver(solver), prop->transfer(points), y, options);
  }
  hologram.set_board_hash(board.hash());
  write_hologram(f.out, hologram, settings.medium.frequency());

  const ComplexVector p = propagate(hologram.activations(), prop->transfer(points));
  const auto u = gorkov(hologram.activations(), *prop, points, constants);
  out << std::setprecision(6);
  for (std::size_t n = 0; n < points.size(); ++n) {
    out << "point " << n << " (" << points[n].x() << ", " << points[n].y() << ", " << points[n].z()
        << "): |p| = " << std::abs(p[static_cast<Eigen::Index>(n)]) << " Pa, U = " << u[n] << " J\n";
  }
  out << "wrote " << f.out << "\n";
  return 0;
}

// field ---------------------------------------------------------------------

struct FieldFlags {
  CommonFlags common;
  BoardFlags board;
  PropagatorFlags propagator;
  std::string holo;
  std::string plane = "xz";
  std::string center = "0,0,0";
  std::string size = "0.1,0.1";
  std::string res = "128";
  std::vector<std::string> metrics;
  std::string mode = "analytic";
  double fd_step = 1e-6;
  std::string force_axis = "z";
  std::string out;
  std::string img;
};

int run_field(const FieldFlags& f, std::ostream& out) {
  const auto size = parse_list(f.size, "--size");
  if (size.size() != 2 && size.size() != 1) throw UsageError("--size expects u,v extents");
  const auto res = parse_list(f.res, "--res");
  if (res.size() != 2 && res.size() != 1) throw UsageError("--res expects N or Nu,Nv");
  for (double r : res) {
    if (r != std::floor(r) || r < 2 || r > 1e5) throw UsageError("--res values must be integers >= 2");
  }
  std::vector<Metric> metrics;
  for (const auto& m : f.metrics) {
    for (auto part : split(m, ',')) {
      try {
        metrics.push_back(parse_metric(part));
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
    }
  }
  if (metrics.empty()) metrics.push_back(Metric::Pressure);

  const Settings settings = resolve_settings(f.common.config);
  const TransducerArray board = make_board(f.board, settings);
  const auto prop = make_propagator(f.propagator, board, settings);
  const Hologram hologram = load_hologram_for(f.holo, board, settings);
  const GridSpec spec = GridSpec::plane(f.plane, parse_triple(f.center, "--center"), size.front(), size.back(),
                                        static_cast<int>(res.front()), static_cast<int>(res.back()));
  SampleOptions options;
  options.analysis.mode = parse_derivative_mode(f.mode);
  options.analysis.fd_step = f.fd_step;
  const FieldGrid grid =
      sample_grid(hologram.activations(), *prop, spec, metrics, gorkov_constants(settings.medium, settings.particle),
                  options);
  write_field_csv(f.out, grid);
  out << "wrote " << f.out << " (" << grid.samples.size() << " rows)\n";
  if (!f.img.empty()) {
    const int axis = f.force_axis == "x" ? 0 : f.force_axis == "y" ? 1 : 2;
    write_field_image(f.img, grid, metrics.front(), axis);
    out << "wrote " << f.img << " and " << f.img << ".txt\n";
  }
  return 0;
}

// analyze -------------------------------------------------------------------

struct AnalyzeFlags {
  CommonFlags common;
  BoardFlags board;
  PropagatorFlags propagator;
  PointFlags points;
  std::string holo;
  std::string mode = "analytic";
  double fd_step = 1e-6;
  bool refine = false;
  std::string out;
};

int run_analyze(const AnalyzeFlags& f, std::ostream& out) {
  const Settings settings = resolve_settings(f.common.config);
  const TransducerArray board = make_board(f.board, settings);
  const auto prop = make_propagator(f.propagator, board, settings);
  const Hologram hologram = load_hologram_for(f.holo, board, settings);
  const GorkovConstants constants = gorkov_constants(settings.medium, settings.particle);
  AnalysisOptions options;
  options.mode = parse_derivative_mode(f.mode);
  options.fd_step = f.fd_step;

  PointSet points = gather_points(f.points);
  const ComplexVector& x = hologram.activations();
  if (f.refine) {
    std::vector<Vec3> moved;
    for (const Vec3& p : points) moved.push_back(find_trap_minimum(x, *prop, p, constants, options));
    points = PointSet(std::move(moved));
  }
  const ComplexVector p = propagate(x, prop->transfer(points));
  const auto u = gorkov(x, *prop, points, constants, options);
  const auto force_v = force(x, *prop, points, constants, options);
  const auto k = stiffness(x, *prop, points, constants, options);

  std::string csv = "x,y,z,amplitude,phase,gorkov,fx,fy,fz,stiffness\n";
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Complex pn = p[static_cast<Eigen::Index>(n)];
    const double fields[] = {points[n].x(), points[n].y(), points[n].z(), std::abs(pn), holo::phase(pn), u[n],
                             force_v[n].x(), force_v[n].y(), force_v[n].z(), k[n]};
    for (std::size_t c = 0; c < std::size(fields); ++c) csv += (c ? "," : "") + format_double(fields[c]);
    csv += "\n";
  }
  if (f.out.empty()) {
    out << csv;
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw IoError("cannot write '" + f.out + "'");
    file << csv;
    out << "wrote " << f.out << "\n";
  }
  return 0;
}

// stream --------------------------------------------------------------------

struct StreamFlags {
  CommonFlags common;
  std::string holo;
  std::size_t frames = 1000;
  double rate = 1000.0;
  std::string sink = "loopback";
  int retries = 3;
};

int run_stream(const StreamFlags& f, std::ostream& out) {
  if (!(f.rate >= 1.0 && f.rate <= 10000.0)) throw UsageError("--rate must be within 1..10000 Hz");
  const HologramFile file = read_hologram(f.holo);
  const device::DeviceFrame base = device::quantize(file.hologram);
  std::vector<device::DeviceFrame> frames(f.frames, base);
  for (std::size_t i = 0; i < frames.size(); ++i) frames[i].sequence = static_cast<std::uint32_t>(i);
  device::RetryPolicy policy;
  policy.retries = f.retries;
  auto sink = device::make_sink(f.sink, policy);
  const auto report = device::stream(frames, *sink, f.rate);
  out << std::setprecision(6) << "frames " << report.frames << "\ntarget_rate_hz " << report.target_rate
      << "\nachieved_rate_hz " << report.achieved_rate << "\nmax_jitter_s " << report.max_jitter << "\nframe_bytes "
      << device::encoded_size(base.size()) << "\n";
  return 0;
}

// bench ---------------------------------------------------------------------

struct BenchFlags {
  CommonFlags common;
  BoardFlags board;
  PropagatorFlags propagator;
  std::string holo;
  std::size_t count = 3000;
  int reps = 3;
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
};

int run_bench(const BenchFlags& f, std::ostream& out) {
  if (f.count < 1) throw UsageError("--count must be at least 1");
  if (f.reps < 1) throw UsageError("--reps must be at least 1");
  const Settings settings = resolve_settings(f.common.config);
  const TransducerArray board = make_board(f.board, settings);
  const auto prop = make_propagator(f.propagator, board, settings);
  ComplexVector x;
  if (f.holo.empty()) {
    x = naive(prop->transfer(PointSet({Vec3::Zero()})), TargetAmplitudes::uniform(1)).activations();
  } else {
    x = load_hologram_for(f.holo, board, settings).activations();
  }
  PointSpec spec;
  spec.count = f.count;
  spec.seed = f.seed;
  const PointSet points = create_points(spec);
  const auto r = bench_gorkov(x, *prop, points, gorkov_constants(settings.medium, settings.particle), f.reps,
                              f.fd_step);
  out << std::setprecision(6) << "points " << r.points << "\nrepetitions " << r.repetitions
      << "\nanalytic_seconds_min " << r.analytic.min_seconds << "\nanalytic_seconds_median "
      << r.analytic.median_seconds << "\nfd_seconds_min " << r.finite_difference.min_seconds
      << "\nfd_seconds_median " << r.finite_difference.median_seconds << "\nanalytic_solutions_per_s "
      << r.analytic_rate << "\nfd_solutions_per_s " << r.fd_rate << "\nspeedup " << r.speedup
      << "\nfd_cost_over_propagate " << r.fd_over_propagate << "\nmax_relative_difference "
      << r.max_relative_difference << "\n";
  return 0;
}

// mesh-info -----------------------------------------------------------------

struct MeshInfoFlags {
  CommonFlags common;
  std::string path;
  double scale = 1.0;
  std::optional<double> fit_x;
  std::string translate;
};

int run_mesh_info(const MeshInfoFlags& f, std::ostream& out) {
  const Settings settings = resolve_settings(f.common.config);
  MeshLoadOptions load;
  load.scale = f.scale;
  load.fit_x_extent = f.fit_x;
  if (!f.translate.empty()) load.translate = parse_triple(f.translate, "--translate");
  const SurfaceMesh mesh = load_mesh(f.path, load);
  const Vec3 lo = mesh.bbox_min();
  const Vec3 hi = mesh.bbox_max();
  const double quarter = 0.25 * settings.medium.wavelength();
  out << std::setprecision(6) << "triangles " << mesh.size() << "\ndropped " << mesh.dropped_triangles()
      << "\narea_m2 " << mesh.total_area() << "\nbbox_min " << lo.x() << "," << lo.y() << "," << lo.z()
      << "\nbbox_max " << hi.x() << "," << hi.y() << "," << hi.z() << "\nmax_edge_m " << mesh.max_edge()
      << "\nquarter_wavelength_m " << quarter << "\nresolved " << (mesh.max_edge() <= quarter ? "yes" : "no")
      << "\nhash " << to_hex(mesh.hash()) << "\n";
  return 0;
}

class WarningScope {
 public:
  explicit WarningScope(std::ostream& err)
      : previous_(set_warning_handler([&err](std::string_view m) { err << "warning: " << m << "\n"; })) {}
  ~WarningScope() { set_warning_handler(previous_); }
  WarningScope(const WarningScope&) = delete;
  WarningScope& operator=(const WarningScope&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Acoustic hologram solver and field analysis", "holo"};
  app.require_subcommand(1, 1);

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "Compute a hologram for target points");
  add_common(s, solve.common);
  add_board(s, solve.board);
  add_propagator(s, solve.propagator);
  add_points(s, solve.points);
  s->add_option("--solver", solve.solver, "naive, ib, gspat, wgs or pgd (default: ib, or pgd with --objective)")
      ->check(CLI::IsMember({"naive", "ib", "gspat", "wgs", "pgd"}));
  s->add_option("--iters", solve.iters, "Iterations (default 100, or 1000 for pgd)");
  s->add_option("--amplitudes", solve.amplitudes, "Target amplitude per point, comma separated");
  s->add_option("--objective", solve.objective,
                "pgd loss: focus-pressure, trap-gorkov, pressure-plus-trap or dual-trap-target")
      ->check(CLI::IsMember({"focus-pressure", "trap-gorkov", "pressure-plus-trap", "dual-trap-target"}));
  s->add_option("--roles", solve.roles, "Per-point roles for pgd, comma separated: focus, trap, target");
  s->add_option("--lambda", solve.lambda, "Coupling weight of the second loss term")->capture_default_str();
  s->add_option("--utarget", solve.utarget, "Target Gor'kov potential for targeted traps (J)")->capture_default_str();
  s->add_option("--lr", solve.lr, "pgd learning rate")->capture_default_str();
  s->add_option("--optimizer", solve.optimizer, "pgd step rule: adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}))
      ->capture_default_str();
  s->add_option("--seed", solve.seed, "Seed for the pgd starting phases")->capture_default_str();
  s->add_option("--constraint", solve.constraint, "Transducer constraint: unit or cap")
      ->check(CLI::IsMember({"unit", "cap"}))
      ->capture_default_str();
  s->add_option("--out", solve.out, "Hologram JSON output")->required();
  s->add_option("--loss-trace", solve.loss_trace, "CSV of the pgd loss per iteration");

  FieldFlags field;
  auto* fl = app.add_subcommand("field", "Sample a hologram's field on a plane");
  add_common(fl, field.common);
  add_board(fl, field.board);
  add_propagator(fl, field.propagator);
  fl->add_option("--holo", field.holo, "Hologram JSON")->required();
  fl->add_option("--plane", field.plane, "Sampling plane: xy, xz or yz")
      ->check(CLI::IsMember({"xy", "xz", "yz"}))
      ->capture_default_str();
  fl->add_option("--center", field.center, "Plane centre x,y,z (m)")->capture_default_str();
  fl->add_option("--size", field.size, "Plane extents u,v (m)")->capture_default_str();
  fl->add_option("--res", field.res, "Cells per axis: N or Nu,Nv")->capture_default_str();
  fl->add_option("--metric", field.metrics,
                 "pressure, phase, gorkov, force or stiffness (repeatable or comma separated; default pressure)");
  fl->add_option("--mode", field.mode, "Derivatives: analytic or fd")
      ->check(CLI::IsMember({"analytic", "fd"}))
      ->capture_default_str();
  fl->add_option("--fd-step", field.fd_step, "Finite-difference step (m)")->capture_default_str();
  fl->add_option("--force-axis", field.force_axis, "Force component drawn in the image: x, y or z")
      ->check(CLI::IsMember({"x", "y", "z"}))
      ->capture_default_str();
  fl->add_option("--out", field.out, "Field CSV output")->required();
  fl->add_option("--img", field.img, "P6 image of the first metric (range written to <img>.txt)");

  AnalyzeFlags analyze;
  auto* an = app.add_subcommand("analyze", "Report pressure, potential, force and stiffness at points");
  add_common(an, analyze.common);
  add_board(an, analyze.board);
  add_propagator(an, analyze.propagator);
  add_points(an, analyze.points);
  an->add_option("--holo", analyze.holo, "Hologram JSON")->required();
  an->add_option("--mode", analyze.mode, "Derivatives: analytic or fd")
      ->check(CLI::IsMember({"analytic", "fd"}))
      ->capture_default_str();
  an->add_option("--fd-step", analyze.fd_step, "Finite-difference step (m)")->capture_default_str();
  an->add_flag("--refine", analyze.refine, "Move each point to the nearby minimum of U first");
  an->add_option("--out", analyze.out, "CSV output (default: stdout)");

  StreamFlags stream_f;
  auto* st = app.add_subcommand("stream", "Quantize a hologram and stream device frames");
  add_common(st, stream_f.common);
  st->add_option("--holo", stream_f.holo, "Hologram JSON")->required();
  st->add_option("--frames", stream_f.frames, "Number of frames to send")->capture_default_str();
  st->add_option("--rate", stream_f.rate, "Frame rate in Hz (1..10000)")->capture_default_str();
  st->add_option("--sink", stream_f.sink, "loopback, file:<path> or udp:<host>:<port>")->capture_default_str();
  st->add_option("--retries", stream_f.retries, "Attempts before a sink is declared unreachable")
      ->capture_default_str();

  BenchFlags bench;
  auto* be = app.add_subcommand("bench", "Time analytic against finite-difference Gor'kov evaluation");
  add_common(be, bench.common);
  add_board(be, bench.board);
  add_propagator(be, bench.propagator);
  be->add_option("--holo", bench.holo, "Hologram JSON (default: naive focus at the origin)");
  be->add_option("--count", bench.count, "Random points evaluated one at a time")->capture_default_str();
  be->add_option("--reps", bench.reps, "Timing repetitions")->capture_default_str();
  be->add_option("--seed", bench.seed, "Seed for the random points")->capture_default_str();
  be->add_option("--fd-step", bench.fd_step, "Finite-difference step (m)")->capture_default_str();

  MeshInfoFlags mesh;
  auto* mi = app.add_subcommand("mesh-info", "Summarize an STL mesh");
  add_common(mi, mesh.common);
  mi->add_option("mesh", mesh.path, "STL file")->required();
  mi->add_option("--scale", mesh.scale, "Scale applied to vertices")->capture_default_str();
  mi->add_option("--fit-x", mesh.fit_x, "Centre the mesh and scale it to this half-width in x (m)");
  mi->add_option("--translate", mesh.translate, "Translation x,y,z (m)");

  const WarningScope warnings(err);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*s) return run_solve(solve, out);
    if (*fl) return run_field(field, out);
    if (*an) return run_analyze(analyze, out);
    if (*st) return run_stream(stream_f, out);
    if (*be) return run_bench(bench, out);
    if (*mi) return run_mesh_info(mesh, out);
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace holo::cli
