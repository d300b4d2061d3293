#include "holo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "holo/stl.hpp"

namespace holo {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

PointSet::PointSet(std::vector<Vec3> positions) : positions_(std::move(positions)) {
  if (positions_.empty()) throw GeometryError("point set must contain at least one point");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!finite(positions_[i])) {
      throw GeometryError("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

PointSet create_points(const PointSpec& spec) {
  if (spec.count == 0) throw GeometryError("create_points: count must be >= 1");
  const std::optional<double> pinned[3] = {spec.x, spec.y, spec.z};
  for (int axis = 0; axis < 3; ++axis) {
    if (!pinned[axis] && !(spec.min[axis] < spec.max[axis])) {
      throw GeometryError("create_points: inverted bounds on axis " + std::to_string(axis));
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<Vec3> positions(spec.count);
  for (auto& p : positions) {
    for (int axis = 0; axis < 3; ++axis) {
      if (pinned[axis]) {
        p[axis] = *pinned[axis];
      } else {
        std::uniform_real_distribution<double> dist(spec.min[axis], spec.max[axis]);
        p[axis] = dist(rng);
      }
    }
  }
  return PointSet(std::move(positions));
}

PointSet create_points(std::vector<Vec3> explicit_positions) {
  return PointSet(std::move(explicit_positions));
}

TransducerArray::TransducerArray(std::vector<Vec3> positions, std::vector<Vec3> normals,
                                 double p_ref, double element_radius)
    : positions_(std::move(positions)),
      normals_(std::move(normals)),
      p_ref_(p_ref),
      element_radius_(element_radius) {
  if (positions_.empty()) throw GeometryError("transducer array must contain at least one element");
  if (positions_.size() != normals_.size()) {
    throw GeometryError("transducer array: positions and normals differ in length");
  }
  if (!(p_ref_ > 0.0)) throw ConfigError("transducer p_ref must be positive");
  if (!(element_radius_ > 0.0)) throw ConfigError("transducer element radius must be positive");
  for (std::size_t t = 0; t < positions_.size(); ++t) {
    if (!finite(positions_[t]) || !finite(normals_[t])) {
      throw GeometryError("transducer " + std::to_string(t) + " is not finite");
    }
    if (std::abs(normals_[t].norm() - 1.0) > 1e-9) {
      throw GeometryError("transducer " + std::to_string(t) + " normal is not unit length");
    }
  }
}

std::uint64_t TransducerArray::hash() const {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(positions_.size()));
  for (std::size_t t = 0; t < positions_.size(); ++t) {
    for (int a = 0; a < 3; ++a) h.add(positions_[t][a]);
    for (int a = 0; a < 3; ++a) h.add(normals_[t][a]);
  }
  h.add(p_ref_);
  h.add(element_radius_);
  return h.digest();
}

BoardKind parse_board_kind(std::string_view name) {
  if (name == "top") return BoardKind::Top;
  if (name == "bottom") return BoardKind::Bottom;
  if (name == "two-opposed" || name == "both") return BoardKind::TwoOpposed;
  throw ConfigError("unknown board kind '" + std::string(name) + "'");
}

TransducerArray preset_board(BoardKind kind, const BoardConfig& config) {
  if (config.columns < 1 || config.rows < 1) throw ConfigError("board grid must be at least 1x1");
  if (!(config.pitch > 0.0)) throw ConfigError("board pitch must be positive");
  if (!(config.separation > 0.0)) throw ConfigError("board separation must be positive");

  const double half = 0.5 * config.separation;
  auto grid = [&](double z, double nz, std::vector<Vec3>& pos, std::vector<Vec3>& nrm) {
    for (int j = 0; j < config.rows; ++j) {
      for (int i = 0; i < config.columns; ++i) {
        const double x = (i - 0.5 * (config.columns - 1)) * config.pitch;
        const double y = (j - 0.5 * (config.rows - 1)) * config.pitch;
        pos.emplace_back(x, y, z);
        nrm.emplace_back(0.0, 0.0, nz);
      }
    }
  };

  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  if (kind == BoardKind::Top || kind == BoardKind::TwoOpposed) grid(half, -1.0, positions, normals);
  if (kind == BoardKind::Bottom || kind == BoardKind::TwoOpposed) grid(-half, 1.0, positions, normals);
  return TransducerArray(std::move(positions), std::move(normals), config.p_ref, config.element_radius);
}

SurfaceMesh::SurfaceMesh(std::vector<Triangle> triangles, double min_area) {
  triangles_.reserve(triangles.size());
  for (const auto& tri : triangles) {
    const Vec3 cross = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    const double twice_area = cross.norm();
    const bool ok = finite(tri[0]) && finite(tri[1]) && finite(tri[2]) && std::isfinite(twice_area);
    if (!ok || 0.5 * twice_area <= min_area) {
      ++dropped_;
      continue;
    }
    triangles_.push_back(tri);
    centroids_.push_back((tri[0] + tri[1] + tri[2]) / 3.0);
    normals_.push_back(cross / twice_area);
    areas_.push_back(0.5 * twice_area);
  }
}

double SurfaceMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

double SurfaceMesh::max_edge() const {
  double longest = 0.0;
  for (const auto& tri : triangles_) {
    for (int e = 0; e < 3; ++e) longest = std::max(longest, (tri[(e + 1) % 3] - tri[e]).norm());
  }
  return longest;
}

Vec3 SurfaceMesh::bbox_min() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  for (const auto& tri : triangles_)
    for (const auto& v : tri) lo = lo.cwiseMin(v);
  return lo;
}

Vec3 SurfaceMesh::bbox_max() const {
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  for (const auto& tri : triangles_)
    for (const auto& v : tri) hi = hi.cwiseMax(v);
  return hi;
}

Vec3 SurfaceMesh::mean_centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& c : centroids_) sum += c;
  return centroids_.empty() ? sum : Vec3(sum / static_cast<double>(centroids_.size()));
}

std::uint64_t SurfaceMesh::hash() const {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(triangles_.size()));
  for (const auto& tri : triangles_)
    for (const auto& v : tri)
      for (int a = 0; a < 3; ++a) h.add(v[a]);
  return h.digest();
}

SurfaceMesh SurfaceMesh::transformed(double scale, const Vec3& translation) const {
  std::vector<Triangle> out = triangles_;
  for (auto& tri : out)
    for (auto& v : tri) v = v * scale + translation;
  return SurfaceMesh(std::move(out));
}

SurfaceMesh SurfaceMesh::flipped() const {
  std::vector<Triangle> out = triangles_;
  for (auto& tri : out) std::swap(tri[1], tri[2]);
  return SurfaceMesh(std::move(out));
}

SurfaceMesh load_mesh(const std::string& path, const MeshLoadOptions& options) {
  if (!(options.scale > 0.0)) throw ConfigError("mesh scale must be positive");
  SurfaceMesh mesh(stl::read_file(path));
  const std::size_t dropped = mesh.dropped_triangles();
  if (dropped > 0) {
    warn("load_mesh: dropped " + std::to_string(dropped) + " zero-area triangle(s) from " + path);
  }
  if (mesh.empty()) throw GeometryError("mesh '" + path + "' contains no usable triangles");

  if (options.scale != 1.0) mesh = mesh.transformed(options.scale, Vec3::Zero());
  if (options.fit_x_extent) {
    if (!(*options.fit_x_extent > 0.0)) throw ConfigError("fit x-extent must be positive");
    const Vec3 centre = 0.5 * (mesh.bbox_min() + mesh.bbox_max());
    const SurfaceMesh centred = mesh.transformed(1.0, -centre);
    const double half_width = std::max(std::abs(centred.bbox_min().x()), std::abs(centred.bbox_max().x()));
    if (!(half_width > 0.0)) throw GeometryError("mesh has zero x-extent; cannot fit");
    mesh = centred.transformed(*options.fit_x_extent / half_width, Vec3::Zero());
  }
  if (!options.translate.isZero(0.0)) mesh = mesh.transformed(1.0, options.translate);
  return mesh;
}

TransducerArray mesh_to_board(const SurfaceMesh& mesh, bool inward, double p_ref, double element_radius) {
  if (mesh.empty()) throw GeometryError("mesh_to_board: mesh is empty");
  std::vector<Vec3> positions(mesh.centroids().begin(), mesh.centroids().end());
  std::vector<Vec3> normals(mesh.normals().begin(), mesh.normals().end());
  if (inward) {
    for (auto& n : normals) n = -n;
  }
  return TransducerArray(std::move(positions), std::move(normals), p_ref, element_radius);
}

SurfaceMesh make_plate(double size_x, double size_y, int nx, int ny, double height, bool facing_down) {
  if (nx < 1 || ny < 1) throw ConfigError("plate subdivisions must be >= 1");
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  const double dx = size_x / nx;
  const double dy = size_y / ny;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x0 = -0.5 * size_x + i * dx;
      const double y0 = -0.5 * size_y + j * dy;
      const Vec3 a(x0, y0, height), b(x0 + dx, y0, height), c(x0 + dx, y0 + dy, height),
          d(x0, y0 + dy, height);
      if (facing_down) {
        tris.push_back({a, c, b});
        tris.push_back({a, d, c});
      } else {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      }
    }
  }
  return SurfaceMesh(std::move(tris));
}

SurfaceMesh make_box(const Vec3& lo, const Vec3& hi, int subdivisions) {
  if (subdivisions < 1) throw ConfigError("box subdivisions must be >= 1");
  std::vector<Triangle> tris;
  // Each face: fixed axis, sign, and the two in-plane axes ordered so that
  // u x v points outward.
  struct Face {
    int axis;
    bool upper;
    int u;
    int v;
  };
  const Face faces[6] = {{0, false, 2, 1}, {0, true, 1, 2}, {1, false, 0, 2},
                         {1, true, 2, 0},  {2, false, 1, 0}, {2, true, 0, 1}};
  const int n = subdivisions;
  for (const Face& f : faces) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        auto corner = [&](int di, int dj) {
          Vec3 p;
          p[f.axis] = f.upper ? hi[f.axis] : lo[f.axis];
          p[f.u] = lo[f.u] + (hi[f.u] - lo[f.u]) * (i + di) / n;
          p[f.v] = lo[f.v] + (hi[f.v] - lo[f.v]) * (j + dj) / n;
          return p;
        };
        const Vec3 a = corner(0, 0), b = corner(1, 0), c = corner(1, 1), d = corner(0, 1);
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      }
    }
  }
  return SurfaceMesh(std::move(tris));
}

SurfaceMesh make_uv_sphere(const Vec3& centre, double radius, int stacks, int slices) {
  if (stacks < 2 || slices < 3) throw ConfigError("sphere needs stacks >= 2 and slices >= 3");
  auto vertex = [&](int s, int l) {
    const double theta = kPi * s / stacks;
    const double phi = kTwoPi * l / slices;
    return Vec3(centre + radius * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                       std::cos(theta)));
  };
  std::vector<Triangle> tris;
  for (int s = 0; s < stacks; ++s) {
    for (int l = 0; l < slices; ++l) {
      const Vec3 a = vertex(s, l), b = vertex(s + 1, l), c = vertex(s + 1, l + 1), d = vertex(s, l + 1);
      if (s != 0) tris.push_back({a, b, d});
      if (s != stacks - 1) tris.push_back({b, c, d});
    }
  }
  return SurfaceMesh(std::move(tris));
}

}  // namespace holo
