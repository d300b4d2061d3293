#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "holo/core.hpp"

namespace holo {

/// Target or field positions in meters.
class PointSet {
 public:
  explicit PointSet(std::vector<Vec3> positions);

  std::size_t size() const noexcept { return positions_.size(); }
  const Vec3& operator[](std::size_t i) const { return positions_[i]; }
  std::span<const Vec3> positions() const noexcept { return positions_; }

  auto begin() const { return positions_.begin(); }
  auto end() const { return positions_.end(); }

 private:
  std::vector<Vec3> positions_;
};

/// Random or partially pinned point generation. Unpinned axes are drawn
/// uniformly from [min, max]; pinned axes take the fixed value.
struct PointSpec {
  std::size_t count = 1;
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> z;
  Vec3 min = Vec3::Constant(-0.04);
  Vec3 max = Vec3::Constant(0.04);
  std::uint64_t seed = 0;
};

PointSet create_points(const PointSpec& spec);
PointSet create_points(std::vector<Vec3> explicit_positions);

/// Emitting elements. Every normal is unit length.
class TransducerArray {
 public:
  TransducerArray(std::vector<Vec3> positions, std::vector<Vec3> normals, double p_ref,
                  double element_radius);

  std::size_t size() const noexcept { return positions_.size(); }
  const Vec3& position(std::size_t t) const { return positions_[t]; }
  const Vec3& normal(std::size_t t) const { return normals_[t]; }
  std::span<const Vec3> positions() const noexcept { return positions_; }
  std::span<const Vec3> normals() const noexcept { return normals_; }
  double p_ref() const noexcept { return p_ref_; }
  double element_radius() const noexcept { return element_radius_; }

  /// Fingerprint over geometry and emission parameters.
  std::uint64_t hash() const;

 private:
  std::vector<Vec3> positions_;
  std::vector<Vec3> normals_;
  double p_ref_;
  double element_radius_;
};

enum class BoardKind { Top, Bottom, TwoOpposed };

BoardKind parse_board_kind(std::string_view name);

struct BoardConfig {
  int columns = 16;
  int rows = 16;
  double pitch = 0.0105;
  double element_radius = 0.0045;
  double p_ref = 8.02;
  /// Distance between the two opposed boards; each sits at z = +-separation/2.
  double separation = 0.14;
};

/// 16x16 grids: bottom faces +z at z = -separation/2, top faces -z at
/// z = +separation/2, two-opposed concatenates top then bottom.
TransducerArray preset_board(BoardKind kind, const BoardConfig& config = {});

using Triangle = std::array<Vec3, 3>;

/// Triangulated surface with per-element centroid, unit normal (right-hand
/// winding) and area. Zero-area triangles are dropped at construction.
class SurfaceMesh {
 public:
  explicit SurfaceMesh(std::vector<Triangle> triangles, double min_area = 1e-18);

  std::size_t size() const noexcept { return triangles_.size(); }
  bool empty() const noexcept { return triangles_.empty(); }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const Vec3& centroid(std::size_t i) const { return centroids_[i]; }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  double area(std::size_t i) const { return areas_[i]; }
  std::span<const Vec3> centroids() const noexcept { return centroids_; }
  std::span<const Vec3> normals() const noexcept { return normals_; }
  std::span<const double> areas() const noexcept { return areas_; }
  std::size_t dropped_triangles() const noexcept { return dropped_; }

  double total_area() const;
  /// Longest triangle edge.
  double max_edge() const;
  Vec3 bbox_min() const;
  Vec3 bbox_max() const;
  Vec3 mean_centroid() const;
  std::uint64_t hash() const;

  SurfaceMesh transformed(double scale, const Vec3& translation) const;
  SurfaceMesh flipped() const;

 private:
  std::vector<Triangle> triangles_;
  std::vector<Vec3> centroids_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  std::size_t dropped_ = 0;
};

struct MeshLoadOptions {
  double scale = 1.0;
  /// Centre on the bounding box and rescale so max |x| over vertices equals this value.
  std::optional<double> fit_x_extent;
  Vec3 translate = Vec3::Zero();
};

SurfaceMesh load_mesh(const std::string& path, const MeshLoadOptions& options = {});

/// Transducer at every element centroid, normal along the element normal
/// (reversed when inward is set).
TransducerArray mesh_to_board(const SurfaceMesh& mesh, bool inward, double p_ref = 8.02,
                              double element_radius = 0.0045);

/// Rectangular plate in the plane z = height, split into 2*nx*ny triangles,
/// normals +z (or -z when facing_down).
SurfaceMesh make_plate(double size_x, double size_y, int nx, int ny, double height = 0.0,
                       bool facing_down = false);
/// Axis-aligned box with outward normals, each face split into n*n*2 triangles.
SurfaceMesh make_box(const Vec3& lo, const Vec3& hi, int subdivisions = 1);
/// Latitude/longitude sphere with outward normals.
SurfaceMesh make_uv_sphere(const Vec3& centre, double radius, int stacks, int slices);

}  // namespace holo
