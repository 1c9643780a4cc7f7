#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsi/types.hpp"

namespace fsi {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundaryEdge {
  std::array<int, 2> vertices;
  int marker = 0;
};

struct BoundingBox {
  Point min = Point::Constant(std::numeric_limits<Real>::infinity());
  Point max = Point::Constant(-std::numeric_limits<Real>::infinity());

  void extend(const Point& p)
  {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool contains(const Point& p, Real eps = 0) const
  {
    return (p.array() >= min.array() - eps).all() && (p.array() <= max.array() + eps).all();
  }
  bool intersects(const BoundingBox& o) const
  {
    return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
  }
  Real diameter() const { return (max - min).norm(); }
};

/// Conforming, counter-clockwise triangulation with tagged boundary edges.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  const Point& vertex(int t, int k) const { return vertices[triangles[t][k]]; }
  Real area(int t) const { return signed_area(vertex(t, 0), vertex(t, 1), vertex(t, 2)); }
  Real diameter(int t) const;
  Real max_diameter() const;
  Real total_area() const;
  BoundingBox bounding_box() const;
  BoundingBox bounding_box(int t) const;

  /// Sorted vertex ids lying on edges with the given marker.
  std::vector<int> boundary_vertices(int marker) const;

  /// Throws MeshError when orientation, conformity or boundary tagging is broken.
  void validate() const;
};

/// A coarse mesh and its uniform midpoint refinement.
struct RefinedPair {
  /// A fine vertex is either a coarse vertex (a == b) or the midpoint of coarse edge (a, b).
  struct Origin {
    int a = -1;
    int b = -1;
  };

  TriMesh coarse;
  TriMesh fine;
  std::vector<int> parent;       // fine triangle -> coarse triangle
  std::vector<Origin> midpoint_of;  // fine vertex -> origin in coarse mesh
};

namespace markers {
// unit square
inline constexpr int bottom = 1;
inline constexpr int right = 2;
inline constexpr int top = 3;
inline constexpr int left = 4;
// annulus sector
inline constexpr int sector_x_axis = 1;
inline constexpr int outer_arc = 2;
inline constexpr int sector_y_axis = 3;
inline constexpr int inner_arc = 4;
// disk
inline constexpr int circle = 1;
}  // namespace markers

RefinedPair refine(const TriMesh& mesh);

/// M x M squares, each cut by the (i,j)-(i+1,j+1) diagonal, then refined once.
RefinedPair build_unit_square_mesh(int M);

/// Polar grid on [r_in, r_out] x [0, pi/2].
TriMesh build_annulus_quarter_mesh(Real r_in, Real r_out, int n_r, int n_theta);

/// Concentric rings, ring k carrying 6k vertices, stitched into a center fan.
TriMesh build_disk_mesh(const Point& center, Real diameter, int n);

/// Area of the inscribed polygon produced by build_disk_mesh.
Real disk_mesh_area(Real diameter, int n);

/// Area of the polygonal annulus sector produced by build_annulus_quarter_mesh.
Real annulus_mesh_area(Real r_in, Real r_out, int n_theta);

struct Location {
  int triangle = -1;
  Vec3<Real> bary = Vec3<Real>::Zero();
};

/// Point location over a uniform background grid of bins.
///
/// Keeps a reference to the mesh, which must outlive the locator. Queries return
/// the lowest-id triangle whose barycentric coordinates are all >= -tolerance.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh, Real bin_factor = 2.0);

  std::optional<Location> locate(const Point& p) const;

  const TriMesh& mesh() const { return *mesh_; }
  Real tolerance() const { return eps_geo_; }
  int bins_x() const { return nx_; }
  int bins_y() const { return ny_; }

 private:
  bool inside(int t, const Point& p, Vec3<Real>& bary) const;

  const TriMesh* mesh_;
  BoundingBox box_;
  Real eps_geo_ = 0;
  Real bin_size_ = 1;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<int> bin_start_;
  std::vector<int> bin_items_;
};

/// Legacy-VTK ASCII unstructured grid with optional point and cell fields.
struct VtkField {
  std::string name;
  int components = 1;  // 1 or 2 (written as 3-vectors)
  const Vector* values = nullptr;
};

void write_vtk(std::ostream& os, const TriMesh& mesh, const std::vector<VtkField>& point_data = {},
               const std::vector<VtkField>& cell_data = {}, const std::string& title = "fsi-dlm");

}  // namespace fsi
