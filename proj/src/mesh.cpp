#include "fsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

namespace fsi {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

Real TriMesh::diameter(int t) const
{
  const Point& a = vertex(t, 0);
  const Point& b = vertex(t, 1);
  const Point& c = vertex(t, 2);
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

Real TriMesh::max_diameter() const
{
  Real h = 0;
  for (int t = 0; t < num_triangles(); ++t) h = std::max(h, diameter(t));
  return h;
}

Real TriMesh::total_area() const
{
  Real s = 0;
  for (int t = 0; t < num_triangles(); ++t) s += area(t);
  return s;
}

BoundingBox TriMesh::bounding_box() const
{
  BoundingBox b;
  for (const auto& v : vertices) b.extend(v);
  return b;
}

BoundingBox TriMesh::bounding_box(int t) const
{
  BoundingBox b;
  for (int k = 0; k < 3; ++k) b.extend(vertex(t, k));
  return b;
}

std::vector<int> TriMesh::boundary_vertices(int marker) const
{
  std::set<int> ids;
  for (const auto& e : boundary_edges) {
    if (e.marker == marker) ids.insert(e.vertices.begin(), e.vertices.end());
  }
  return {ids.begin(), ids.end()};
}

void TriMesh::validate() const
{
  std::map<EdgeKey, int> edge_count;
  for (int t = 0; t < num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = triangles[t][k];
      if (v < 0 || v >= num_vertices()) throw MeshError("triangle references missing vertex");
    }
    if (!(area(t) > 0)) throw MeshError("triangle " + std::to_string(t) + " is not counter-clockwise");
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(triangles[t][k], triangles[t][(k + 1) % 3])];
  }
  std::map<EdgeKey, int> tagged;
  for (const auto& e : boundary_edges) ++tagged[edge_key(e.vertices[0], e.vertices[1])];
  for (const auto& [key, n] : edge_count) {
    if (n > 2) throw MeshError("edge shared by more than two triangles");
    const bool is_boundary = (n == 1);
    const auto it = tagged.find(key);
    const int tags = it == tagged.end() ? 0 : it->second;
    if (is_boundary && tags != 1) throw MeshError("boundary edge without exactly one marker");
    if (!is_boundary && tags != 0) throw MeshError("interior edge carries a boundary marker");
  }
  if (tagged.size() != boundary_edges.size()) throw MeshError("duplicate boundary edge");
  for (const auto& [key, n] : tagged) {
    if (!edge_count.count(key)) throw MeshError("boundary edge not in any triangle");
  }
}

RefinedPair refine(const TriMesh& mesh)
{
  RefinedPair pair;
  pair.coarse = mesh;
  TriMesh& fine = pair.fine;
  fine.vertices = mesh.vertices;
  pair.midpoint_of.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) pair.midpoint_of[v] = {v, v};

  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto [it, inserted] = midpoint.try_emplace(key, fine.num_vertices());
    if (inserted) {
      fine.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
      pair.midpoint_of.push_back({key.first, key.second});
    }
    return it->second;
  };

  fine.triangles.reserve(4 * mesh.triangles.size());
  pair.parent.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto [v0, v1, v2] = mesh.triangles[t];
    const int m01 = mid(v0, v1);
    const int m12 = mid(v1, v2);
    const int m20 = mid(v2, v0);
    fine.triangles.push_back({v0, m01, m20});
    fine.triangles.push_back({m01, v1, m12});
    fine.triangles.push_back({m20, m12, v2});
    fine.triangles.push_back({m01, m12, m20});
    for (int k = 0; k < 4; ++k) pair.parent.push_back(t);
  }
  for (const auto& e : mesh.boundary_edges) {
    const int m = midpoint.at(edge_key(e.vertices[0], e.vertices[1]));
    fine.boundary_edges.push_back({{e.vertices[0], m}, e.marker});
    fine.boundary_edges.push_back({{m, e.vertices[1]}, e.marker});
  }
  return pair;
}

RefinedPair build_unit_square_mesh(int M)
{
  if (M < 1) throw MeshError("unit square mesh needs M >= 1");
  TriMesh mesh;
  const int n = M + 1;
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j <= M; ++j) {
    for (int i = 0; i <= M; ++i) {
      mesh.vertices.emplace_back(static_cast<Real>(i) / M, static_cast<Real>(j) / M);
    }
  }
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < M; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (int i = 0; i < M; ++i) {
    mesh.boundary_edges.push_back({{id(i, 0), id(i + 1, 0)}, markers::bottom});
    mesh.boundary_edges.push_back({{id(M, i), id(M, i + 1)}, markers::right});
    mesh.boundary_edges.push_back({{id(i + 1, M), id(i, M)}, markers::top});
    mesh.boundary_edges.push_back({{id(0, i + 1), id(0, i)}, markers::left});
  }
  return refine(mesh);
}

TriMesh build_annulus_quarter_mesh(Real r_in, Real r_out, int n_r, int n_theta)
{
  if (!(r_in > 0) || !(r_out > r_in)) throw MeshError("annulus needs 0 < r_in < r_out");
  if (n_r < 1 || n_theta < 1) throw MeshError("annulus needs n_r, n_theta >= 1");
  TriMesh mesh;
  const int nr1 = n_r + 1;
  auto id = [nr1](int i, int j) { return j * nr1 + i; };
  for (int j = 0; j <= n_theta; ++j) {
    const Real theta = 0.5 * std::numbers::pi * j / n_theta;
    // Pin the symmetry edges exactly onto the axes.
    const Real c = (j == n_theta) ? 0.0 : std::cos(theta);
    const Real s = (j == 0) ? 0.0 : std::sin(theta);
    for (int i = 0; i <= n_r; ++i) {
      const Real r = r_in + (r_out - r_in) * i / n_r;
      mesh.vertices.emplace_back(r * c, r * s);
    }
  }
  for (int j = 0; j < n_theta; ++j) {
    for (int i = 0; i < n_r; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (int i = 0; i < n_r; ++i) {
    mesh.boundary_edges.push_back({{id(i, 0), id(i + 1, 0)}, markers::sector_x_axis});
    mesh.boundary_edges.push_back({{id(i + 1, n_theta), id(i, n_theta)}, markers::sector_y_axis});
  }
  for (int j = 0; j < n_theta; ++j) {
    mesh.boundary_edges.push_back({{id(n_r, j), id(n_r, j + 1)}, markers::outer_arc});
    mesh.boundary_edges.push_back({{id(0, j + 1), id(0, j)}, markers::inner_arc});
  }
  return mesh;
}

Real annulus_mesh_area(Real r_in, Real r_out, int n_theta)
{
  const Real dtheta = 0.5 * std::numbers::pi / n_theta;
  return 0.5 * n_theta * std::sin(dtheta) * (r_out * r_out - r_in * r_in);
}

TriMesh build_disk_mesh(const Point& center, Real diameter, int n)
{
  if (!(diameter > 0)) throw MeshError("disk needs a positive diameter");
  if (n < 1) throw MeshError("disk needs n >= 1");
  const Real radius = 0.5 * diameter;
  TriMesh mesh;
  mesh.vertices.push_back(center);
  std::vector<int> ring_start{0};
  for (int k = 1; k <= n; ++k) {
    ring_start.push_back(mesh.num_vertices());
    const int count = 6 * k;
    const Real r = (k == n) ? radius : radius * k / n;
    for (int m = 0; m < count; ++m) {
      const Real phi = 2 * std::numbers::pi * m / count;
      mesh.vertices.push_back(center + r * Point(std::cos(phi), std::sin(phi)));
    }
  }
  // Fan around the center.
  for (int m = 0; m < 6; ++m) mesh.triangles.push_back({0, 1 + m, 1 + (m + 1) % 6});
  // Stitch ring k-1 (inner) to ring k (outer) by advancing along the angle.
  for (int k = 2; k <= n; ++k) {
    const int n_in = 6 * (k - 1);
    const int n_out = 6 * k;
    auto inner = [&](int i) { return ring_start[k - 1] + i % n_in; };
    auto outer = [&](int j) { return ring_start[k] + j % n_out; };
    int i = 0;
    int j = 0;
    while (i < n_in || j < n_out) {
      // compare angles (j+1)/n_out <= (i+1)/n_in in integer arithmetic
      const bool advance_outer =
          j < n_out && (i == n_in || static_cast<long>(j + 1) * n_in <= static_cast<long>(i + 1) * n_out);
      if (advance_outer) {
        mesh.triangles.push_back({inner(i), outer(j), outer(j + 1)});
        ++j;
      } else {
        mesh.triangles.push_back({inner(i), outer(j), inner(i + 1)});
        ++i;
      }
    }
  }
  const int outer_start = ring_start[n];
  for (int m = 0; m < 6 * n; ++m) {
    mesh.boundary_edges.push_back({{outer_start + m, outer_start + (m + 1) % (6 * n)}, markers::circle});
  }
  return mesh;
}

Real disk_mesh_area(Real diameter, int n)
{
  const Real r = 0.5 * diameter;
  const int sides = 6 * n;
  return 0.5 * sides * r * r * std::sin(2 * std::numbers::pi / sides);
}

PointLocator::PointLocator(const TriMesh& mesh, Real bin_factor) : mesh_(&mesh)
{
  box_ = mesh.bounding_box();
  eps_geo_ = 1e-12 * box_.diameter();
  bin_size_ = std::max(bin_factor * mesh.max_diameter(), std::numeric_limits<Real>::min());
  const Point extent = box_.max - box_.min;
  nx_ = std::max(1, static_cast<int>(std::ceil(extent.x() / bin_size_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(extent.y() / bin_size_)));

  auto bin_range = [&](Real lo, Real hi, Real origin, int n) {
    const int a = std::clamp(static_cast<int>(std::floor((lo - origin) / bin_size_)), 0, n - 1);
    const int b = std::clamp(static_cast<int>(std::floor((hi - origin) / bin_size_)), 0, n - 1);
    return std::pair{a, b};
  };

  // Two passes: count then fill, so every bin lists triangle ids in increasing order.
  std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (int pass = 0; pass < 2; ++pass) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const BoundingBox b = mesh.bounding_box(t);
      const auto [ix0, ix1] = bin_range(b.min.x() - eps_geo_, b.max.x() + eps_geo_, box_.min.x(), nx_);
      const auto [iy0, iy1] = bin_range(b.min.y() - eps_geo_, b.max.y() + eps_geo_, box_.min.y(), ny_);
      for (int iy = iy0; iy <= iy1; ++iy) {
        for (int ix = ix0; ix <= ix1; ++ix) {
          const int bin = iy * nx_ + ix;
          if (pass == 0) {
            ++count[bin + 1];
          } else {
            bin_items_[count[bin]++] = t;
          }
        }
      }
    }
    if (pass == 0) {
      for (std::size_t b = 1; b < count.size(); ++b) count[b] += count[b - 1];
      bin_start_ = count;
      bin_items_.resize(count.back());
    }
  }
}

bool PointLocator::inside(int t, const Point& p, Vec3<Real>& bary) const
{
  const TriMesh& m = *mesh_;
  bary = barycentric(m.vertex(t, 0), m.vertex(t, 1), m.vertex(t, 2), p);
  const Real tol = eps_geo_ / m.diameter(t);
  return bary.minCoeff() >= -tol;
}

std::optional<Location> PointLocator::locate(const Point& p) const
{
  if (!p.allFinite() || !box_.contains(p, eps_geo_)) return std::nullopt;
  const int ix = std::clamp(static_cast<int>(std::floor((p.x() - box_.min.x()) / bin_size_)), 0, nx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((p.y() - box_.min.y()) / bin_size_)), 0, ny_ - 1);
  const int bin = iy * nx_ + ix;
  Location loc;
  for (int k = bin_start_[bin]; k < bin_start_[bin + 1]; ++k) {
    const int t = bin_items_[k];
    if (inside(t, p, loc.bary)) {
      loc.triangle = t;
      return loc;
    }
  }
  return std::nullopt;
}

void write_vtk(std::ostream& os, const TriMesh& mesh, const std::vector<VtkField>& point_data,
               const std::vector<VtkField>& cell_data, const std::string& title)
{
  os.precision(17);
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << " 0\n";
  os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";

  auto write_fields = [&os](const std::vector<VtkField>& fields, int n) {
    for (const auto& f : fields) {
      if (f.components == 2) {
        os << "VECTORS " << f.name << " double\n";
        for (int i = 0; i < n; ++i) os << (*f.values)[2 * i] << ' ' << (*f.values)[2 * i + 1] << " 0\n";
      } else {
        os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
        for (int i = 0; i < n; ++i) os << (*f.values)[i] << '\n';
      }
    }
  };
  if (!point_data.empty()) {
    os << "POINT_DATA " << mesh.num_vertices() << '\n';
    write_fields(point_data, mesh.num_vertices());
  }
  if (!cell_data.empty()) {
    os << "CELL_DATA " << mesh.num_triangles() << '\n';
    write_fields(cell_data, mesh.num_triangles());
  }
}

}  // namespace fsi
