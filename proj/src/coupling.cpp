#include "fsi/coupling.hpp"

#include <sstream>

namespace fsi {

namespace {

std::string escape_message(int element, const Point& p)
{
  std::ostringstream os;
  os.precision(17);
  os << "solid escaped domain: element " << element << " maps a quadrature point to (" << p.x() << ", " << p.y()
     << ")";
  return os.str();
}

}  // namespace

SolidEscaped::SolidEscaped(int e, const Point& p) : std::runtime_error(escape_message(e, p)), element(e), point(p) {}

std::vector<MappedQuadPoint> map_quadrature(const FunctionSpace& solid, const Vector& X, const QuadRule& rule,
                                            const PointLocator& fluid)
{
  if (solid.kind() != SpaceKind::solid_p1) throw std::invalid_argument("map_quadrature needs the solid space");
  if (X.size() != solid.dof_count()) throw std::invalid_argument("map has wrong length");
  const TriMesh& m = solid.mesh();
  std::vector<MappedQuadPoint> out;
  out.reserve(std::size_t(m.num_triangles()) * rule.size());
  for (int e = 0; e < m.num_triangles(); ++e) {
    const auto& tri = m.triangles[e];
    Eigen::Matrix<Real, 2, 3> xn;
    for (int a = 0; a < 3; ++a) xn.col(a) << X[2 * tri[a]], X[2 * tri[a] + 1];
    const Real jac = 2 * m.area(e);
    for (int q = 0; q < rule.size(); ++q) {
      MappedQuadPoint p;
      p.solid_element = e;
      p.reference = rule.points[q];
      p.weight = rule.weights[q] * jac;
      p.mapped = xn * rule.points[q];
      if (const auto loc = fluid.locate(p.mapped)) {
        p.host = loc->triangle;
        p.host_bary = loc->bary;
      }
      out.push_back(p);
    }
  }
  return out;
}

SparseMat assemble_lf(const FunctionSpace& multiplier, const FunctionSpace& velocity, const Vector& X,
                      const PointLocator& fluid, const QuadRule& rule)
{
  if (&velocity.mesh() != &fluid.mesh()) throw std::invalid_argument("locator is not built on the velocity mesh");
  const auto points = map_quadrature(multiplier, X, rule, fluid);
  const TriMesh& solid = multiplier.mesh();
  const TriMesh& fine = velocity.mesh();
  TripletList t;
  t.reserve(points.size() * 18);
  for (const auto& p : points) {
    if (p.host < 0) throw SolidEscaped(p.solid_element, p.mapped);
    const auto& stri = solid.triangles[p.solid_element];
    const auto& ftri = fine.triangles[p.host];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const Real v = p.weight * p.reference[a] * p.host_bary[b];
        if (v == 0) continue;
        for (int c = 0; c < 2; ++c) {
          t.emplace_back(FunctionSpace::vector_dof(stri[a], c), FunctionSpace::vector_dof(ftri[b], c), v);
        }
      }
    }
  }
  return from_triplets(multiplier.dof_count(), velocity.dof_count(), t);
}

SparseMat assemble_ls(const FunctionSpace& solid, const FunctionSpace& multiplier)
{
  if (solid.kind() != SpaceKind::solid_p1 || multiplier.kind() != SpaceKind::solid_p1 ||
      &solid.mesh() != &multiplier.mesh()) {
    throw std::invalid_argument("assemble_ls needs P1 spaces on the same solid mesh");
  }
  return mass_matrix(solid);
}

Point evaluate_velocity(const TriMesh& fluid, const Vector& u, int triangle, const Vec3<Real>& bary)
{
  Point v = Point::Zero();
  for (int a = 0; a < 3; ++a) {
    const int vert = fluid.triangles[triangle][a];
    v += bary[a] * Point(u[2 * vert], u[2 * vert + 1]);
  }
  return v;
}

}  // namespace fsi
