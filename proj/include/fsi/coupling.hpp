#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fsi/fem.hpp"

namespace fsi {

/// A quadrature point of the solid reference mesh pushed forward by the current map.
struct MappedQuadPoint {
  int solid_element = -1;
  Vec3<Real> reference;  // barycentric on the solid element
  Real weight = 0;       // includes the reference-element Jacobian (integration over B)
  Point mapped = Point::Zero();
  int host = -1;         // fluid triangle, -1 when outside
  Vec3<Real> host_bary = Vec3<Real>::Zero();
};

class SolidEscaped : public std::runtime_error {
 public:
  SolidEscaped(int element, const Point& p);
  int element;
  Point point;
};

/// Maps every rule point of every solid element through the P1 interpolant of X.
/// Points that leave the fluid mesh keep host = -1.
std::vector<MappedQuadPoint> map_quadrature(const FunctionSpace& solid, const Vector& X, const QuadRule& rule,
                                            const PointLocator& fluid);

/// (L_f)_lj = (zeta_l, phi_j(X))_B, rows = multiplier dofs, columns = velocity dofs.
/// Throws SolidEscaped if a mapped point is not inside the fluid mesh.
SparseMat assemble_lf(const FunctionSpace& multiplier, const FunctionSpace& velocity, const Vector& X,
                      const PointLocator& fluid, const QuadRule& rule = triangle_rule(4));

/// (L_s)_lj = (zeta_l, chi_j)_B; identical spaces make it the solid mass matrix.
SparseMat assemble_ls(const FunctionSpace& solid, const FunctionSpace& multiplier);

/// Velocity value at a located point.
Point evaluate_velocity(const TriMesh& fluid, const Vector& u, int triangle, const Vec3<Real>& bary);

}  // namespace fsi
