#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"
#include "fsi/types.hpp"

namespace fsi {

enum class SpaceKind {
  velocity_p1isop2,  ///< vector P1 on the refined fluid mesh
  pressure_p1_p0,    ///< P1 on coarse vertices followed by P0 on coarse triangles
  solid_p1,          ///< vector P1 on the solid mesh
};

/// Degrees of freedom of one discrete field.
///
/// Vector spaces interleave components: dof = 2 * vertex + component.
class FunctionSpace {
 public:
  static FunctionSpace velocity(std::shared_ptr<const RefinedPair> pair);
  static FunctionSpace pressure(std::shared_ptr<const RefinedPair> pair);
  static FunctionSpace solid(std::shared_ptr<const TriMesh> mesh);

  SpaceKind kind() const { return kind_; }
  Index dof_count() const { return dof_count_; }
  bool is_vector() const { return kind_ != SpaceKind::pressure_p1_p0; }

  /// Mesh carrying the shape functions: fine mesh for velocity, coarse for pressure.
  const TriMesh& mesh() const;
  const RefinedPair& pair() const;

  static Index vector_dof(int vertex, int component) { return 2 * Index(vertex) + component; }

 private:
  SpaceKind kind_ = SpaceKind::solid_p1;
  Index dof_count_ = 0;
  std::shared_ptr<const RefinedPair> pair_;
  std::shared_ptr<const TriMesh> mesh_;
};

struct PhysicsConfig {
  Real rho_f = 1;
  Real rho_s = 1;
  Real nu = 1;
  Real kappa = 0;

  Real delta_rho() const { return rho_s - rho_f; }

  /// Throws on rho_f <= 0, nu <= 0 or kappa < 0; returns warnings (negative delta_rho).
  std::vector<std::string> validate() const;
};

SparseMat mass_matrix(const FunctionSpace& space, const QuadRule& rule = triangle_rule(2));

/// Row sums of the consistent mass (scalar for the pressure space).
Vector lumped_mass(const FunctionSpace& space);

/// a(u, v) = 2 nu (eps(u), eps(v)) with eps(u) = (grad u + grad u^T) / 2.
SparseMat viscous_stiffness(const FunctionSpace& velocity, Real nu, const QuadRule& rule = triangle_rule(2));

/// B_ki = (div phi_i, psi_k); coarse P1 hats are integrated on fine children via the parent map.
SparseMat divergence_matrix(const FunctionSpace& velocity, const FunctionSpace& pressure,
                            const QuadRule& rule = triangle_rule(2));

/// N(w)_ij = b(w, phi_j, phi_i) = rho_f/2 ((w.grad phi_j, phi_i) - (w.grad phi_i, phi_j)).
SparseMat convection_matrix(const FunctionSpace& velocity, const Vector& w, Real rho_f,
                            const QuadRule& rule = triangle_rule(3));

/// (K_s)_ij = kappa (grad chi_j, grad chi_i) with the full reference gradient.
SparseMat solid_stiffness(const FunctionSpace& solid, Real kappa, const QuadRule& rule = triangle_rule(2));

/// (P(F), grad Y) for the linear law P(F) = kappa F, i.e. K_s X.
Vector elastic_force(const FunctionSpace& solid, const Vector& X, Real kappa);

/// Nodal interpolant of a vector-valued map on a vector P1 space.
template <typename Fn>
Vector interpolate(const FunctionSpace& space, Fn&& f)
{
  const TriMesh& m = space.mesh();
  Vector v(space.dof_count());
  for (int i = 0; i < m.num_vertices(); ++i) {
    const Point value = f(m.vertices[i]);
    v[2 * i] = value.x();
    v[2 * i + 1] = value.y();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Boundary conditions

class ConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prescribed dof values. A higher precedence overrides a lower one; equal
/// precedence with a different value is a conflict.
class DofConstraints {
 public:
  explicit DofConstraints(Index dof_count = 0) : value_(dof_count), precedence_(dof_count, -1) {}

  void prescribe(Index dof, Real value, int precedence = 0);
  bool is_constrained(Index dof) const { return precedence_[dof] >= 0; }
  Real value(Index dof) const { return value_[dof]; }
  Index dof_count() const { return value_.size(); }
  std::vector<Index> constrained_dofs() const;

  /// Overwrites constrained entries of x with their prescribed values.
  void impose(Vector& x) const;
  /// Sets constrained entries of x to zero.
  void zero(Vector& x) const;

 private:
  Vector value_;
  std::vector<int> precedence_;
};

enum class WallKind { no_slip, slip, lid };

struct WallCondition {
  int marker = 0;
  WallKind kind = WallKind::no_slip;
  Point value = Point::Zero();  // lid velocity
};

/// Component index (0 = x, 1 = y) normal to an axis-aligned straight boundary part.
int normal_component(const TriMesh& mesh, int marker);

/// Velocity constraints for the fluid; lid values take precedence over walls at shared corners.
DofConstraints velocity_constraints(const FunctionSpace& velocity, const std::vector<WallCondition>& walls);

/// Zero normal component on the listed straight boundary parts of a vector P1 space.
void constrain_normal_component(const FunctionSpace& space, const std::vector<int>& markers,
                                DofConstraints& constraints, const Vector* values = nullptr);

struct LinearSystem {
  SparseMat matrix;
  Vector rhs;
};

/// Row/column elimination with symmetric lifting.
///
/// Constrained rows become identity rows carrying the prescribed value; their
/// columns are moved to the right-hand side of the remaining rows.
LinearSystem apply_constraints(const TripletList& entries, Index n, Vector rhs, const DofConstraints& constraints);

}  // namespace fsi
