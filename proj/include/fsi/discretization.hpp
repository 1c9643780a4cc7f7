#pragma once

#include <memory>
#include <vector>

#include "fsi/coupling.hpp"
#include "fsi/fem.hpp"

namespace fsi {

/// Everything about the spatial discretization that does not change in time:
/// meshes, spaces, constant matrices, boundary constraints and the point locator.
class Discretization {
 public:
  struct Options {
    std::vector<WallCondition> walls;
    std::vector<int> solid_symmetry_markers;  // straight solid edges with zero normal motion
    int coupling_degree = 4;
  };

  Discretization(std::shared_ptr<const RefinedPair> fluid, std::shared_ptr<const TriMesh> solid_mesh,
                 PhysicsConfig physics, Options options, const Vector& initial_map);

  const RefinedPair& fluid() const { return *fluid_; }
  const TriMesh& solid_mesh() const { return *solid_mesh_; }
  const PhysicsConfig& physics() const { return physics_; }
  const Options& options() const { return options_; }

  const FunctionSpace& velocity() const { return velocity_; }
  const FunctionSpace& pressure() const { return pressure_; }
  const FunctionSpace& solid() const { return solid_; }

  const SparseMat& fluid_mass() const { return mass_f_; }
  const SparseMat& viscous() const { return viscous_; }
  const SparseMat& divergence() const { return div_; }
  const SparseMat& solid_mass() const { return mass_s_; }
  const SparseMat& solid_stiffness() const { return stiff_s_; }
  const SparseMat& ls() const { return ls_; }

  const Vector& lumped_fluid() const { return lumped_f_; }
  const Vector& lumped_pressure() const { return lumped_p_; }
  const Vector& lumped_solid() const { return lumped_s_; }

  const DofConstraints& velocity_constraints() const { return u_bc_; }
  /// Pressure dofs pinned to zero: one per constant in the kernel of B^T plus corner modes.
  const DofConstraints& pressure_constraints() const { return p_bc_; }
  /// Normal-component constraints shared by dX, X and the multiplier (values are those of X).
  const DofConstraints& solid_constraints() const { return solid_bc_; }

  const PointLocator& locator() const { return *locator_; }
  const QuadRule& coupling_rule() const { return triangle_rule(options_.coupling_degree); }

  SparseMat lf(const Vector& X) const;
  SparseMat convection(const Vector& w) const;

 private:
  std::shared_ptr<const RefinedPair> fluid_;
  std::shared_ptr<const TriMesh> solid_mesh_;
  PhysicsConfig physics_;
  Options options_;
  FunctionSpace velocity_;
  FunctionSpace pressure_;
  FunctionSpace solid_;
  SparseMat mass_f_, viscous_, div_, mass_s_, stiff_s_, ls_;
  Vector lumped_f_, lumped_p_, lumped_s_;
  DofConstraints u_bc_;
  DofConstraints p_bc_;
  DofConstraints solid_bc_;
  std::unique_ptr<PointLocator> locator_;
};

}  // namespace fsi
