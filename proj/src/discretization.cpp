#include "fsi/discretization.hpp"

#include <algorithm>

namespace fsi {

namespace {

/// Pressure dofs pinned to zero so that B^T has no kernel on the free velocity dofs.
///
/// The P1 and P0 constants are removed by one pin each when they lie in the
/// kernel (closed walls). A coarse vertex owned by a single triangle whose P1
/// and P0 divergence rows are parallel on the free velocity dofs spans one more
/// kernel vector; its P1 dof is pinned as well.
DofConstraints pressure_pins(const RefinedPair& fluid, const SparseMat& B, const DofConstraints& u_bc)
{
  const TriMesh& coarse = fluid.coarse;
  const int nv = coarse.num_vertices();
  std::vector<int> owner(nv, -1);
  std::vector<int> count(nv, 0);
  for (int t = 0; t < coarse.num_triangles(); ++t) {
    for (int v : coarse.triangles[t]) {
      ++count[v];
      owner[v] = t;
    }
  }
  auto free_row = [&](Index r) {
    Vector row = Vector::Zero(B.cols());
    for (SparseMat::InnerIterator it(B, r); it; ++it) {
      if (!u_bc.is_constrained(it.col())) row[it.col()] = it.value();
    }
    return row;
  };
  DofConstraints pinned(B.rows());
  for (int v = 0; v < nv; ++v) {
    if (count[v] != 1) continue;
    const Vector a = free_row(v);
    const Vector b = free_row(nv + owner[v]);
    const Real aa = a.squaredNorm();
    const Real bb = b.squaredNorm();
    const Real ab = a.dot(b);
    if (aa == 0 || aa * bb - ab * ab <= 1e-12 * aa * bb) pinned.prescribe(v, 0.0);
  }

  Vector sum_p1 = Vector::Zero(B.cols());
  Vector sum_p0 = Vector::Zero(B.cols());
  Real scale = 0;
  for (Index r = 0; r < B.rows(); ++r) {
    const Vector row = free_row(r);
    (r < nv ? sum_p1 : sum_p0) += row;
    scale = std::max(scale, row.cwiseAbs().maxCoeff());
  }
  const Real tol = 1e-10 * scale;
  if (sum_p1.cwiseAbs().maxCoeff() <= tol) {
    for (int v = 0; v < nv; ++v) {
      if (!pinned.is_constrained(v)) {
        pinned.prescribe(v, 0.0);
        break;
      }
    }
  }
  if (sum_p0.cwiseAbs().maxCoeff() <= tol) pinned.prescribe(nv, 0.0);
  return pinned;
}

}  // namespace

Discretization::Discretization(std::shared_ptr<const RefinedPair> fluid, std::shared_ptr<const TriMesh> solid_mesh,
                               PhysicsConfig physics, Options options, const Vector& initial_map)
    : fluid_(std::move(fluid)),
      solid_mesh_(std::move(solid_mesh)),
      physics_(physics),
      options_(std::move(options)),
      velocity_(FunctionSpace::velocity(fluid_)),
      pressure_(FunctionSpace::pressure(fluid_)),
      solid_(FunctionSpace::solid(solid_mesh_))
{
  physics_.validate();
  mass_f_ = mass_matrix(velocity_);
  viscous_ = viscous_stiffness(velocity_, physics_.nu);
  div_ = divergence_matrix(velocity_, pressure_);
  mass_s_ = mass_matrix(solid_);
  stiff_s_ = fsi::solid_stiffness(solid_, physics_.kappa);
  ls_ = assemble_ls(solid_, solid_);
  lumped_f_ = lumped_mass(velocity_);
  lumped_p_ = lumped_mass(pressure_);
  lumped_s_ = lumped_mass(solid_);
  u_bc_ = fsi::velocity_constraints(velocity_, options_.walls);
  solid_bc_ = DofConstraints(solid_.dof_count());
  constrain_normal_component(solid_, options_.solid_symmetry_markers, solid_bc_, &initial_map);
  p_bc_ = pressure_pins(*fluid_, div_, u_bc_);
  locator_ = std::make_unique<PointLocator>(fluid_->fine);
}

SparseMat Discretization::lf(const Vector& X) const
{
  return assemble_lf(solid_, velocity_, X, *locator_, coupling_rule());
}

SparseMat Discretization::convection(const Vector& w) const
{
  return convection_matrix(velocity_, w, physics_.rho_f);
}

}  // namespace fsi
