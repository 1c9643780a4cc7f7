#include "fsi/fem.hpp"

#include <cmath>

namespace fsi {

FunctionSpace FunctionSpace::velocity(std::shared_ptr<const RefinedPair> pair)
{
  FunctionSpace s;
  s.kind_ = SpaceKind::velocity_p1isop2;
  s.dof_count_ = 2 * Index(pair->fine.num_vertices());
  s.pair_ = std::move(pair);
  return s;
}

FunctionSpace FunctionSpace::pressure(std::shared_ptr<const RefinedPair> pair)
{
  FunctionSpace s;
  s.kind_ = SpaceKind::pressure_p1_p0;
  s.dof_count_ = Index(pair->coarse.num_vertices()) + pair->coarse.num_triangles();
  s.pair_ = std::move(pair);
  return s;
}

FunctionSpace FunctionSpace::solid(std::shared_ptr<const TriMesh> mesh)
{
  FunctionSpace s;
  s.kind_ = SpaceKind::solid_p1;
  s.dof_count_ = 2 * Index(mesh->num_vertices());
  s.mesh_ = std::move(mesh);
  return s;
}

const TriMesh& FunctionSpace::mesh() const
{
  switch (kind_) {
    case SpaceKind::velocity_p1isop2:
      return pair_->fine;
    case SpaceKind::pressure_p1_p0:
      return pair_->coarse;
    case SpaceKind::solid_p1:
      break;
  }
  return *mesh_;
}

const RefinedPair& FunctionSpace::pair() const
{
  if (!pair_) throw std::logic_error("solid space has no refined pair");
  return *pair_;
}

std::vector<std::string> PhysicsConfig::validate() const
{
  if (!(rho_f > 0)) throw std::invalid_argument("rho_f must be positive");
  if (!(nu > 0)) throw std::invalid_argument("nu must be positive");
  if (!(kappa >= 0)) throw std::invalid_argument("kappa must be non-negative");
  std::vector<std::string> warnings;
  if (delta_rho() < 0) warnings.emplace_back("rho_s < rho_f: energy estimates do not apply");
  return warnings;
}

namespace {

void require_vector(const FunctionSpace& s)
{
  if (!s.is_vector()) throw std::invalid_argument("operation needs a vector P1 space");
}

// Scatter a scalar element matrix into both diagonal component blocks.
void scatter_vector(TripletList& t, const std::array<int, 3>& tri, const Eigen::Matrix3d& local)
{
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (local(a, b) == 0) continue;
      for (int c = 0; c < 2; ++c) {
        t.emplace_back(FunctionSpace::vector_dof(tri[a], c), FunctionSpace::vector_dof(tri[b], c), local(a, b));
      }
    }
  }
}

}  // namespace

SparseMat mass_matrix(const FunctionSpace& space, const QuadRule& rule)
{
  require_vector(space);
  const TriMesh& m = space.mesh();
  TripletList t;
  t.reserve(18 * m.triangles.size());
  for (int e = 0; e < m.num_triangles(); ++e) {
    const Real jac = 2 * m.area(e);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      local.noalias() += rule.weights[q] * jac * rule.points[q] * rule.points[q].transpose();
    }
    scatter_vector(t, m.triangles[e], local);
  }
  return from_triplets(space.dof_count(), space.dof_count(), t);
}

Vector lumped_mass(const FunctionSpace& space)
{
  const TriMesh& m = space.mesh();
  Vector d = Vector::Zero(space.dof_count());
  for (int e = 0; e < m.num_triangles(); ++e) {
    const Real share = m.area(e) / 3;
    for (int a = 0; a < 3; ++a) {
      if (space.is_vector()) {
        d[2 * m.triangles[e][a]] += share;
        d[2 * m.triangles[e][a] + 1] += share;
      } else {
        d[m.triangles[e][a]] += share;
      }
    }
    if (!space.is_vector()) d[m.num_vertices() + e] += m.area(e);
  }
  return d;
}

SparseMat viscous_stiffness(const FunctionSpace& velocity, Real nu, const QuadRule& rule)
{
  require_vector(velocity);
  const TriMesh& m = velocity.mesh();
  Real rule_area = 0;
  for (Real w : rule.weights) rule_area += w;
  TripletList t;
  t.reserve(36 * m.triangles.size());
  for (int e = 0; e < m.num_triangles(); ++e) {
    const auto g = hat_gradients(m.vertex(e, 0), m.vertex(e, 1), m.vertex(e, 2));
    // constant integrand; the rule only contributes its total weight
    const Real scale = nu * rule_area * 2 * m.area(e);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const Real gg = g.col(a).dot(g.col(b));
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            // 2 eps(e_c psi_a) : eps(e_d psi_b) = delta_cd ga.gb + ga_d gb_c
            const Real v = (c == d ? gg : 0.0) + g(d, a) * g(c, b);
            if (v != 0) {
              t.emplace_back(FunctionSpace::vector_dof(m.triangles[e][a], c),
                             FunctionSpace::vector_dof(m.triangles[e][b], d), scale * v);
            }
          }
        }
      }
    }
  }
  return from_triplets(velocity.dof_count(), velocity.dof_count(), t);
}

SparseMat divergence_matrix(const FunctionSpace& velocity, const FunctionSpace& pressure, const QuadRule& rule)
{
  if (velocity.kind() != SpaceKind::velocity_p1isop2 || pressure.kind() != SpaceKind::pressure_p1_p0) {
    throw std::invalid_argument("divergence_matrix needs velocity and pressure spaces");
  }
  const RefinedPair& pair = velocity.pair();
  if (&pair != &pressure.pair()) throw std::invalid_argument("spaces live on different refined pairs");
  const TriMesh& fine = pair.fine;
  const TriMesh& coarse = pair.coarse;
  const int n_p1 = coarse.num_vertices();
  TripletList t;
  t.reserve(24 * fine.triangles.size());
  for (int e = 0; e < fine.num_triangles(); ++e) {
    const int parent = pair.parent[e];
    const auto& ptri = coarse.triangles[parent];
    const auto g = hat_gradients(fine.vertex(e, 0), fine.vertex(e, 1), fine.vertex(e, 2));
    const Real jac = 2 * fine.area(e);
    Vec3<Real> p1_integrals = Vec3<Real>::Zero();  // integral of each parent hat over this child
    Real child_area = 0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point x = l[0] * fine.vertex(e, 0) + l[1] * fine.vertex(e, 1) + l[2] * fine.vertex(e, 2);
      const Vec3<Real> hats = barycentric(coarse.vertex(parent, 0), coarse.vertex(parent, 1),
                                          coarse.vertex(parent, 2), x);
      p1_integrals += rule.weights[q] * jac * hats;
      child_area += rule.weights[q] * jac;
    }
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 2; ++c) {
        const Index col = FunctionSpace::vector_dof(fine.triangles[e][a], c);
        const Real div = g(c, a);
        for (int k = 0; k < 3; ++k) t.emplace_back(ptri[k], col, div * p1_integrals[k]);
        t.emplace_back(n_p1 + parent, col, div * child_area);
      }
    }
  }
  return from_triplets(pressure.dof_count(), velocity.dof_count(), t);
}

SparseMat convection_matrix(const FunctionSpace& velocity, const Vector& w, Real rho_f, const QuadRule& rule)
{
  require_vector(velocity);
  if (w.size() != velocity.dof_count()) throw std::invalid_argument("transport field has wrong length");
  const TriMesh& m = velocity.mesh();
  TripletList t;
  t.reserve(18 * m.triangles.size());
  for (int e = 0; e < m.num_triangles(); ++e) {
    const auto& tri = m.triangles[e];
    const auto g = hat_gradients(m.vertex(e, 0), m.vertex(e, 1), m.vertex(e, 2));
    Eigen::Matrix<Real, 2, 3> wn;
    for (int a = 0; a < 3; ++a) wn.col(a) << w[2 * tri[a]], w[2 * tri[a] + 1];
    const Real jac = 2 * m.area(e);
    // G_ab = (w . grad psi_b, psi_a)
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point wq = wn * l;
      const Eigen::RowVector3d transport = wq.transpose() * g;
      G.noalias() += rule.weights[q] * jac * l * transport;
    }
    const Eigen::Matrix3d local = 0.5 * rho_f * (G - G.transpose());
    scatter_vector(t, tri, local);
  }
  return from_triplets(velocity.dof_count(), velocity.dof_count(), t);
}

SparseMat solid_stiffness(const FunctionSpace& solid, Real kappa, const QuadRule& rule)
{
  require_vector(solid);
  const TriMesh& m = solid.mesh();
  Real rule_area = 0;
  for (Real w : rule.weights) rule_area += w;
  TripletList t;
  t.reserve(18 * m.triangles.size());
  for (int e = 0; e < m.num_triangles(); ++e) {
    const auto g = hat_gradients(m.vertex(e, 0), m.vertex(e, 1), m.vertex(e, 2));
    const Eigen::Matrix3d local = kappa * rule_area * 2 * m.area(e) * (g.transpose() * g);
    scatter_vector(t, m.triangles[e], local);
  }
  return from_triplets(solid.dof_count(), solid.dof_count(), t);
}

Vector elastic_force(const FunctionSpace& solid, const Vector& X, Real kappa)
{
  return solid_stiffness(solid, kappa) * X;
}

// ---------------------------------------------------------------------------

void DofConstraints::prescribe(Index dof, Real value, int precedence)
{
  if (precedence_[dof] > precedence) return;
  if (precedence_[dof] == precedence && value_[dof] != value) {
    throw ConstraintError("conflicting prescriptions on dof " + std::to_string(dof));
  }
  precedence_[dof] = precedence;
  value_[dof] = value;
}

std::vector<Index> DofConstraints::constrained_dofs() const
{
  std::vector<Index> out;
  for (Index i = 0; i < dof_count(); ++i) {
    if (is_constrained(i)) out.push_back(i);
  }
  return out;
}

void DofConstraints::impose(Vector& x) const
{
  for (Index i = 0; i < dof_count(); ++i) {
    if (is_constrained(i)) x[i] = value_[i];
  }
}

void DofConstraints::zero(Vector& x) const
{
  for (Index i = 0; i < dof_count(); ++i) {
    if (is_constrained(i)) x[i] = 0;
  }
}

int normal_component(const TriMesh& mesh, int marker)
{
  int component = -1;
  for (const auto& e : mesh.boundary_edges) {
    if (e.marker != marker) continue;
    const Point d = mesh.vertices[e.vertices[1]] - mesh.vertices[e.vertices[0]];
    const Real tol = 1e-12 * d.norm();
    int c = -1;
    if (std::abs(d.x()) <= tol) c = 0;       // vertical edge, normal along x
    else if (std::abs(d.y()) <= tol) c = 1;  // horizontal edge, normal along y
    if (c < 0 || (component >= 0 && c != component)) {
      throw ConstraintError("boundary part " + std::to_string(marker) + " is not a straight axis-aligned line");
    }
    component = c;
  }
  if (component < 0) throw ConstraintError("no boundary edges carry marker " + std::to_string(marker));
  return component;
}

DofConstraints velocity_constraints(const FunctionSpace& velocity, const std::vector<WallCondition>& walls)
{
  require_vector(velocity);
  const TriMesh& m = velocity.mesh();
  DofConstraints c(velocity.dof_count());
  for (const auto& w : walls) {
    const auto verts = m.boundary_vertices(w.marker);
    switch (w.kind) {
      case WallKind::no_slip:
        for (int v : verts) {
          c.prescribe(FunctionSpace::vector_dof(v, 0), 0.0);
          c.prescribe(FunctionSpace::vector_dof(v, 1), 0.0);
        }
        break;
      case WallKind::slip: {
        const int n = normal_component(m, w.marker);
        for (int v : verts) c.prescribe(FunctionSpace::vector_dof(v, n), 0.0);
        break;
      }
      case WallKind::lid:
        for (int v : verts) {
          c.prescribe(FunctionSpace::vector_dof(v, 0), w.value.x(), 1);
          c.prescribe(FunctionSpace::vector_dof(v, 1), w.value.y(), 1);
        }
        break;
    }
  }
  return c;
}

void constrain_normal_component(const FunctionSpace& space, const std::vector<int>& markers,
                                DofConstraints& constraints, const Vector* values)
{
  require_vector(space);
  for (int marker : markers) {
    const int n = normal_component(space.mesh(), marker);
    for (int v : space.mesh().boundary_vertices(marker)) {
      const Index dof = FunctionSpace::vector_dof(v, n);
      constraints.prescribe(dof, values ? (*values)[dof] : 0.0);
    }
  }
}

LinearSystem apply_constraints(const TripletList& entries, Index n, Vector rhs, const DofConstraints& constraints)
{
  if (constraints.dof_count() != n || rhs.size() != n) throw std::invalid_argument("constraint size mismatch");
  TripletList kept;
  kept.reserve(entries.size());
  for (const auto& e : entries) {
    const Index r = e.row();
    const Index c = e.col();
    if (constraints.is_constrained(r)) continue;
    if (constraints.is_constrained(c)) {
      rhs[r] -= e.value() * constraints.value(c);
      continue;
    }
    kept.push_back(e);
  }
  for (Index i = 0; i < n; ++i) {
    if (constraints.is_constrained(i)) {
      kept.emplace_back(i, i, 1.0);
      rhs[i] = constraints.value(i);
    }
  }
  return {from_triplets(n, n, kept), std::move(rhs)};
}

}  // namespace fsi
