#include "fsi/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace fsi {

namespace {

void append(TripletList& t, const SparseMat& m, Index row0, Index col0, Real scale)
{
  if (scale == 0) return;
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(m, r); it; ++it) t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
  }
}

void append_transposed(TripletList& t, const SparseMat& m, Index row0, Index col0, Real scale)
{
  if (scale == 0) return;
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(m, r); it; ++it) t.emplace_back(row0 + it.col(), col0 + it.row(), scale * it.value());
  }
}

/// Coefficients of one step. Rows:
///   u:      rho_f a M u + c_conv N(w) u + c_visc K u - c_p B^T p + c_lf L_f(Y)^T lambda
///   p:      -B u + W sigma
///   dX:     c_dX M_s dX - a M_s X
///   X:      drho a M_s dX + c_K K_s X - c_ls L_s^T lambda
///   lambda: c_kin L_f(Y) u - a L_s X
struct Coefficients {
  Real a = 0;
  Real c_conv = 1, c_visc = 1, c_p = 1, c_lf = 1;
  Real c_dX = 1, c_K = 1, c_ls = 1, c_kin = 1;
};

Coefficients coefficients(Scheme scheme, Real dt)
{
  Coefficients c;
  switch (scheme) {
    case Scheme::be:
      c.a = 1 / dt;
      break;
    case Scheme::bdf2:
      c.a = 3 / (2 * dt);
      break;
    case Scheme::cnm:
      c.a = 1 / dt;
      c.c_conv = c.c_visc = 0.5;
      c.c_dX = 0.5;
      c.c_kin = 0.5;
      break;
    case Scheme::cnt:
      c.a = 1 / dt;
      c.c_conv = c.c_visc = c.c_p = c.c_lf = 0.5;
      c.c_dX = c.c_K = c.c_ls = c.c_kin = 0.5;
      break;
  }
  return c;
}

void check_state(const State& s, const BlockLayout& l, const char* what)
{
  if (s.u.size() != l.nu || s.p.size() != l.np || s.dX.size() != l.ns || s.X.size() != l.ns ||
      s.lambda.size() != l.ns) {
    throw std::invalid_argument(std::string("dimension mismatch in ") + what);
  }
}

}  // namespace

BlockLayout layout_of(const Discretization& d)
{
  BlockLayout l;
  l.nu = d.velocity().dof_count();
  l.np = d.pressure().dof_count();
  l.ns = d.solid().dof_count();
  l.np1 = d.fluid().coarse.num_vertices();
  return l;
}

Vector pack(const State& s, const BlockLayout& l)
{
  check_state(s, l, "pack");
  Vector x = Vector::Zero(l.total());
  x.segment(l.u(), l.nu) = s.u;
  x.segment(l.p(), l.np) = s.p;
  x.segment(l.dX(), l.ns) = s.dX;
  x.segment(l.X(), l.ns) = s.X;
  x.segment(l.lambda(), l.ns) = s.lambda;
  return x;
}

State unpack(const Vector& x, const BlockLayout& l, Real t)
{
  if (x.size() != l.total()) throw std::invalid_argument("dimension mismatch in unpack");
  State s;
  s.t = t;
  s.u = x.segment(l.u(), l.nu);
  s.p = x.segment(l.p(), l.np);
  s.dX = x.segment(l.dX(), l.ns);
  s.X = x.segment(l.X(), l.ns);
  s.lambda = x.segment(l.lambda(), l.ns);
  return s;
}

DofConstraints global_constraints(const Discretization& d, const BlockLayout& l)
{
  DofConstraints c(l.total());
  const DofConstraints& ub = d.velocity_constraints();
  for (Index i : ub.constrained_dofs()) c.prescribe(l.u() + i, ub.value(i));
  for (Index i : d.pressure_constraints().constrained_dofs()) c.prescribe(l.p() + i, 0.0);
  const DofConstraints& sb = d.solid_constraints();
  for (Index i : sb.constrained_dofs()) {
    c.prescribe(l.dX() + i, 0.0);
    c.prescribe(l.X() + i, sb.value(i));
    c.prescribe(l.lambda() + i, 0.0);
  }
  return c;
}

BlockSystem build_system(const Discretization& d, Scheme scheme, Real dt, const History& history,
                         const Frozen& frozen)
{
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  if (scheme == Scheme::bdf2 && !history.has_previous()) {
    throw std::invalid_argument("BDF2 step needs two history levels");
  }
  const BlockLayout l = layout_of(d);
  const State& n0 = history.current();
  check_state(n0, l, "build_system");
  if (frozen.transport.size() != l.nu || frozen.map.size() != l.ns) {
    throw std::invalid_argument("dimension mismatch in frozen fields");
  }
  const Coefficients c = coefficients(scheme, dt);
  const PhysicsConfig& ph = d.physics();
  const Real drho = ph.delta_rho();

  const SparseMat N = d.convection(frozen.transport);
  const SparseMat Lf = d.lf(frozen.map);
  const SparseMat& Mf = d.fluid_mass();
  const SparseMat& K = d.viscous();
  const SparseMat& B = d.divergence();
  const SparseMat& Ms = d.solid_mass();
  const SparseMat& Ks = d.solid_stiffness();
  const SparseMat& Ls = d.ls();

  TripletList t;
  t.reserve(Mf.nonZeros() * 3 + B.nonZeros() * 2 + Lf.nonZeros() * 2 + Ms.nonZeros() * 4 + Ks.nonZeros());
  append(t, Mf, l.u(), l.u(), ph.rho_f * c.a);
  append(t, N, l.u(), l.u(), c.c_conv);
  append(t, K, l.u(), l.u(), c.c_visc);
  append_transposed(t, B, l.u(), l.p(), -c.c_p);
  append_transposed(t, Lf, l.u(), l.lambda(), c.c_lf);

  append(t, B, l.p(), l.u(), -1);

  append(t, Ms, l.dX(), l.dX(), c.c_dX);
  append(t, Ms, l.dX(), l.X(), -c.a);

  append(t, Ms, l.X(), l.dX(), drho * c.a);
  append(t, Ks, l.X(), l.X(), c.c_K);
  append_transposed(t, Ls, l.X(), l.lambda(), -c.c_ls);

  append(t, Lf, l.lambda(), l.u(), c.c_kin);
  append(t, Ls, l.lambda(), l.X(), -c.a);

  Vector rhs = Vector::Zero(l.total());
  auto g_u = rhs.segment(l.u(), l.nu);
  auto g_dX = rhs.segment(l.dX(), l.ns);
  auto g_X = rhs.segment(l.X(), l.ns);
  auto g_l = rhs.segment(l.lambda(), l.ns);
  switch (scheme) {
    case Scheme::be:
      g_u = ph.rho_f / dt * (Mf * n0.u);
      g_dX = -(Ms * n0.X) / dt;
      g_X = drho / dt * (Ms * n0.dX);
      g_l = -(Ls * n0.X) / dt;
      break;
    case Scheme::bdf2: {
      const State& n1 = history.previous();
      check_state(n1, l, "build_system");
      const Vector u2 = 4 * n0.u - n1.u;
      const Vector X2 = 4 * n0.X - n1.X;
      const Vector dX2 = 4 * n0.dX - n1.dX;
      g_u = ph.rho_f / (2 * dt) * (Mf * u2);
      g_dX = -(Ms * X2) / (2 * dt);
      g_X = drho / (2 * dt) * (Ms * dX2);
      g_l = -(Ls * X2) / (2 * dt);
      break;
    }
    case Scheme::cnm:
      g_u = ph.rho_f / dt * (Mf * n0.u) - 0.5 * (N * n0.u) - 0.5 * (K * n0.u);
      g_dX = -0.5 * (Ms * n0.dX) - (Ms * n0.X) / dt;
      g_X = drho / dt * (Ms * n0.dX);
      g_l = -0.5 * (Lf * n0.u) - (Ls * n0.X) / dt;
      break;
    case Scheme::cnt: {
      const SparseMat Nn = d.convection(n0.u);
      const SparseMat Lfn = d.lf(n0.X);
      g_u = ph.rho_f / dt * (Mf * n0.u) - 0.5 * (Nn * n0.u) - 0.5 * (K * n0.u) + 0.5 * (B.transpose() * n0.p) -
            0.5 * (Lfn.transpose() * n0.lambda);
      g_dX = -0.5 * (Ms * n0.dX) - (Ms * n0.X) / dt;
      g_X = drho / dt * (Ms * n0.dX) - 0.5 * (Ks * n0.X) + 0.5 * (Ls.transpose() * n0.lambda);
      g_l = -0.5 * (Lfn * n0.u) - (Ls * n0.X) / dt;
      break;
    }
  }

  LinearSystem sys = apply_constraints(t, l.total(), std::move(rhs), global_constraints(d, l));
  return {std::move(sys.matrix), std::move(sys.rhs), l};
}

LinearSolution solve(const BlockSystem& system)
{
  const Index n = system.matrix.rows();
  if (system.matrix.cols() != n || system.rhs.size() != n) throw std::invalid_argument("system is not square");
  const Eigen::SparseMatrix<Real, Eigen::ColMajor> A = system.matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<Real, Eigen::ColMajor>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    std::ostringstream os;
    os << "singular block system (" << lu.lastErrorMessage() << "); layout u=" << system.layout.nu
       << " p=" << system.layout.np << " solid=" << system.layout.ns;
    throw SingularSystem(os.str());
  }
  LinearSolution out;
  out.x = lu.solve(system.rhs);
  if (lu.info() != Eigen::Success || !out.x.allFinite()) throw SingularSystem("sparse LU back substitution failed");
  const Real bnorm = system.rhs.norm();
  Vector r = system.rhs - system.matrix * out.x;
  for (int refine = 0; refine < 3 && r.norm() > 1e-13 * bnorm; ++refine) {
    out.x += lu.solve(r);
    r = system.rhs - system.matrix * out.x;
  }
  const Real rnorm = r.norm();
  out.relative_residual = bnorm > 0 ? rnorm / bnorm : rnorm;
  if (out.relative_residual > 1e-10) {
    std::ostringstream os;
    os << "linear solve inaccurate: relative residual " << out.relative_residual;
    throw SingularSystem(os.str());
  }
  return out;
}

Vector extrapolate(const Vector& yn, const Vector* yprev)
{
  if (!yprev) return yn;
  return 2 * yn - *yprev;
}

Frozen implicit_frozen(Scheme scheme, const History& history, const State& iterate)
{
  const State& n0 = history.current();
  if (scheme == Scheme::cnm) return {0.5 * (iterate.u + n0.u), 0.5 * (iterate.X + n0.X)};
  return {iterate.u, iterate.X};
}

Frozen extrapolated_frozen(Scheme scheme, const History& history)
{
  const State& n0 = history.current();
  const State* n1 = history.has_previous() ? &history.previous() : nullptr;
  switch (scheme) {
    case Scheme::be:
      return {n0.u, n0.X};
    case Scheme::cnm: {
      const Vector u = extrapolate(n0.u, n1 ? &n1->u : nullptr);
      const Vector X = extrapolate(n0.X, n1 ? &n1->X : nullptr);
      return {0.5 * (u + n0.u), 0.5 * (X + n0.X)};
    }
    case Scheme::bdf2:
    case Scheme::cnt:
      break;
  }
  return {extrapolate(n0.u, n1 ? &n1->u : nullptr), extrapolate(n0.X, n1 ? &n1->X : nullptr)};
}

Real block_residual_norm(const Discretization& d, const BlockLayout& l, const Vector& r)
{
  auto part = [&](Index off, const Vector& m) {
    return (r.segment(off, m.size()).array().square() / m.array()).sum();
  };
  const Real s = part(l.u(), d.lumped_fluid()) + part(l.p(), d.lumped_pressure()) +
                 part(l.dX(), d.lumped_solid()) + part(l.X(), d.lumped_solid()) +
                 part(l.lambda(), d.lumped_solid());
  return std::sqrt(s);
}

namespace {

Real residual_of(const Discretization& d, const BlockSystem& sys, const Vector& x)
{
  return block_residual_norm(d, sys.layout, sys.matrix * x - sys.rhs);
}

}  // namespace

Real nonlinear_residual(const Discretization& d, Scheme scheme, Real dt, const History& history,
                        const State& candidate)
{
  const BlockSystem sys = build_system(d, scheme, dt, history, implicit_frozen(scheme, history, candidate));
  Vector x = pack(candidate, sys.layout);
  return residual_of(d, sys, x);
}

StepOutcome picard_loop(const Discretization& d, Scheme scheme, Real dt, const History& history,
                        const NonlinearMode& mode)
{
  if (mode.kind != NonlinearMode::Kind::picard) throw std::invalid_argument("picard_loop needs Picard mode");
  mode.validate();
  const Real t_new = history.current().t + dt;
  State iterate = history.current();
  BlockSystem sys = build_system(d, scheme, dt, history, implicit_frozen(scheme, history, iterate));
  StepOutcome out;
  for (int k = 1; k <= mode.max_iterations; ++k) {
    const LinearSolution sol = solve(sys);
    out.linear_residual = std::max(out.linear_residual, sol.relative_residual);
    iterate = unpack(sol.x, sys.layout, t_new);
    sys = build_system(d, scheme, dt, history, implicit_frozen(scheme, history, iterate));
    const Real r = residual_of(d, sys, sol.x);
    out.residual_history.push_back(r);
    if (!std::isfinite(r)) break;
    if (r <= mode.tolerance) {
      out.state = std::move(iterate);
      out.iterations = k;
      out.residual = r;
      return out;
    }
  }
  std::ostringstream os;
  os.precision(6);
  os << "Picard iteration did not converge at t=" << t_new << " after " << out.residual_history.size()
     << " iterations; residuals:";
  for (Real r : out.residual_history) os << ' ' << r;
  throw PicardDiverged(os.str(), out.residual_history);
}

StepOutcome semi_implicit_step(const Discretization& d, Scheme scheme, Real dt, const History& history)
{
  const BlockSystem sys = build_system(d, scheme, dt, history, extrapolated_frozen(scheme, history));
  const LinearSolution sol = solve(sys);
  StepOutcome out;
  out.state = unpack(sol.x, sys.layout, history.current().t + dt);
  out.iterations = 1;
  out.linear_residual = sol.relative_residual;
  out.residual = nonlinear_residual(d, scheme, dt, history, out.state);
  out.residual_history.push_back(out.residual);
  return out;
}

}  // namespace fsi
