#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "fsi/schemes.hpp"
#include "oracles.hpp"

using namespace fsi;

namespace {

/// Residual of the fully implicit step equations written out per scheme from
/// oracle matrices; only the coupling matrix comes from the library.
Vector oracle_residual(const Discretization& d, const oracle::VelocityOracle& vo_new,
                       const oracle::VelocityOracle& vo_old, const oracle::VelocityOracle& vo_mid,
                       const Eigen::MatrixXd& Ms, const Eigen::MatrixXd& Ks, Scheme scheme, Real dt,
                       const History& h, const State& y)
{
  const BlockLayout l = layout_of(d);
  const PhysicsConfig& ph = d.physics();
  const Real drho = ph.delta_rho();
  const State& y0 = h.current();
  const Eigen::MatrixXd& Mf = vo_new.mass;
  const Eigen::MatrixXd& A = vo_new.viscous;
  const Eigen::MatrixXd& B = vo_new.divergence;
  Vector ru, rp, rdX, rX, rl;
  rp = -B * y.u;
  switch (scheme) {
    case Scheme::be:
    case Scheme::bdf2: {
      Vector Du, DX, DdX;
      if (scheme == Scheme::be) {
        Du = (y.u - y0.u) / dt;
        DX = (y.X - y0.X) / dt;
        DdX = (y.dX - y0.dX) / dt;
      } else {
        const State& y1 = h.previous();
        Du = (3 * y.u - 4 * y0.u + y1.u) / (2 * dt);
        DX = (3 * y.X - 4 * y0.X + y1.X) / (2 * dt);
        DdX = (3 * y.dX - 4 * y0.dX + y1.dX) / (2 * dt);
      }
      const Eigen::MatrixXd Lf = oracle::dense(d.lf(y.X));
      ru = ph.rho_f * Mf * Du + vo_new.convection * y.u + A * y.u - B.transpose() * y.p + Lf.transpose() * y.lambda;
      rdX = Ms * y.dX - Ms * DX;
      rX = drho * Ms * DdX + Ks * y.X - Ms * y.lambda;
      rl = Lf * y.u - Ms * DX;
      break;
    }
    case Scheme::cnm: {
      const Vector um = 0.5 * (y.u + y0.u);
      const Eigen::MatrixXd Lf = oracle::dense(d.lf(0.5 * (y.X + y0.X)));
      ru = ph.rho_f * Mf * (y.u - y0.u) / dt + vo_mid.convection * um + A * um - B.transpose() * y.p +
           Lf.transpose() * y.lambda;
      rdX = Ms * 0.5 * (y.dX + y0.dX) - Ms * (y.X - y0.X) / dt;
      rX = drho * Ms * (y.dX - y0.dX) / dt + Ks * y.X - Ms * y.lambda;
      rl = Lf * um - Ms * (y.X - y0.X) / dt;
      break;
    }
    case Scheme::cnt: {
      const Eigen::MatrixXd Lf = oracle::dense(d.lf(y.X));
      const Eigen::MatrixXd Lf0 = oracle::dense(d.lf(y0.X));
      const Vector f_new = vo_new.convection * y.u + A * y.u - B.transpose() * y.p + Lf.transpose() * y.lambda;
      const Vector f_old = vo_old.convection * y0.u + A * y0.u - B.transpose() * y0.p + Lf0.transpose() * y0.lambda;
      ru = ph.rho_f * Mf * (y.u - y0.u) / dt + 0.5 * (f_new + f_old);
      rdX = Ms * 0.5 * (y.dX + y0.dX) - Ms * (y.X - y0.X) / dt;
      rX = drho * Ms * (y.dX - y0.dX) / dt + 0.5 * (Ks * y.X - Ms * y.lambda) + 0.5 * (Ks * y0.X - Ms * y0.lambda);
      rl = 0.5 * (Lf * y.u + Lf0 * y0.u) - Ms * (y.X - y0.X) / dt;
      break;
    }
  }
  Vector r(l.total());
  r << ru, rp, rdX, rX, rl;
  for (Index i : global_constraints(d, l).constrained_dofs()) r[i] = 0;
  return r;
}

}  // namespace

TEST_SUITE("saddle") {

TEST_CASE("pack and unpack are inverse")
{
  const Model m = build_model(fixture::small_annulus());
  const State s = fixture::random_state(*m.disc, m.X0, 1, 0.25);
  const BlockLayout l = layout_of(*m.disc);
  CHECK(l.total() == l.nu + l.np + 3 * l.ns);
  const State back = unpack(pack(s, l), l, 0.25);
  CHECK(back.u == s.u);
  CHECK(back.p == s.p);
  CHECK(back.dX == s.dX);
  CHECK(back.X == s.X);
  CHECK(back.lambda == s.lambda);
  State bad = s;
  bad.p.resize(3);
  CHECK_THROWS_AS(pack(bad, l), std::invalid_argument);
}

TEST_CASE("assembled step equations match the oracle residual for every scheme")
{
  const Model m = build_model(fixture::small_annulus(4, 1.5, 2));
  const Discretization& d = *m.disc;
  const Real dt = 0.05;
  const State y1 = fixture::random_state(d, m.X0, 10, 0.0);
  const State y0 = fixture::random_state(d, m.X0, 20, dt);
  const State y = fixture::random_state(d, m.X0, 30, 2 * dt);
  History h(y1);
  h.push(y0);
  const auto [Ms, Ks] = oracle::solid_oracle(d.solid_mesh(), d.physics().kappa);
  const Real rho = d.physics().rho_f;
  const Real nu = d.physics().nu;
  const auto vo_new = oracle::velocity_oracle(d.fluid(), nu, y.u, rho);
  const auto vo_old = oracle::velocity_oracle(d.fluid(), nu, y0.u, rho);
  const auto vo_mid = oracle::velocity_oracle(d.fluid(), nu, 0.5 * (y.u + y0.u), rho);
  for (Scheme s : {Scheme::be, Scheme::bdf2, Scheme::cnm, Scheme::cnt}) {
    CAPTURE(to_string(s));
    const BlockSystem sys = build_system(d, s, dt, h, implicit_frozen(s, h, y));
    const Vector r = sys.matrix * pack(y, sys.layout) - sys.rhs;
    const Vector ro = oracle_residual(d, vo_new, vo_old, vo_mid, Ms, Ks, s, dt, h, y);
    CHECK((r - ro).cwiseAbs().maxCoeff() < 1e-10 * ro.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("sparse LU agrees with a dense solve")
{
  const Model m = build_model(fixture::small_annulus());
  const Discretization& d = *m.disc;
  const State y0 = fixture::random_state(d, m.X0, 40, 0);
  const History h(y0);
  const BlockSystem sys = build_system(d, Scheme::be, 0.05, h, extrapolated_frozen(Scheme::be, h));
  const LinearSolution sol = solve(sys);
  const Eigen::MatrixXd A(sys.matrix);
  const Vector xd = A.fullPivLu().solve(sys.rhs);
  CHECK((sol.x - xd).norm() < 1e-9 * xd.norm());
  CHECK(sol.relative_residual < 1e-12);
}

TEST_CASE("pressure pins equal the dimension of the pressure kernel")
{
  for (const Scenario& s : {fixture::small_annulus(4), fixture::small_disk(4), fixture::small_annulus(2)}) {
    const Model m = build_model(s);
    const Discretization& d = *m.disc;
    const DofConstraints& ub = d.velocity_constraints();
    std::vector<Index> free_u;
    for (Index i = 0; i < ub.dof_count(); ++i) {
      if (!ub.is_constrained(i)) free_u.push_back(i);
    }
    const Eigen::MatrixXd B = oracle::dense(d.divergence());
    Eigen::MatrixXd Bf(B.rows(), Index(free_u.size()));
    for (std::size_t j = 0; j < free_u.size(); ++j) Bf.col(Index(j)) = B.col(free_u[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Bf);
    lu.setThreshold(1e-10);
    const Index kernel = B.rows() - lu.rank();
    CHECK(Index(d.pressure_constraints().constrained_dofs().size()) == kernel);

    const History h(init_state(d, m.u0, m.X0));
    const BlockSystem sys = build_system(d, Scheme::be, 0.05, h, extrapolated_frozen(Scheme::be, h));
    Eigen::FullPivLU<Eigen::MatrixXd> full(Eigen::MatrixXd(sys.matrix));
    CHECK(full.isInvertible());
  }
}

TEST_CASE("build_system rejects bad input")
{
  const Model m = build_model(fixture::small_annulus());
  const History h(fixture::random_state(*m.disc, m.X0, 1, 0));
  const Frozen f = extrapolated_frozen(Scheme::be, h);
  CHECK_THROWS_AS(build_system(*m.disc, Scheme::bdf2, 0.05, h, f), std::invalid_argument);
  CHECK_THROWS_AS(build_system(*m.disc, Scheme::be, 0.0, h, f), std::invalid_argument);
  CHECK_THROWS_AS(build_system(*m.disc, Scheme::be, 0.05, h, Frozen{Vector::Zero(3), f.map}), std::invalid_argument);
}

TEST_CASE("frozen fields")
{
  const Vector a = Vector::Constant(3, 2.0);
  const Vector b = Vector::Constant(3, 0.5);
  CHECK(extrapolate(a, &b) == Vector::Constant(3, 3.5));
  CHECK(extrapolate(a, nullptr) == a);
  const Model m = build_model(fixture::small_annulus());
  const State y0 = fixture::random_state(*m.disc, m.X0, 1, 0);
  const State y1 = fixture::random_state(*m.disc, m.X0, 2, 0.1);
  History h(y0);
  const Frozen f_cnm = implicit_frozen(Scheme::cnm, h, y1);
  CHECK((f_cnm.transport - 0.5 * (y0.u + y1.u)).norm() == 0);
  CHECK((implicit_frozen(Scheme::cnt, h, y1).map - y1.X).norm() == 0);
  h.push(y1);
  CHECK((extrapolated_frozen(Scheme::bdf2, h).transport - (2 * y1.u - y0.u)).norm() < 1e-14);
  CHECK((extrapolated_frozen(Scheme::be, h).map - y1.X).norm() == 0);
  CHECK((extrapolated_frozen(Scheme::cnm, h).map - 0.5 * (3 * y1.X - y0.X)).norm() < 1e-14);
}

TEST_CASE("Picard converges to a root of the implicit equations")
{
  const Model m = build_model(fixture::small_annulus(4, 1.5, 10));
  const Discretization& d = *m.disc;
  const History h(init_state(d, m.u0, m.X0));
  for (Scheme s : {Scheme::be, Scheme::cnm, Scheme::cnt}) {
    CAPTURE(to_string(s));
    const StepOutcome out = picard_loop(d, s, 0.05, h, NonlinearMode::picard(1e-10));
    CHECK(out.residual <= 1e-10);
    CHECK(out.iterations == int(out.residual_history.size()));
    CHECK(nonlinear_residual(d, s, 0.05, h, out.state) == doctest::Approx(out.residual).epsilon(1e-3));
    CHECK(out.state.t == doctest::Approx(0.05));
  }
  CHECK_THROWS_AS(picard_loop(d, Scheme::be, 0.05, h, NonlinearMode::picard(1e-30, 2)), PicardDiverged);
}

TEST_CASE("semi-implicit step reports the implicit residual of its result")
{
  const Model m = build_model(fixture::small_annulus(4, 1.5, 10));
  const Discretization& d = *m.disc;
  const History h(init_state(d, m.u0, m.X0));
  const StepOutcome out = semi_implicit_step(d, Scheme::be, 0.05, h);
  CHECK(out.iterations == 1);
  CHECK(out.residual == doctest::Approx(nonlinear_residual(d, Scheme::be, 0.05, h, out.state)));
  CHECK(out.linear_residual < 1e-10);
}

TEST_CASE("block residual norm weights each block by its lumped mass")
{
  const Model m = build_model(fixture::small_annulus());
  const Discretization& d = *m.disc;
  const BlockLayout l = layout_of(d);
  Vector r = Vector::Zero(l.total());
  r[l.u()] = 3;
  r[l.lambda() + 1] = 4;
  const Real expected = std::sqrt(9 / d.lumped_fluid()[0] + 16 / d.lumped_solid()[1]);
  CHECK(block_residual_norm(d, l, r) == doctest::Approx(expected));
}

}
