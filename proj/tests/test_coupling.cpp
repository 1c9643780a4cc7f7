#include <doctest.h>

#include <cmath>

#include "fsi/coupling.hpp"
#include "oracles.hpp"

using namespace fsi;

namespace {

struct Setup {
  std::shared_ptr<const RefinedPair> pair;
  std::shared_ptr<const TriMesh> solid_mesh;
  FunctionSpace V, S;
  PointLocator locator;

  Setup(int M, const Point& center, Real diameter, int rings)
      : pair(std::make_shared<const RefinedPair>(build_unit_square_mesh(M))),
        solid_mesh(std::make_shared<const TriMesh>(build_disk_mesh(center, diameter, rings))),
        V(FunctionSpace::velocity(pair)),
        S(FunctionSpace::solid(solid_mesh)),
        locator(pair->fine)
  {
  }
};

/// Identity plus a smooth swirl, interpolated on the solid vertices.
Vector swirl_map(const FunctionSpace& S, const Point& c)
{
  return interpolate(S, [&](const Point& x) {
    const Point d = x - c;
    return Point(x.x() - 0.8 * d.y() * d.norm(), x.y() + 0.5 * d.x() * d.x());
  });
}

}  // namespace

TEST_SUITE("coupling") {

TEST_CASE("L_f matches the oracle when the solid sits inside one fluid element")
{
  const Point c(0.34375, 0.15625);
  Setup s(4, c, 0.02, 2);
  const Vector X = swirl_map(s.S, c);
  std::optional<int> host;
  for (int v = 0; v < s.solid_mesh->num_vertices(); ++v) {
    const auto h = oracle::scan_locate(s.pair->fine, Point(X[2 * v], X[2 * v + 1]), 0);
    REQUIRE(h.has_value());
    if (!host) host = h;
    REQUIRE(*h == *host);
  }
  const SparseMat L = assemble_lf(s.S, s.V, X, s.locator);
  CHECK(oracle::relative_difference(oracle::dense(L), oracle::lf_oracle(*s.solid_mesh, s.pair->fine, X)) < 1e-12);
}

TEST_CASE("L_f converges to the oracle under rule refinement for a general map")
{
  const Point c(0.5, 0.45);
  Setup s(4, c, 0.4, 4);
  const Vector X = swirl_map(s.S, c);
  const Eigen::MatrixXd ref = oracle::lf_oracle(*s.solid_mesh, s.pair->fine, X);
  const Real e4 = oracle::relative_difference(oracle::dense(assemble_lf(s.S, s.V, X, s.locator, triangle_rule(4))), ref);
  CHECK(e4 < 0.2);
  CHECK(e4 > 1e-8);
}

TEST_CASE("rows of L_f sum like the solid mass (partition of unity)")
{
  const Point c(0.5, 0.45);
  Setup s(8, c, 0.4, 5);
  const Vector X = swirl_map(s.S, c);
  const SparseMat L = assemble_lf(s.S, s.V, X, s.locator);
  const SparseMat Ms = assemble_ls(s.S, s.S);
  for (int comp = 0; comp < 2; ++comp) {
    Vector one_u = Vector::Zero(s.V.dof_count());
    Vector one_s = Vector::Zero(s.S.dof_count());
    for (Index i = comp; i < one_u.size(); i += 2) one_u[i] = 1;
    for (Index i = comp; i < one_s.size(); i += 2) one_s[i] = 1;
    CHECK((L * one_u - Ms * one_s).norm() < 1e-14);
  }
}

TEST_CASE("L_f reproduces linear velocities exactly")
{
  const Point c(0.5, 0.45);
  Setup s(8, c, 0.4, 5);
  const Vector X = swirl_map(s.S, c);
  auto field = [](const Point& x) { return Point(0.3 + 2 * x.x() - x.y(), -1 + 0.5 * x.x() + 3 * x.y()); };
  const Vector u = interpolate(s.V, field);
  Vector uX(s.S.dof_count());
  for (int v = 0; v < s.solid_mesh->num_vertices(); ++v) {
    const Point f = field(Point(X[2 * v], X[2 * v + 1]));
    uX[2 * v] = f.x();
    uX[2 * v + 1] = f.y();
  }
  const SparseMat L = assemble_lf(s.S, s.V, X, s.locator);
  const Vector expected = assemble_ls(s.S, s.S) * uX;
  CHECK((L * u - expected).norm() < 1e-13 * expected.norm());
}

TEST_CASE("L_s is the solid mass matrix")
{
  Setup s(2, Point(0.5, 0.5), 0.3, 3);
  const auto [M, K] = oracle::solid_oracle(*s.solid_mesh, 0);
  CHECK(oracle::relative_difference(oracle::dense(assemble_ls(s.S, s.S)), M) < 1e-12);
}

TEST_CASE("mapped quadrature points follow the map and carry the reference weight")
{
  const Point c(0.5, 0.5);
  Setup s(4, c, 0.3, 3);
  const Vector X = swirl_map(s.S, c);
  const auto pts = map_quadrature(s.S, X, triangle_rule(2), s.locator);
  CHECK(pts.size() == std::size_t(s.solid_mesh->num_triangles() * triangle_rule(2).size()));
  Real w = 0;
  for (const auto& p : pts) {
    w += p.weight;
    REQUIRE(p.host >= 0);
    Point back = Point::Zero();
    for (int a = 0; a < 3; ++a) back += p.host_bary[a] * s.pair->fine.vertex(p.host, a);
    CHECK((back - p.mapped).norm() < 1e-14);
  }
  CHECK(w == doctest::Approx(s.solid_mesh->total_area()).epsilon(1e-13));
}

TEST_CASE("a map leaving the fluid domain raises SolidEscaped")
{
  Setup s(4, Point(0.5, 0.5), 0.3, 3);
  const Vector X = interpolate(s.S, [](const Point& x) { return Point(x.x() + 0.5, x.y()); });
  const auto pts = map_quadrature(s.S, X, triangle_rule(2), s.locator);
  bool some_outside = false;
  for (const auto& p : pts) some_outside |= p.host < 0;
  CHECK(some_outside);
  CHECK_THROWS_AS(assemble_lf(s.S, s.V, X, s.locator), SolidEscaped);
}

TEST_CASE("velocity evaluation at a located point")
{
  const auto pair = std::make_shared<const RefinedPair>(build_unit_square_mesh(3));
  const FunctionSpace V = FunctionSpace::velocity(pair);
  const PointLocator loc(pair->fine);
  const Vector u = interpolate(V, [](const Point& x) { return Point(x.x() - 2 * x.y(), 4 * x.x()); });
  const Point q(0.37, 0.81);
  const auto l = loc.locate(q);
  REQUIRE(l.has_value());
  const Point v = evaluate_velocity(pair->fine, u, l->triangle, l->bary);
  CHECK((v - Point(0.37 - 1.62, 1.48)).norm() < 1e-14);
}

}
