#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library's quadrature tables, hat gradients or assembly.

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "fsi/fem.hpp"
#include "fsi/mesh.hpp"

namespace oracle {

using fsi::Index;
using fsi::Point;
using fsi::Real;

/// Coefficients (c0, cx, cy) of the three affine hats on a triangle, one per column.
inline Eigen::Matrix3d hat_coefficients(const Point& a, const Point& b, const Point& c)
{
  Eigen::Matrix3d V;
  V << 1, a.x(), a.y(), 1, b.x(), b.y(), 1, c.x(), c.y();
  return V.inverse();
}

inline Eigen::Vector3d hats_at(const Eigen::Matrix3d& coef, const Point& p)
{
  return coef.transpose() * Eigen::Vector3d(1, p.x(), p.y());
}

inline Eigen::Matrix<double, 2, 3> hat_grads(const Eigen::Matrix3d& coef) { return coef.bottomRows<2>(); }

/// Collapsed-square Gauss-Legendre rule on a physical triangle, n points per direction.
struct TrianglePoint {
  Point x;
  Real w;
};

template <int N = 8>
std::vector<TrianglePoint> triangle_points(const Point& a, const Point& b, const Point& c)
{
  using G = boost::math::quadrature::gauss<double, N>;
  std::vector<double> x, w;
  const auto& ax = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (ax[i] == 0) {
      x.push_back(0.5);
      w.push_back(0.5 * wt[i]);
      continue;
    }
    x.push_back(0.5 * (1 + ax[i]));
    w.push_back(0.5 * wt[i]);
    x.push_back(0.5 * (1 - ax[i]));
    w.push_back(0.5 * wt[i]);
  }
  const Real twice_area = std::abs((b - a).x() * (c - a).y() - (c - a).x() * (b - a).y());
  std::vector<TrianglePoint> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const Real s = x[i];
      const Real t = x[j] * (1 - s);
      out.push_back({a + s * (b - a) + t * (c - a), w[i] * w[j] * (1 - s) * twice_area});
    }
  }
  return out;
}

/// First triangle (lowest id) containing p with all barycentric coordinates >= -tol.
inline std::optional<int> scan_locate(const fsi::TriMesh& m, const Point& p, Real tol)
{
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Eigen::Vector3d l = hats_at(hat_coefficients(m.vertex(t, 0), m.vertex(t, 1), m.vertex(t, 2)), p);
    if (l.minCoeff() >= -tol) return t;
  }
  return std::nullopt;
}

/// Two triangles on a skewed quadrilateral with the unit-square boundary markers.
inline fsi::TriMesh two_triangle_mesh()
{
  fsi::TriMesh m;
  m.vertices = {Point(0, 0), Point(1.2, 0.1), Point(1.0, 0.9), Point(-0.1, 1.1)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.boundary_edges = {{{0, 1}, fsi::markers::bottom},
                      {{1, 2}, fsi::markers::right},
                      {{2, 3}, fsi::markers::top},
                      {{3, 0}, fsi::markers::left}};
  return m;
}

/// Dense matrix of a sparse one.
inline Eigen::MatrixXd dense(const fsi::SparseMat& A) { return Eigen::MatrixXd(A); }

inline Real relative_difference(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
  const Real scale = std::max(A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  return scale > 0 ? (A - B).cwiseAbs().maxCoeff() / scale : 0;
}

/// Velocity (vector P1 on the fine mesh) oracle matrices: mass, 2 nu eps:eps, convection.
struct VelocityOracle {
  Eigen::MatrixXd mass, viscous, convection, divergence;
};

inline VelocityOracle velocity_oracle(const fsi::RefinedPair& pair, Real nu, const fsi::Vector& w, Real rho)
{
  const fsi::TriMesh& fine = pair.fine;
  const fsi::TriMesh& coarse = pair.coarse;
  const Index nu_dofs = 2 * Index(fine.num_vertices());
  const Index np1 = coarse.num_vertices();
  const Index np = np1 + coarse.num_triangles();
  VelocityOracle o;
  o.mass = Eigen::MatrixXd::Zero(nu_dofs, nu_dofs);
  o.viscous = Eigen::MatrixXd::Zero(nu_dofs, nu_dofs);
  o.convection = Eigen::MatrixXd::Zero(nu_dofs, nu_dofs);
  o.divergence = Eigen::MatrixXd::Zero(np, nu_dofs);
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const auto& tri = fine.triangles[t];
    const Eigen::Matrix3d coef = hat_coefficients(fine.vertex(t, 0), fine.vertex(t, 1), fine.vertex(t, 2));
    const Eigen::Matrix<double, 2, 3> G = hat_grads(coef);
    const int parent = pair.parent[t];
    const auto& ptri = coarse.triangles[parent];
    const Eigen::Matrix3d pcoef =
        hat_coefficients(coarse.vertex(parent, 0), coarse.vertex(parent, 1), coarse.vertex(parent, 2));
    for (const auto& q : triangle_points(fine.vertex(t, 0), fine.vertex(t, 1), fine.vertex(t, 2))) {
      const Eigen::Vector3d phi = hats_at(coef, q.x);
      const Eigen::Vector3d psi = hats_at(pcoef, q.x);
      Point wq = Point::Zero();
      for (int a = 0; a < 3; ++a) wq += phi[a] * Point(w[2 * tri[a]], w[2 * tri[a] + 1]);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          for (int c = 0; c < 2; ++c) {
            for (int e = 0; e < 2; ++e) {
              const Index i = 2 * tri[a] + c;
              const Index j = 2 * tri[b] + e;
              // test phi_a e_c, trial phi_b e_e
              if (c == e) o.mass(i, j) += q.w * phi[a] * phi[b];
              Eigen::Matrix2d gi = Eigen::Matrix2d::Zero();
              Eigen::Matrix2d gj = Eigen::Matrix2d::Zero();
              gi.row(c) = G.col(a).transpose();
              gj.row(e) = G.col(b).transpose();
              const Eigen::Matrix2d ei = 0.5 * (gi + gi.transpose());
              const Eigen::Matrix2d ej = 0.5 * (gj + gj.transpose());
              o.viscous(i, j) += q.w * 2 * nu * (ei.array() * ej.array()).sum();
              if (c == e) {
                const Real adv_j = wq.dot(G.col(b)) * phi[a];
                const Real adv_i = wq.dot(G.col(a)) * phi[b];
                o.convection(i, j) += q.w * 0.5 * rho * (adv_j - adv_i);
              }
            }
          }
        }
        for (int c = 0; c < 2; ++c) {
          const Index j = 2 * tri[a] + c;
          const Real div = G(c, a);
          for (int k = 0; k < 3; ++k) o.divergence(ptri[k], j) += q.w * div * psi[k];
          o.divergence(np1 + parent, j) += q.w * div;
        }
      }
    }
  }
  return o;
}

/// Solid (vector P1) mass and kappa grad:grad stiffness.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> solid_oracle(const fsi::TriMesh& m, Real kappa)
{
  const Index n = 2 * Index(m.num_vertices());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Eigen::Matrix3d coef = hat_coefficients(m.vertex(t, 0), m.vertex(t, 1), m.vertex(t, 2));
    const Eigen::Matrix<double, 2, 3> G = hat_grads(coef);
    for (const auto& q : triangle_points(m.vertex(t, 0), m.vertex(t, 1), m.vertex(t, 2))) {
      const Eigen::Vector3d phi = hats_at(coef, q.x);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          for (int c = 0; c < 2; ++c) {
            M(2 * tri[a] + c, 2 * tri[b] + c) += q.w * phi[a] * phi[b];
            K(2 * tri[a] + c, 2 * tri[b] + c) += q.w * kappa * G.col(a).dot(G.col(b));
          }
        }
      }
    }
  }
  return {M, K};
}

/// (zeta_l, phi_j(X))_B by high-order quadrature on the solid reference elements,
/// with the fluid hats found by exhaustive search.
inline Eigen::MatrixXd lf_oracle(const fsi::TriMesh& solid, const fsi::TriMesh& fine, const fsi::Vector& X)
{
  const Index ns = 2 * Index(solid.num_vertices());
  const Index nu = 2 * Index(fine.num_vertices());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(ns, nu);
  for (int t = 0; t < solid.num_triangles(); ++t) {
    const auto& tri = solid.triangles[t];
    const Eigen::Matrix3d coef = hat_coefficients(solid.vertex(t, 0), solid.vertex(t, 1), solid.vertex(t, 2));
    for (const auto& q : triangle_points(solid.vertex(t, 0), solid.vertex(t, 1), solid.vertex(t, 2))) {
      const Eigen::Vector3d zeta = hats_at(coef, q.x);
      Point y = Point::Zero();
      for (int a = 0; a < 3; ++a) y += zeta[a] * Point(X[2 * tri[a]], X[2 * tri[a] + 1]);
      const auto host = scan_locate(fine, y, 1e-12);
      if (!host) throw std::runtime_error("oracle point outside the fluid mesh");
      const auto& ftri = fine.triangles[*host];
      const Eigen::Vector3d phi =
          hats_at(hat_coefficients(fine.vertex(*host, 0), fine.vertex(*host, 1), fine.vertex(*host, 2)), y);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          for (int c = 0; c < 2; ++c) L(2 * tri[a] + c, 2 * ftri[b] + c) += q.w * zeta[a] * phi[b];
        }
      }
    }
  }
  return L;
}

}  // namespace oracle
