#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace fsi {

using Real = double;
using Index = Eigen::Index;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Point = Vec2<Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Compressed row storage; Eigen keeps column indices sorted and unique per row.
using SparseMat = Eigen::SparseMatrix<Real, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Real>;
using TripletList = std::vector<Triplet>;

inline SparseMat from_triplets(Index rows, Index cols, const TripletList& t)
{
  SparseMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

/// Signed area of the triangle (a, b, c); positive when counter-clockwise.
template <typename Scalar>
Scalar signed_area(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c)
{
  return Scalar(0.5) * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

/// Barycentric coordinates of p with respect to (a, b, c).
template <typename Scalar>
Vec3<Scalar> barycentric(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c,
                         const Vec2<Scalar>& p)
{
  const Scalar area = signed_area(a, b, c);
  Vec3<Scalar> l;
  l[0] = signed_area(p, b, c) / area;
  l[1] = signed_area(a, p, c) / area;
  l[2] = Scalar(1) - l[0] - l[1];
  return l;
}

/// Gradients of the three P1 hat functions, one per column.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 3> hat_gradients(const Vec2<Scalar>& a, const Vec2<Scalar>& b,
                                          const Vec2<Scalar>& c)
{
  const Scalar twice_area = Scalar(2) * signed_area(a, b, c);
  Eigen::Matrix<Scalar, 2, 3> g;
  g.col(0) << (b.y() - c.y()), (c.x() - b.x());
  g.col(1) << (c.y() - a.y()), (a.x() - c.x());
  g.col(2) << (a.y() - b.y()), (b.x() - a.x());
  return g / twice_area;
}

}  // namespace fsi
