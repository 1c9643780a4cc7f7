#include "fsi/quadrature.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace fsi {

namespace {

// Dunavant symmetric rules, weights normalised to unit area.
struct Builder {
  QuadRule rule;

  Builder& centroid(Real w)
  {
    rule.points.emplace_back(1.0 / 3, 1.0 / 3, 1.0 / 3);
    rule.weights.push_back(0.5 * w);
    return *this;
  }
  // Orbit of (a, a, 1-2a).
  Builder& orbit3(Real a, Real w)
  {
    const Real b = 1 - 2 * a;
    for (const Vec3<Real>& p : {Vec3<Real>(a, a, b), Vec3<Real>(a, b, a), Vec3<Real>(b, a, a)}) {
      rule.points.push_back(p);
      rule.weights.push_back(0.5 * w);
    }
    return *this;
  }
  // Orbit of (a, b, 1-a-b) with distinct entries.
  Builder& orbit6(Real a, Real b, Real w)
  {
    const Real c = 1 - a - b;
    const std::array<Vec3<Real>, 6> perms{Vec3<Real>(a, b, c), Vec3<Real>(a, c, b), Vec3<Real>(b, a, c),
                                          Vec3<Real>(b, c, a), Vec3<Real>(c, a, b), Vec3<Real>(c, b, a)};
    for (const auto& p : perms) {
      rule.points.push_back(p);
      rule.weights.push_back(0.5 * w);
    }
    return *this;
  }
  QuadRule done(int degree)
  {
    rule.degree = degree;
    return rule;
  }
};

const std::array<QuadRule, 5>& table()
{
  static const std::array<QuadRule, 5> rules{
      Builder{}.centroid(1.0).done(1),
      Builder{}.orbit3(1.0 / 6, 1.0 / 3).done(2),
      Builder{}
          .orbit3(0.445948490915965, 0.223381589678011)
          .orbit3(0.091576213509771, 0.109951743655322)
          .done(4),
      Builder{}
          .centroid(0.225)
          .orbit3(0.470142064105115, 0.132394152788506)
          .orbit3(0.101286507323456, 0.125939180544827)
          .done(5),
      Builder{}
          .orbit3(0.249286745170910, 0.116786275726379)
          .orbit3(0.063089014491502, 0.050844906370207)
          .orbit6(0.053145049844817, 0.310352451033784, 0.082851075618374)
          .done(6),
  };
  return rules;
}

}  // namespace

const QuadRule& triangle_rule(int degree)
{
  for (const auto& r : table()) {
    if (r.degree >= degree) return r;
  }
  throw std::invalid_argument("no triangle rule of degree " + std::to_string(degree));
}

}  // namespace fsi
