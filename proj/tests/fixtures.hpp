#pragma once

// Small scenarios shared by the solver tests.

#include <random>

#include "fsi/scenario.hpp"

namespace fixture {

using fsi::Real;
using fsi::Vector;

inline fsi::Scenario small_annulus(int M = 4, Real rho_s = 1.5, Real kappa = 2)
{
  fsi::Scenario s = fsi::builtin_scenario("annulus_convergence");
  s.M = M;
  s.solid.n_r = 2;
  s.solid.n_theta = 4;
  s.physics.rho_s = rho_s;
  s.physics.kappa = kappa;
  return s;
}

inline fsi::Scenario small_disk(int M = 4, int rings = 3)
{
  fsi::Scenario s = fsi::builtin_scenario("floating_disk");
  s.M = M;
  s.solid.rings = rings;
  s.solid.diameter = 0.3;
  s.physics.nu = 0.1;
  return s;
}

inline Vector random_vector(fsi::Index n, unsigned seed, Real amplitude = 1)
{
  std::mt19937 gen(seed);
  std::uniform_real_distribution<Real> u(-amplitude, amplitude);
  Vector v(n);
  for (fsi::Index i = 0; i < n; ++i) v[i] = u(gen);
  return v;
}

/// A state with random fields near the initial map that satisfies the global constraints.
inline fsi::State random_state(const fsi::Discretization& d, const Vector& X0, unsigned seed, Real t)
{
  const fsi::BlockLayout l = fsi::layout_of(d);
  fsi::State s;
  s.t = t;
  s.u = random_vector(l.nu, seed);
  s.p = random_vector(l.np, seed + 1);
  s.dX = random_vector(l.ns, seed + 2);
  s.X = X0 + random_vector(l.ns, seed + 3, 0.01);
  s.lambda = random_vector(l.ns, seed + 4);
  Vector x = fsi::pack(s, l);
  fsi::global_constraints(d, l).impose(x);
  return fsi::unpack(x, l, t);
}

}  // namespace fixture
