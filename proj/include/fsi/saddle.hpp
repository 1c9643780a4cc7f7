#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fsi/discretization.hpp"
#include "fsi/state.hpp"

namespace fsi {

/// Block offsets in the unknown ordering (u, p, dX, X, lambda).
///
/// The pressure kernel (the constants of the P1 and P0 parts and corner modes)
/// is removed by the pins of Discretization::pressure_constraints.
struct BlockLayout {
  Index nu = 0;
  Index np = 0;
  Index ns = 0;
  Index np1 = 0;  // P1 part of the pressure

  Index u() const { return 0; }
  Index p() const { return nu; }
  Index dX() const { return nu + np; }
  Index X() const { return nu + np + ns; }
  Index lambda() const { return nu + np + 2 * ns; }
  Index total() const { return nu + np + 3 * ns; }
};

BlockLayout layout_of(const Discretization& d);

Vector pack(const State& s, const BlockLayout& layout);
State unpack(const Vector& x, const BlockLayout& layout, Real t);

/// Transport velocity and map frozen inside the convection and coupling blocks.
struct Frozen {
  Vector transport;
  Vector map;
};

struct BlockSystem {
  SparseMat matrix;
  Vector rhs;
  BlockLayout layout;
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PicardDiverged : public std::runtime_error {
 public:
  PicardDiverged(const std::string& what, std::vector<Real> residuals)
      : std::runtime_error(what), residuals(std::move(residuals))
  {
  }
  std::vector<Real> residuals;
};

/// Constraints of all blocks; the solid normal components constrain dX, X and lambda together.
DofConstraints global_constraints(const Discretization& d, const BlockLayout& layout);

/// Linear system of one step with frozen transport and map.
BlockSystem build_system(const Discretization& d, Scheme scheme, Real dt, const History& history,
                         const Frozen& frozen);

struct LinearSolution {
  Vector x;
  Real relative_residual = 0;
};

/// Sparse LU with partial pivoting.
LinearSolution solve(const BlockSystem& system);

/// Frozen fields that make build_system reproduce the fully implicit equations at the given iterate.
Frozen implicit_frozen(Scheme scheme, const History& history, const State& iterate);

/// Frozen fields for the semi-implicit step (extrapolated from the history).
Frozen extrapolated_frozen(Scheme scheme, const History& history);

/// Mass-scaled L2 norm of the block residuals.
Real block_residual_norm(const Discretization& d, const BlockLayout& layout, const Vector& r);

/// Residual of the fully implicit equations at a candidate new level.
Real nonlinear_residual(const Discretization& d, Scheme scheme, Real dt, const History& history,
                        const State& candidate);

struct StepOutcome {
  State state;
  int iterations = 0;
  Real residual = 0;          // nonlinear residual of the returned state
  Real linear_residual = 0;   // largest relative linear residual over the solves
  std::vector<Real> residual_history;
};

StepOutcome picard_loop(const Discretization& d, Scheme scheme, Real dt, const History& history,
                        const NonlinearMode& mode);

StepOutcome semi_implicit_step(const Discretization& d, Scheme scheme, Real dt, const History& history);

/// 2 y^n - y^{n-1}, or y^n when only one level is known.
Vector extrapolate(const Vector& yn, const Vector* yprev);

}  // namespace fsi
