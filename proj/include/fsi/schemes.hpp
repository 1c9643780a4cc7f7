#pragma once

#include <functional>
#include <vector>

#include "fsi/saddle.hpp"

namespace fsi {

/// u^0 and X^0 given; dX^0 is the L2 projection of u^0 o X^0, p^0 = 0 and
/// lambda^0 balances the elastic force (or is zero on request).
/// Throws SolidEscaped if X^0 leaves the fluid domain.
State init_state(const Discretization& d, const Vector& u0, const Vector& X0, bool zero_multiplier = false);

StepOutcome step_be(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode);
StepOutcome step_bdf2(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode);
StepOutcome step_cnm(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode);
StepOutcome step_cnt(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode);

StepOutcome step(Scheme scheme, const Discretization& d, const History& h, Real dt, const NonlinearMode& mode);

struct StepRecord {
  int step = 0;
  Real t = 0;
  Scheme scheme = Scheme::be;  // the startup step of BDF2 reports the one-step scheme it used
  int picard_iterations = 0;
  Real residual = 0;
  Real linear_residual = 0;
};

/// Called after every step with the levels before the step and the new state.
using StepObserver = std::function<void(const History& before, const State& after, const StepRecord& record)>;

struct Trajectory {
  State final_state;
  std::vector<StepRecord> records;
  std::vector<State> snapshots;
};

/// Marches from the initial state to T. Snapshot times are matched to the nearest step.
Trajectory run(const Discretization& d, const State& initial, const SchemeConfig& config,
               const std::vector<Real>& snapshot_times = {}, const StepObserver& observer = {});

}  // namespace fsi
