#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "fsi/discretization.hpp"
#include "fsi/state.hpp"

namespace fsi {

struct EnergyReport {
  Real t = 0;
  Real kinetic_fluid = 0;        // rho_f/2 |u|^2
  Real viscous_dissipation = 0;  // a(u, u) = 2 nu |eps(u)|^2
  Real solid_kinetic = 0;        // drho/2 |dX|^2
  Real elastic = 0;              // E(X)
  Real monitor = std::numeric_limits<Real>::quiet_NaN();

  Real total() const { return kinetic_fluid + solid_kinetic + elastic; }
};

EnergyReport energy_report(const Discretization& d, const State& s);

/// kappa/2 sum_T area(T) |F_T|^2 for the linear law.
Real elastic_energy(const TriMesh& solid, const Vector& X, Real kappa);

/// Per-step left-hand side of the discrete energy estimate; NaN for CNT.
///
/// BE and CNM evaluate an inequality (expected <= 0). BDF2 is evaluated as
/// the telescoped identity, so it vanishes up to solver accuracy.
Real stability_monitor(const Discretization& d, Scheme scheme, Real dt, const History& before, const State& after);

/// max(1, total energy).
Real monitor_scale(const Discretization& d, const State& s);

/// 2 (3a - 4b + c) . a
template <typename V>
auto bdf2_formula_lhs(const V& a, const V& b, const V& c)
{
  return 2 * (3 * a - 4 * b + c).dot(a);
}

/// |a|^2 + |2a - b|^2 - |b|^2 - |2b - c|^2 + |a - 2b + c|^2
template <typename V>
auto bdf2_formula_rhs(const V& a, const V& b, const V& c)
{
  return a.squaredNorm() + (2 * a - b).squaredNorm() - b.squaredNorm() - (2 * b - c).squaredNorm() +
         (a - 2 * b + c).squaredNorm();
}

struct VolumeReport {
  Real volume = 0;
  std::vector<int> inverted_elements;
};

/// sum_T area(T) det F_T.
VolumeReport solid_volume(const TriMesh& solid, const Vector& X);

Real volume_pct_change(Real volume, Real initial);

/// sqrt(e^T M e) / sqrt(r^T M r).
Real l2_error(const Vector& field, const Vector& reference, const SparseMat& mass);

/// |B u|_2 and |u|_M of a velocity.
struct DivergenceReport {
  Real divergence = 0;
  Real mass_norm = 0;
};
DivergenceReport divergence_report(const Discretization& d, const Vector& u);

/// |B u|_2 / |u|_M, zero for a zero velocity.
Real divergence_ratio(const Discretization& d, const Vector& u);

struct ConvergenceRow {
  Real dt = 0;
  Real error_velocity = 0;
  Real error_structure = 0;
  std::optional<Real> rate_velocity;
  std::optional<Real> rate_structure;
};

/// Rates log2(e(2 dt) / e(dt)) from consecutive halvings.
std::vector<ConvergenceRow> convergence_table(const std::vector<Real>& dts, const std::vector<Real>& error_velocity,
                                              const std::vector<Real>& error_structure);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_convergence_text(std::ostream& os, const std::vector<ConvergenceRow>& rows);

/// Diagnostics CSV header and one row, 17 significant digits.
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const EnergyReport& e, Real volume_pct, int picard_iters, Real residual);

}  // namespace fsi
