#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fsi/diagnostics.hpp"
#include "fsi/schemes.hpp"

namespace fsi {

enum class SolidKind { annulus, disk };

struct SolidSpec {
  SolidKind kind = SolidKind::annulus;
  // annulus sector
  Real r_in = 0.3;
  Real r_out = 0.5;
  int n_r = 8;
  int n_theta = 16;
  Real stretch = 1.4;  // initial map (s1 / stretch, stretch * s2)
  bool symmetry = true;
  // disk
  Point center = Point(0.6, 0.5);
  Real diameter = 0.2;
  int rings = 18;

  bool operator==(const SolidSpec&) const = default;
};

struct BoundarySpec {
  WallKind bottom = WallKind::no_slip;
  WallKind right = WallKind::no_slip;
  WallKind top = WallKind::no_slip;
  WallKind left = WallKind::no_slip;
  Point lid_velocity = Point(1, 0);

  bool operator==(const BoundarySpec&) const = default;
  std::vector<WallCondition> walls() const;
};

struct Scenario {
  std::string name;
  int M = 8;
  SolidSpec solid;
  BoundarySpec boundary;
  PhysicsConfig physics;
  Real T = 0.2;

  bool operator==(const Scenario& o) const;
  void validate() const;
};

struct ConvergenceSpec {
  std::vector<Scheme> schemes{Scheme::be, Scheme::bdf2, Scheme::cnm, Scheme::cnt};
  std::vector<NonlinearMode::Kind> modes{NonlinearMode::Kind::picard, NonlinearMode::Kind::semi_implicit};
  std::vector<int> divisors{4, 8, 16, 32};
  std::vector<int> meshes{8};
  Real reference_dt = 0.001;

  bool operator==(const ConvergenceSpec&) const = default;
};

struct VolumeSpec {
  std::vector<Scheme> schemes{Scheme::be, Scheme::bdf2, Scheme::cnm, Scheme::cnt};
  int coarse_M = 0;  // 0 disables the coarse comparison run
  int coarse_rings = 0;

  bool operator==(const VolumeSpec&) const = default;
};

struct RunConfig {
  Scenario scenario;
  SchemeConfig scheme;
  std::string output_dir = "out";
  std::vector<Real> snapshot_times;
  int coupling_degree = 4;
  bool reference_run = false;
  ConvergenceSpec convergence;
  VolumeSpec volume;

  bool operator==(const RunConfig& o) const;
  void validate() const;
};

/// annulus_convergence, annulus_show or floating_disk (desk resolution).
Scenario builtin_scenario(const std::string& name);

/// Scenario defaults plus the matching run settings.
RunConfig builtin_config(const std::string& name);

/// Sectioned key = value text. Keys absent from the file keep the builtin defaults
/// of the scenario named in [scenario] name.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);
void emit_config(std::ostream& os, const RunConfig& c);

/// Discretization, initial velocity and initial map of a scenario.
struct Model {
  std::unique_ptr<Discretization> disc;
  Vector u0;
  Vector X0;
};
Model build_model(const Scenario& s, int coupling_degree = 4);

struct DofTable {
  int M = 0;
  Index velocity = 0;
  Index pressure = 0;
  Index solid = 0;
  Index multiplier = 0;
};
DofTable dof_table(const Scenario& s);

// ---------------------------------------------------------------------------
// Drivers

struct ConvergenceCell {
  Scheme scheme = Scheme::be;
  NonlinearMode::Kind mode = NonlinearMode::Kind::picard;
  int M = 0;
  std::vector<Real> dts;
  std::vector<Real> error_velocity;
  std::vector<Real> error_structure;
  std::vector<int> max_picard;
  std::vector<Real> max_residual;
  std::vector<Real> max_divergence_ratio;  // max over steps of |B u|_2 / |u|_M
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceStudy {
  std::vector<ConvergenceCell> cells;
  const ConvergenceCell* find(Scheme s, NonlinearMode::Kind m, int M) const;
};

/// Reference run (cached under cache_dir when non-empty) and the dt ladder
/// for every scheme and mode of the config.
ConvergenceStudy run_convergence(const RunConfig& c, const std::string& cache_dir);

struct VolumeSeries {
  Scheme scheme = Scheme::be;
  int M = 0;
  std::vector<Real> t;
  std::vector<Real> pct_change;
  int inverted_elements = 0;
  Real max_divergence_ratio = 0;
  Real final_pct() const { return pct_change.empty() ? 0 : pct_change.back(); }
};

/// All schemes of the config at its dt on the configured mesh, then (if set)
/// the coarse comparison with the config's scheme.
std::vector<VolumeSeries> run_volume(const RunConfig& c);

int cmd_run(const RunConfig& c);
int cmd_convergence(const RunConfig& c);
int cmd_volume(const RunConfig& c);
int cmd_dry_run(const RunConfig& c, std::ostream& os);

}  // namespace fsi
