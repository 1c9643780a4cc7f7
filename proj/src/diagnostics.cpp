#include "fsi/diagnostics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

namespace fsi {

namespace {

Real quad(const SparseMat& A, const Vector& x) { return x.dot(A * x); }

/// [|a|^2 + |2a-b|^2 - |b|^2 - |2b-c|^2 + |a-2b+c|^2] in the A inner product.
Real bdf2_bracket(const SparseMat& A, const Vector& a, const Vector& b, const Vector& c)
{
  return quad(A, a) + quad(A, 2 * a - b) - quad(A, b) - quad(A, 2 * b - c) + quad(A, a - 2 * b + c);
}

Mat2<Real> deformation_gradient(const TriMesh& m, int e, const Vector& X)
{
  const auto& tri = m.triangles[e];
  const auto g = hat_gradients(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]);
  Mat2<Real> F = Mat2<Real>::Zero();
  for (int a = 0; a < 3; ++a) F += Point(X[2 * tri[a]], X[2 * tri[a] + 1]) * g.col(a).transpose();
  return F;
}

}  // namespace

EnergyReport energy_report(const Discretization& d, const State& s)
{
  const PhysicsConfig& ph = d.physics();
  EnergyReport r;
  r.t = s.t;
  r.kinetic_fluid = 0.5 * ph.rho_f * quad(d.fluid_mass(), s.u);
  r.viscous_dissipation = quad(d.viscous(), s.u);
  r.solid_kinetic = 0.5 * ph.delta_rho() * quad(d.solid_mass(), s.dX);
  r.elastic = 0.5 * quad(d.solid_stiffness(), s.X);
  return r;
}

Real elastic_energy(const TriMesh& solid, const Vector& X, Real kappa)
{
  Real e = 0;
  for (int t = 0; t < solid.num_triangles(); ++t) e += solid.area(t) * deformation_gradient(solid, t, X).squaredNorm();
  return 0.5 * kappa * e;
}

Real stability_monitor(const Discretization& d, Scheme scheme, Real dt, const History& before, const State& after)
{
  const PhysicsConfig& ph = d.physics();
  const SparseMat& M = d.fluid_mass();
  const SparseMat& K = d.viscous();
  const SparseMat& Ms = d.solid_mass();
  const SparseMat& Ks = d.solid_stiffness();
  const State& n0 = before.current();
  const Real drho = ph.delta_rho();
  auto elastic = [&](const Vector& X) { return 0.5 * quad(Ks, X); };
  switch (scheme) {
    case Scheme::be:
      return ph.rho_f / (2 * dt) * (quad(M, after.u) - quad(M, n0.u)) + quad(K, after.u) +
             (elastic(after.X) - elastic(n0.X)) / dt + drho / (2 * dt) * (quad(Ms, after.dX) - quad(Ms, n0.dX));
    case Scheme::bdf2: {
      const State& n1 = before.previous();
      return ph.rho_f / (4 * dt) * bdf2_bracket(M, after.u, n0.u, n1.u) + quad(K, after.u) +
             drho / (4 * dt) * bdf2_bracket(Ms, after.dX, n0.dX, n1.dX) +
             1 / (4 * dt) * bdf2_bracket(Ks, after.X, n0.X, n1.X);
    }
    case Scheme::cnm:
      return ph.rho_f / (2 * dt) * (quad(M, after.u) - quad(M, n0.u)) + 0.25 * quad(K, after.u + n0.u) +
             drho / (2 * dt) * (quad(Ms, after.dX) - quad(Ms, n0.dX)) + (elastic(after.X) - elastic(n0.X)) / dt;
    case Scheme::cnt:
      break;
  }
  return std::numeric_limits<Real>::quiet_NaN();
}

Real monitor_scale(const Discretization& d, const State& s) { return std::max<Real>(1, energy_report(d, s).total()); }

VolumeReport solid_volume(const TriMesh& solid, const Vector& X)
{
  if (X.size() != 2 * solid.num_vertices()) throw std::invalid_argument("map has wrong length");
  VolumeReport r;
  for (int t = 0; t < solid.num_triangles(); ++t) {
    const Real det = deformation_gradient(solid, t, X).determinant();
    if (det <= 0) r.inverted_elements.push_back(t);
    r.volume += solid.area(t) * det;
  }
  return r;
}

Real volume_pct_change(Real volume, Real initial) { return 100 * (volume - initial) / initial; }

Real l2_error(const Vector& field, const Vector& reference, const SparseMat& mass)
{
  if (field.size() != reference.size() || mass.rows() != field.size()) {
    throw std::invalid_argument("l2_error: dimension mismatch");
  }
  const Real ref = quad(mass, reference);
  if (!(ref > 0)) throw std::invalid_argument("l2_error: reference has zero norm");
  return std::sqrt(std::max<Real>(0, quad(mass, field - reference)) / ref);
}

DivergenceReport divergence_report(const Discretization& d, const Vector& u)
{
  return {(d.divergence() * u).norm(), std::sqrt(std::max<Real>(0, quad(d.fluid_mass(), u)))};
}

Real divergence_ratio(const Discretization& d, const Vector& u)
{
  const DivergenceReport r = divergence_report(d, u);
  return r.mass_norm > 0 ? r.divergence / r.mass_norm : r.divergence;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<Real>& dts, const std::vector<Real>& ev,
                                              const std::vector<Real>& es)
{
  if (dts.empty() || dts.size() != ev.size() || dts.size() != es.size()) {
    throw std::invalid_argument("convergence_table: inconsistent lengths");
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    ConvergenceRow r;
    r.dt = dts[i];
    r.error_velocity = ev[i];
    r.error_structure = es[i];
    if (i > 0) {
      const Real ratio = std::log2(dts[i - 1] / dts[i]);
      r.rate_velocity = std::log2(ev[i - 1] / ev[i]) / ratio;
      r.rate_structure = std::log2(es[i - 1] / es[i]) / ratio;
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string fmt(Real v, int digits = 17)
{
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::string fmt_opt(const std::optional<Real>& v, int digits = 17) { return v ? fmt(*v, digits) : ""; }

}  // namespace

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
  os << "dt,error_velocity,rate_velocity,error_structure,rate_structure\n";
  for (const auto& r : rows) {
    os << fmt(r.dt) << ',' << fmt(r.error_velocity) << ',' << fmt_opt(r.rate_velocity) << ','
       << fmt(r.error_structure) << ',' << fmt_opt(r.rate_structure) << '\n';
  }
}

void write_convergence_text(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
  os << std::left << std::setw(12) << "dt" << std::setw(14) << "velocity" << std::setw(8) << "rate"
     << std::setw(14) << "structure" << "rate\n";
  for (const auto& r : rows) {
    std::ostringstream ev, es;
    ev << std::scientific << std::setprecision(2) << r.error_velocity;
    es << std::scientific << std::setprecision(2) << r.error_structure;
    auto rate = [](const std::optional<Real>& v) {
      if (!v) return std::string("-");
      std::ostringstream s;
      s << std::fixed << std::setprecision(2) << *v;
      return s.str();
    };
    os << std::setw(12) << fmt(r.dt, 6) << std::setw(14) << ev.str() << std::setw(8) << rate(r.rate_velocity)
       << std::setw(14) << es.str() << rate(r.rate_structure) << '\n';
  }
}

void write_diagnostics_header(std::ostream& os)
{
  os << "t,kinetic_fluid,viscous_dissipation,solid_kinetic,elastic,monitor,volume_pct_change,picard_iters,residual\n";
}

void write_diagnostics_row(std::ostream& os, const EnergyReport& e, Real volume_pct, int picard_iters, Real residual)
{
  os << fmt(e.t) << ',' << fmt(e.kinetic_fluid) << ',' << fmt(e.viscous_dissipation) << ',' << fmt(e.solid_kinetic)
     << ',' << fmt(e.elastic) << ',' << fmt(e.monitor) << ',' << fmt(volume_pct) << ',' << picard_iters << ','
     << fmt(residual) << '\n';
}

}  // namespace fsi
