#include "fsi/schemes.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace fsi {

int SchemeConfig::steps() const
{
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  if (!(T > 0)) throw std::invalid_argument("final time must be positive");
  const Real ratio = T / dt;
  const Real n = std::round(ratio);
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max<Real>(1, ratio)) {
    std::ostringstream os;
    os.precision(17);
    os << "T/dt is not an integer (T=" << T << ", dt=" << dt << ")";
    throw std::invalid_argument(os.str());
  }
  return int(n);
}

std::string to_string(Scheme s)
{
  switch (s) {
    case Scheme::be: return "be";
    case Scheme::bdf2: return "bdf2";
    case Scheme::cnm: return "cnm";
    case Scheme::cnt: return "cnt";
  }
  return "?";
}

std::string to_string(NonlinearMode::Kind k) { return k == NonlinearMode::Kind::picard ? "picard" : "semi"; }

std::string to_string(Startup s) { return s == Startup::cn_step ? "cn_step" : "be_step"; }

Scheme scheme_from_string(const std::string& s)
{
  if (s == "be") return Scheme::be;
  if (s == "bdf2") return Scheme::bdf2;
  if (s == "cnm") return Scheme::cnm;
  if (s == "cnt") return Scheme::cnt;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

NonlinearMode::Kind mode_from_string(const std::string& s)
{
  if (s == "picard") return NonlinearMode::Kind::picard;
  if (s == "semi" || s == "semi_implicit") return NonlinearMode::Kind::semi_implicit;
  throw std::invalid_argument("unknown nonlinear mode '" + s + "'");
}

Startup startup_from_string(const std::string& s)
{
  if (s == "cn_step") return Startup::cn_step;
  if (s == "be_step") return Startup::be_step;
  throw std::invalid_argument("unknown startup '" + s + "'");
}

namespace {

/// Solves M_s y = b with the solid normal constraints held at zero.
Vector solve_solid_mass(const Discretization& d, const Vector& b)
{
  const SparseMat& M = d.solid_mass();
  TripletList t;
  t.reserve(M.nonZeros());
  for (Index r = 0; r < M.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(M, r); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  DofConstraints c(M.rows());
  for (Index i : d.solid_constraints().constrained_dofs()) c.prescribe(i, 0.0);
  const LinearSystem sys = apply_constraints(t, M.rows(), b, c);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Real>> ldlt(Eigen::SparseMatrix<Real>(sys.matrix));
  if (ldlt.info() != Eigen::Success) throw SingularSystem("solid mass matrix is singular");
  return ldlt.solve(sys.rhs);
}

}  // namespace

State init_state(const Discretization& d, const Vector& u0, const Vector& X0, bool zero_multiplier)
{
  const BlockLayout l = layout_of(d);
  if (u0.size() != l.nu || X0.size() != l.ns) throw std::invalid_argument("dimension mismatch in init_state");
  State s;
  s.t = 0;
  s.u = u0;
  d.velocity_constraints().impose(s.u);
  s.X = X0;
  s.p = Vector::Zero(l.np);
  s.dX = solve_solid_mass(d, d.lf(X0) * s.u);
  if (zero_multiplier) {
    s.lambda = Vector::Zero(l.ns);
  } else {
    s.lambda = solve_solid_mass(d, d.solid_stiffness() * X0);
  }
  return s;
}

namespace {

StepOutcome advance(Scheme scheme, const Discretization& d, const History& h, Real dt, const NonlinearMode& mode)
{
  if (mode.kind == NonlinearMode::Kind::picard) return picard_loop(d, scheme, dt, h, mode);
  return semi_implicit_step(d, scheme, dt, h);
}

}  // namespace

StepOutcome step_be(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode)
{
  return advance(Scheme::be, d, h, dt, mode);
}

StepOutcome step_bdf2(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode)
{
  if (!h.has_previous()) throw std::invalid_argument("BDF2 step needs two history levels");
  return advance(Scheme::bdf2, d, h, dt, mode);
}

StepOutcome step_cnm(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode)
{
  return advance(Scheme::cnm, d, h, dt, mode);
}

StepOutcome step_cnt(const Discretization& d, const History& h, Real dt, const NonlinearMode& mode)
{
  return advance(Scheme::cnt, d, h, dt, mode);
}

StepOutcome step(Scheme scheme, const Discretization& d, const History& h, Real dt, const NonlinearMode& mode)
{
  switch (scheme) {
    case Scheme::be: return step_be(d, h, dt, mode);
    case Scheme::bdf2: return step_bdf2(d, h, dt, mode);
    case Scheme::cnm: return step_cnm(d, h, dt, mode);
    case Scheme::cnt: return step_cnt(d, h, dt, mode);
  }
  throw std::invalid_argument("unknown scheme");
}

Trajectory run(const Discretization& d, const State& initial, const SchemeConfig& config,
               const std::vector<Real>& snapshot_times, const StepObserver& observer)
{
  config.mode.validate();
  const int n_steps = config.steps();
  for (Real ts : snapshot_times) {
    if (ts < -1e-12 || ts > config.T * (1 + 1e-12)) throw std::invalid_argument("snapshot time outside [0, T]");
  }
  auto wanted = [&](int k) {
    for (Real ts : snapshot_times) {
      if (std::lround(ts / config.dt) == k) return true;
    }
    return false;
  };

  Trajectory out;
  History h(initial);
  if (wanted(0)) out.snapshots.push_back(initial);
  for (int k = 1; k <= n_steps; ++k) {
    Scheme used = config.scheme;
    if (config.scheme == Scheme::bdf2 && !h.has_previous()) {
      used = config.startup == Startup::cn_step ? Scheme::cnm : Scheme::be;
    }
    StepOutcome o = step(used, d, h, config.dt, config.mode);
    o.state.t = k * config.dt;
    if (!o.state.all_finite()) {
      std::ostringstream os;
      os << "non-finite state at step " << k;
      throw std::runtime_error(os.str());
    }
    StepRecord rec;
    rec.step = k;
    rec.t = o.state.t;
    rec.scheme = used;
    rec.picard_iterations = o.iterations;
    rec.residual = o.residual;
    rec.linear_residual = o.linear_residual;
    if (observer) observer(h, o.state, rec);
    out.records.push_back(rec);
    if (wanted(k)) out.snapshots.push_back(o.state);
    h.push(std::move(o.state));
  }
  out.final_state = h.current();
  return out;
}

}  // namespace fsi
