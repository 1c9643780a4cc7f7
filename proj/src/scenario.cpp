#include "fsi/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

namespace fsi {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

// ---------------------------------------------------------------------------
// Scenario definitions

std::vector<WallCondition> BoundarySpec::walls() const
{
  auto wall = [this](int marker, WallKind kind) {
    WallCondition w;
    w.marker = marker;
    w.kind = kind;
    if (kind == WallKind::lid) w.value = lid_velocity;
    return w;
  };
  return {wall(markers::bottom, bottom), wall(markers::right, right), wall(markers::top, top),
          wall(markers::left, left)};
}

bool Scenario::operator==(const Scenario& o) const
{
  return name == o.name && M == o.M && solid == o.solid && boundary == o.boundary && physics.rho_f == o.physics.rho_f &&
         physics.rho_s == o.physics.rho_s && physics.nu == o.physics.nu && physics.kappa == o.physics.kappa &&
         T == o.T;
}

void Scenario::validate() const
{
  if (M < 1) throw std::invalid_argument("fluid M must be positive");
  if (!(T > 0)) throw std::invalid_argument("final time must be positive");
  physics.validate();
  if (solid.kind == SolidKind::annulus) {
    if (!(0 < solid.r_in && solid.r_in < solid.r_out)) throw std::invalid_argument("annulus radii out of order");
    if (solid.n_r < 1 || solid.n_theta < 1) throw std::invalid_argument("annulus grid must be positive");
    if (!(solid.stretch > 0)) throw std::invalid_argument("annulus stretch must be positive");
  } else {
    if (!(solid.diameter > 0) || solid.rings < 1) throw std::invalid_argument("disk parameters must be positive");
    const Real r = solid.diameter / 2;
    if (solid.center.x() - r <= 0 || solid.center.x() + r >= 1 || solid.center.y() - r <= 0 ||
        solid.center.y() + r >= 1) {
      throw std::invalid_argument("disk is not strictly inside the unit square");
    }
  }
}

bool RunConfig::operator==(const RunConfig& o) const
{
  const auto& a = scheme;
  const auto& b = o.scheme;
  return scenario == o.scenario && a.scheme == b.scheme && a.dt == b.dt && a.T == b.T && a.mode.kind == b.mode.kind &&
         a.mode.tolerance == b.mode.tolerance && a.mode.max_iterations == b.mode.max_iterations &&
         a.startup == b.startup && a.zero_initial_multiplier == b.zero_initial_multiplier &&
         output_dir == o.output_dir && snapshot_times == o.snapshot_times && coupling_degree == o.coupling_degree &&
         reference_run == o.reference_run && convergence == o.convergence && volume == o.volume;
}

void RunConfig::validate() const
{
  scenario.validate();
  if (std::abs(scheme.T - scenario.T) > 1e-12 * scenario.T) throw std::invalid_argument("scheme T differs from scenario T");
  scheme.steps();
  scheme.mode.validate();
  for (Real t : snapshot_times) {
    if (t < 0 || t > scenario.T * (1 + 1e-12)) throw std::invalid_argument("snapshot time outside [0, T]");
  }
  triangle_rule(coupling_degree);
  if (output_dir.empty()) throw std::invalid_argument("output directory is empty");
  if (convergence.divisors.empty() || convergence.meshes.empty()) throw std::invalid_argument("empty convergence ladder");
  if (!(convergence.reference_dt > 0)) throw std::invalid_argument("reference dt must be positive");
}

Scenario builtin_scenario(const std::string& name)
{
  Scenario s;
  s.name = name;
  if (name == "annulus_convergence" || name == "annulus_show") {
    s.M = 8;
    s.solid.kind = SolidKind::annulus;
    s.solid.n_r = 8;
    s.solid.n_theta = 16;
    s.boundary.bottom = WallKind::slip;
    s.boundary.left = WallKind::slip;
    s.physics = {1, 1, name == "annulus_show" ? 0.1 : 1.0, 10};
    s.T = name == "annulus_show" ? 1.0 : 0.2;
    return s;
  }
  if (name == "floating_disk") {
    s.M = 32;
    s.solid.kind = SolidKind::disk;
    s.solid.symmetry = false;
    s.solid.rings = 18;
    s.boundary.top = WallKind::lid;
    s.physics = {1, 1, 0.01, 0.1};
    s.T = 4;
    return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

RunConfig builtin_config(const std::string& name)
{
  RunConfig c;
  c.scenario = builtin_scenario(name);
  c.scheme.scheme = Scheme::bdf2;
  c.scheme.T = c.scenario.T;
  c.scheme.mode = NonlinearMode::picard();
  c.output_dir = "out/" + name;
  if (name == "annulus_convergence") {
    c.scheme.dt = 0.05;
  } else if (name == "annulus_show") {
    c.scheme.dt = 0.05;
    c.snapshot_times = {0, 0.1, 0.5, 1};
  } else {
    c.scheme.dt = 0.01;
    c.snapshot_times = {0, 1, 2, 3, 4};
    c.volume.coarse_M = 16;
    c.volume.coarse_rings = 9;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Config text

namespace {

std::string wall_name(WallKind k)
{
  switch (k) {
    case WallKind::no_slip: return "no_slip";
    case WallKind::slip: return "slip";
    case WallKind::lid: return "lid";
  }
  return "?";
}

WallKind wall_from(const std::string& s)
{
  if (s == "no_slip") return WallKind::no_slip;
  if (s == "slip") return WallKind::slip;
  if (s == "lid") return WallKind::lid;
  throw std::invalid_argument("unknown wall kind '" + s + "'");
}

/// Shortest text that parses back to the same double.
std::string real(Real v)
{
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Real to_real(const std::string& s)
{
  std::size_t used = 0;
  const Real v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s)
{
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s)
{
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::vector<std::string> words(const std::string& s)
{
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f)
{
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + f(v[i]);
  return out;
}

const std::map<std::string, std::set<std::string>>& schema()
{
  static const std::map<std::string, std::set<std::string>> s{
      {"scenario", {"name"}},
      {"fluid", {"M"}},
      {"solid",
       {"kind", "r_in", "r_out", "n_r", "n_theta", "stretch", "symmetry", "center_x", "center_y", "diameter", "rings"}},
      {"boundary", {"bottom", "right", "top", "left", "lid_u", "lid_v"}},
      {"physics", {"rho_f", "rho_s", "nu", "kappa"}},
      {"time",
       {"scheme", "dt", "T", "mode", "tolerance", "max_iterations", "startup", "zero_initial_multiplier"}},
      {"output", {"dir", "snapshots"}},
      {"coupling", {"degree"}},
      {"convergence", {"schemes", "modes", "divisors", "meshes", "reference_dt", "reference_run"}},
      {"volume", {"schemes", "coarse_M", "coarse_rings"}},
  };
  return s;
}

}  // namespace

RunConfig parse_config(std::istream& is)
{
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [section, keys] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      if (!it->second.count(key)) throw std::invalid_argument("config: unknown key " + section + "." + key);
    }
  }
  const std::string name = tree.get<std::string>("scenario.name", "annulus_convergence");
  RunConfig c = builtin_config(name);
  auto opt = [&tree](const std::string& key) { return tree.get_optional<std::string>(key); };
  auto set = [&](const std::string& key, auto& target, auto convert) {
    if (auto v = opt(key)) {
      try {
        target = convert(*v);
      } catch (const std::exception& e) {
        throw std::invalid_argument("config: " + key + ": " + e.what());
      }
    }
  };

  Scenario& s = c.scenario;
  set("fluid.M", s.M, to_int);
  if (auto v = opt("solid.kind")) {
    if (*v == "annulus") {
      s.solid.kind = SolidKind::annulus;
    } else if (*v == "disk") {
      s.solid.kind = SolidKind::disk;
    } else {
      throw std::invalid_argument("config: unknown solid kind '" + *v + "'");
    }
  }
  set("solid.r_in", s.solid.r_in, to_real);
  set("solid.r_out", s.solid.r_out, to_real);
  set("solid.n_r", s.solid.n_r, to_int);
  set("solid.n_theta", s.solid.n_theta, to_int);
  set("solid.stretch", s.solid.stretch, to_real);
  set("solid.symmetry", s.solid.symmetry, to_bool);
  set("solid.center_x", s.solid.center.x(), to_real);
  set("solid.center_y", s.solid.center.y(), to_real);
  set("solid.diameter", s.solid.diameter, to_real);
  set("solid.rings", s.solid.rings, to_int);
  set("boundary.bottom", s.boundary.bottom, wall_from);
  set("boundary.right", s.boundary.right, wall_from);
  set("boundary.top", s.boundary.top, wall_from);
  set("boundary.left", s.boundary.left, wall_from);
  set("boundary.lid_u", s.boundary.lid_velocity.x(), to_real);
  set("boundary.lid_v", s.boundary.lid_velocity.y(), to_real);
  set("physics.rho_f", s.physics.rho_f, to_real);
  set("physics.rho_s", s.physics.rho_s, to_real);
  set("physics.nu", s.physics.nu, to_real);
  set("physics.kappa", s.physics.kappa, to_real);
  set("time.T", s.T, to_real);
  c.scheme.T = s.T;

  SchemeConfig& sc = c.scheme;
  set("time.scheme", sc.scheme, scheme_from_string);
  set("time.dt", sc.dt, to_real);
  set("time.mode", sc.mode.kind, mode_from_string);
  set("time.tolerance", sc.mode.tolerance, to_real);
  set("time.max_iterations", sc.mode.max_iterations, to_int);
  set("time.startup", sc.startup, startup_from_string);
  set("time.zero_initial_multiplier", sc.zero_initial_multiplier, to_bool);

  set("output.dir", c.output_dir, [](const std::string& v) { return v; });
  set("output.snapshots", c.snapshot_times, [](const std::string& v) {
    std::vector<Real> out;
    for (const auto& w : words(v)) out.push_back(to_real(w));
    return out;
  });
  set("coupling.degree", c.coupling_degree, to_int);

  auto scheme_list = [](const std::string& v) {
    std::vector<Scheme> out;
    for (const auto& w : words(v)) out.push_back(scheme_from_string(w));
    return out;
  };
  auto int_list = [](const std::string& v) {
    std::vector<int> out;
    for (const auto& w : words(v)) out.push_back(to_int(w));
    return out;
  };
  set("convergence.schemes", c.convergence.schemes, scheme_list);
  set("convergence.modes", c.convergence.modes, [](const std::string& v) {
    std::vector<NonlinearMode::Kind> out;
    for (const auto& w : words(v)) out.push_back(mode_from_string(w));
    return out;
  });
  set("convergence.divisors", c.convergence.divisors, int_list);
  set("convergence.meshes", c.convergence.meshes, int_list);
  set("convergence.reference_dt", c.convergence.reference_dt, to_real);
  set("convergence.reference_run", c.reference_run, to_bool);
  set("volume.schemes", c.volume.schemes, scheme_list);
  set("volume.coarse_M", c.volume.coarse_M, to_int);
  set("volume.coarse_rings", c.volume.coarse_rings, to_int);

  if (const char* dir = std::getenv("OUTPUT_DIR"); dir && *dir) c.output_dir = dir;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return parse_config(in);
}

void emit_config(std::ostream& os, const RunConfig& c)
{
  const Scenario& s = c.scenario;
  auto sch = [](Scheme x) { return to_string(x); };
  auto num = [](auto x) { return std::to_string(x); };
  os << "[scenario]\nname = " << s.name << "\n\n";
  os << "[fluid]\nM = " << s.M << "\n\n";
  os << "[solid]\nkind = " << (s.solid.kind == SolidKind::annulus ? "annulus" : "disk") << '\n'
     << "r_in = " << real(s.solid.r_in) << "\nr_out = " << real(s.solid.r_out) << "\nn_r = " << s.solid.n_r
     << "\nn_theta = " << s.solid.n_theta << "\nstretch = " << real(s.solid.stretch)
     << "\nsymmetry = " << (s.solid.symmetry ? "true" : "false") << "\ncenter_x = " << real(s.solid.center.x())
     << "\ncenter_y = " << real(s.solid.center.y()) << "\ndiameter = " << real(s.solid.diameter)
     << "\nrings = " << s.solid.rings << "\n\n";
  os << "[boundary]\nbottom = " << wall_name(s.boundary.bottom) << "\nright = " << wall_name(s.boundary.right)
     << "\ntop = " << wall_name(s.boundary.top) << "\nleft = " << wall_name(s.boundary.left)
     << "\nlid_u = " << real(s.boundary.lid_velocity.x()) << "\nlid_v = " << real(s.boundary.lid_velocity.y())
     << "\n\n";
  os << "[physics]\nrho_f = " << real(s.physics.rho_f) << "\nrho_s = " << real(s.physics.rho_s)
     << "\nnu = " << real(s.physics.nu) << "\nkappa = " << real(s.physics.kappa) << "\n\n";
  os << "[time]\nscheme = " << to_string(c.scheme.scheme) << "\ndt = " << real(c.scheme.dt) << "\nT = " << real(s.T)
     << "\nmode = " << to_string(c.scheme.mode.kind) << "\ntolerance = " << real(c.scheme.mode.tolerance)
     << "\nmax_iterations = " << c.scheme.mode.max_iterations << "\nstartup = " << to_string(c.scheme.startup)
     << "\nzero_initial_multiplier = " << (c.scheme.zero_initial_multiplier ? "true" : "false") << "\n\n";
  os << "[output]\ndir = " << c.output_dir << "\nsnapshots = " << join(c.snapshot_times, real) << "\n\n";
  os << "[coupling]\ndegree = " << c.coupling_degree << "\n\n";
  os << "[convergence]\nschemes = " << join(c.convergence.schemes, sch)
     << "\nmodes = " << join(c.convergence.modes, [](NonlinearMode::Kind k) { return to_string(k); })
     << "\ndivisors = " << join(c.convergence.divisors, num) << "\nmeshes = " << join(c.convergence.meshes, num)
     << "\nreference_dt = " << real(c.convergence.reference_dt)
     << "\nreference_run = " << (c.reference_run ? "true" : "false") << "\n\n";
  os << "[volume]\nschemes = " << join(c.volume.schemes, sch) << "\ncoarse_M = " << c.volume.coarse_M
     << "\ncoarse_rings = " << c.volume.coarse_rings << '\n';
}

// ---------------------------------------------------------------------------
// Model

Model build_model(const Scenario& s, int coupling_degree)
{
  s.validate();
  auto fluid = std::make_shared<const RefinedPair>(build_unit_square_mesh(s.M));
  Discretization::Options opt;
  opt.walls = s.boundary.walls();
  opt.coupling_degree = coupling_degree;
  std::shared_ptr<const TriMesh> solid;
  if (s.solid.kind == SolidKind::annulus) {
    solid = std::make_shared<const TriMesh>(
        build_annulus_quarter_mesh(s.solid.r_in, s.solid.r_out, s.solid.n_r, s.solid.n_theta));
    if (s.solid.symmetry) opt.solid_symmetry_markers = {markers::sector_x_axis, markers::sector_y_axis};
  } else {
    solid = std::make_shared<const TriMesh>(build_disk_mesh(s.solid.center, s.solid.diameter, s.solid.rings));
  }
  const FunctionSpace sspace = FunctionSpace::solid(solid);
  Vector X0;
  if (s.solid.kind == SolidKind::annulus) {
    const Real k = s.solid.stretch;
    X0 = interpolate(sspace, [k](const Point& p) { return Point(p.x() / k, k * p.y()); });
  } else {
    X0 = interpolate(sspace, [](const Point& p) { return p; });
  }
  Model m;
  m.disc = std::make_unique<Discretization>(fluid, solid, s.physics, opt, X0);
  m.u0 = Vector::Zero(m.disc->velocity().dof_count());
  m.X0 = std::move(X0);
  return m;
}

DofTable dof_table(const Scenario& s)
{
  s.validate();
  const RefinedPair pair = build_unit_square_mesh(s.M);
  const int solid_vertices = s.solid.kind == SolidKind::annulus
                                 ? (s.solid.n_r + 1) * (s.solid.n_theta + 1)
                                 : build_disk_mesh(s.solid.center, s.solid.diameter, s.solid.rings).num_vertices();
  DofTable t;
  t.M = s.M;
  t.velocity = 2 * Index(pair.fine.num_vertices());
  t.pressure = pair.coarse.num_vertices() + pair.coarse.num_triangles();
  t.solid = 2 * Index(solid_vertices);
  t.multiplier = t.solid;
  return t;
}

// ---------------------------------------------------------------------------
// Drivers

const ConvergenceCell* ConvergenceStudy::find(Scheme s, NonlinearMode::Kind m, int M) const
{
  for (const auto& c : cells) {
    if (c.scheme == s && c.mode == m && c.M == M) return &c;
  }
  return nullptr;
}

namespace {

Scenario at_mesh(Scenario s, int M)
{
  if (s.M == M) return s;
  const int old = s.M;
  s.M = M;
  if (s.solid.kind == SolidKind::annulus) {
    s.solid.n_r = s.solid.n_r * M / old;
    s.solid.n_theta = s.solid.n_theta * M / old;
  }
  return s;
}

struct Reference {
  Vector u;
  Vector X;
};

std::string reference_file(const std::string& dir, const Scenario& s, Real dt)
{
  std::ostringstream os;
  os << "reference_" << s.name << "_M" << s.M << "_dt" << std::setprecision(6) << dt << "_T" << s.T << ".bin";
  return (fs::path(dir) / os.str()).string();
}

bool load_reference(const std::string& path, Index nu, Index ns, Reference& r)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::int64_t sizes[2] = {0, 0};
  in.read(reinterpret_cast<char*>(sizes), sizeof sizes);
  if (!in || sizes[0] != nu || sizes[1] != ns) return false;
  r.u.resize(nu);
  r.X.resize(ns);
  in.read(reinterpret_cast<char*>(r.u.data()), std::streamsize(nu * sizeof(Real)));
  in.read(reinterpret_cast<char*>(r.X.data()), std::streamsize(ns * sizeof(Real)));
  return bool(in);
}

void store_reference(const std::string& path, const Reference& r)
{
  std::ofstream out(path, std::ios::binary);
  const std::int64_t sizes[2] = {r.u.size(), r.X.size()};
  out.write(reinterpret_cast<const char*>(sizes), sizeof sizes);
  out.write(reinterpret_cast<const char*>(r.u.data()), std::streamsize(r.u.size() * sizeof(Real)));
  out.write(reinterpret_cast<const char*>(r.X.data()), std::streamsize(r.X.size() * sizeof(Real)));
}

Reference reference_solution(const RunConfig& c, const Scenario& s, const Model& m, const State& s0,
                             const std::string& cache_dir)
{
  Reference r;
  const std::string path = cache_dir.empty() ? "" : reference_file(cache_dir, s, c.convergence.reference_dt);
  if (!path.empty() && load_reference(path, s0.u.size(), s0.X.size(), r)) return r;
  SchemeConfig sc;
  sc.scheme = Scheme::bdf2;
  sc.dt = c.convergence.reference_dt;
  sc.T = s.T;
  sc.mode = NonlinearMode::picard(c.scheme.mode.tolerance, c.scheme.mode.max_iterations);
  sc.startup = c.scheme.startup;
  const Trajectory tr = run(*m.disc, s0, sc);
  r.u = tr.final_state.u;
  r.X = tr.final_state.X;
  if (!path.empty()) {
    fs::create_directories(cache_dir);
    store_reference(path, r);
  }
  return r;
}

}  // namespace

ConvergenceStudy run_convergence(const RunConfig& c, const std::string& cache_dir)
{
  c.validate();
  ConvergenceStudy study;
  for (int M : c.convergence.meshes) {
    const Scenario s = at_mesh(c.scenario, M);
    const Model m = build_model(s, c.coupling_degree);
    const State s0 = init_state(*m.disc, m.u0, m.X0, c.scheme.zero_initial_multiplier);
    const Reference ref = reference_solution(c, s, m, s0, cache_dir);
    for (Scheme scheme : c.convergence.schemes) {
      for (NonlinearMode::Kind kind : c.convergence.modes) {
        ConvergenceCell cell;
        cell.scheme = scheme;
        cell.mode = kind;
        cell.M = M;
        for (int div : c.convergence.divisors) {
          SchemeConfig sc = c.scheme;
          sc.scheme = scheme;
          sc.dt = s.T / div;
          sc.T = s.T;
          sc.mode.kind = kind;
          const State init = init_state(*m.disc, m.u0, m.X0, scheme == Scheme::cnt && c.scheme.zero_initial_multiplier);
          Real max_div = 0;
          const Trajectory tr = run(*m.disc, init, sc, {}, [&](const History&, const State& after, const StepRecord&) {
            max_div = std::max(max_div, divergence_ratio(*m.disc, after.u));
          });
          int max_it = 0;
          Real max_res = 0;
          for (const auto& rec : tr.records) {
            max_it = std::max(max_it, rec.picard_iterations);
            max_res = std::max(max_res, rec.residual);
          }
          cell.dts.push_back(sc.dt);
          cell.error_velocity.push_back(l2_error(tr.final_state.u, ref.u, m.disc->fluid_mass()));
          cell.error_structure.push_back(l2_error(tr.final_state.X, ref.X, m.disc->solid_mass()));
          cell.max_picard.push_back(max_it);
          cell.max_residual.push_back(max_res);
          cell.max_divergence_ratio.push_back(max_div);
        }
        cell.rows = convergence_table(cell.dts, cell.error_velocity, cell.error_structure);
        study.cells.push_back(std::move(cell));
      }
    }
  }
  return study;
}

std::vector<VolumeSeries> run_volume(const RunConfig& c)
{
  c.validate();
  std::vector<VolumeSeries> out;
  auto one = [&](const Scenario& s, Scheme scheme) {
    const Model m = build_model(s, c.coupling_degree);
    const State s0 = init_state(*m.disc, m.u0, m.X0, c.scheme.zero_initial_multiplier);
    const Real v0 = solid_volume(m.disc->solid_mesh(), s0.X).volume;
    VolumeSeries vs;
    vs.scheme = scheme;
    vs.M = s.M;
    vs.t.push_back(0);
    vs.pct_change.push_back(0);
    SchemeConfig sc = c.scheme;
    sc.scheme = scheme;
    run(*m.disc, s0, sc, {}, [&](const History&, const State& after, const StepRecord&) {
      const VolumeReport r = solid_volume(m.disc->solid_mesh(), after.X);
      vs.t.push_back(after.t);
      vs.pct_change.push_back(volume_pct_change(r.volume, v0));
      vs.inverted_elements = std::max<int>(vs.inverted_elements, int(r.inverted_elements.size()));
      vs.max_divergence_ratio = std::max(vs.max_divergence_ratio, divergence_ratio(*m.disc, after.u));
    });
    out.push_back(std::move(vs));
  };
  for (Scheme scheme : c.volume.schemes) one(c.scenario, scheme);
  if (c.volume.coarse_M > 0) {
    Scenario coarse = c.scenario;
    coarse.M = c.volume.coarse_M;
    if (c.volume.coarse_rings > 0) coarse.solid.rings = c.volume.coarse_rings;
    one(coarse, c.scheme.scheme);
  }
  return out;
}

namespace {

void write_snapshot(const fs::path& dir, const Discretization& d, const State& s, int step)
{
  const RefinedPair& pair = d.fluid();
  const int np1 = pair.coarse.num_vertices();
  Vector p1(pair.fine.num_vertices());
  for (int v = 0; v < pair.fine.num_vertices(); ++v) {
    const auto& o = pair.midpoint_of[v];
    p1[v] = 0.5 * (s.p[o.a] + s.p[o.b]);
  }
  Vector p0(pair.fine.num_triangles());
  for (int t = 0; t < pair.fine.num_triangles(); ++t) p0[t] = s.p[np1 + pair.parent[t]];
  {
    std::ofstream f(dir / ("fluid_" + std::to_string(step) + ".vtk"));
    write_vtk(f, pair.fine, {{"u", 2, &s.u}, {"p_continuous", 1, &p1}}, {{"p_discontinuous", 1, &p0}},
              "fluid t=" + real(s.t));
  }
  TriMesh current = d.solid_mesh();
  for (int v = 0; v < current.num_vertices(); ++v) current.vertices[v] = Point(s.X[2 * v], s.X[2 * v + 1]);
  std::ofstream f(dir / ("solid_" + std::to_string(step) + ".vtk"));
  write_vtk(f, current, {{"lambda", 2, &s.lambda}, {"dX", 2, &s.dX}}, {}, "solid t=" + real(s.t));
}

bool is_snapshot(const RunConfig& c, int step)
{
  for (Real t : c.snapshot_times) {
    if (std::lround(t / c.scheme.dt) == step) return true;
  }
  return false;
}

}  // namespace

int cmd_run(const RunConfig& c)
{
  c.validate();
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const Model m = build_model(c.scenario, c.coupling_degree);
  const Discretization& d = *m.disc;
  const State s0 =
      init_state(d, m.u0, m.X0, c.scheme.scheme == Scheme::cnt && c.scheme.zero_initial_multiplier);
  const Real v0 = solid_volume(d.solid_mesh(), s0.X).volume;

  std::ofstream csv(dir / "diagnostics.csv");
  std::ofstream log(dir / "solver.jsonl");
  write_diagnostics_header(csv);
  write_diagnostics_row(csv, energy_report(d, s0), 0, 0, 0);
  csv.flush();
  if (is_snapshot(c, 0)) write_snapshot(dir, d, s0, 0);

  run(d, s0, c.scheme, {}, [&](const History& before, const State& after, const StepRecord& rec) {
    EnergyReport e = energy_report(d, after);
    e.monitor = stability_monitor(d, rec.scheme, c.scheme.dt, before, after);
    write_diagnostics_row(csv, e, volume_pct_change(solid_volume(d.solid_mesh(), after.X).volume, v0),
                          rec.picard_iterations, rec.residual);
    csv.flush();
    nlohmann::ordered_json j;
    j["step"] = rec.step;
    j["time"] = rec.t;
    j["picard_iterations"] = rec.picard_iterations;
    j["residual"] = rec.residual;
    j["linear_residual"] = rec.linear_residual;
    log << j.dump() << '\n';
    log.flush();
    if (is_snapshot(c, rec.step)) write_snapshot(dir, d, after, rec.step);
  });
  return 0;
}

int cmd_convergence(const RunConfig& c)
{
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const ConvergenceStudy study = run_convergence(c, dir.string());
  const bool many = c.convergence.meshes.size() > 1;
  std::ofstream text(dir / "convergence.txt");
  for (int M : c.convergence.meshes) {
    const std::string suffix = many ? "_M" + std::to_string(M) : "";
    for (NonlinearMode::Kind kind : c.convergence.modes) {
      std::ofstream picard(dir / ("max_picard_" + to_string(kind) + suffix + ".csv"));
      std::ofstream resid(dir / ("max_residual_" + to_string(kind) + suffix + ".csv"));
      picard << "dt";
      resid << "dt";
      for (Scheme s : c.convergence.schemes) {
        picard << ',' << to_string(s);
        resid << ',' << to_string(s);
      }
      picard << '\n';
      resid << '\n';
      for (std::size_t i = 0; i < c.convergence.divisors.size(); ++i) {
        picard << real(c.scenario.T / c.convergence.divisors[i]);
        resid << real(c.scenario.T / c.convergence.divisors[i]);
        for (Scheme s : c.convergence.schemes) {
          const ConvergenceCell* cell = study.find(s, kind, M);
          picard << ',' << cell->max_picard[i];
          resid << ',' << real(cell->max_residual[i]);
        }
        picard << '\n';
        resid << '\n';
      }
      for (Scheme s : c.convergence.schemes) {
        const ConvergenceCell* cell = study.find(s, kind, M);
        std::ofstream csv(dir / ("convergence_" + to_string(s) + "_" + to_string(kind) + suffix + ".csv"));
        write_convergence_csv(csv, cell->rows);
        text << to_string(s) << ' ' << to_string(kind) << " M=" << M << '\n';
        write_convergence_text(text, cell->rows);
        text << '\n';
      }
    }
  }
  return 0;
}

int cmd_volume(const RunConfig& c)
{
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const auto series = run_volume(c);
  std::ofstream summary(dir / "volume_summary.csv");
  summary << "scheme,M,final_pct_change,inverted_elements\n";
  for (const auto& s : series) {
    const std::string tag = to_string(s.scheme) + (s.M == c.scenario.M ? "" : "_M" + std::to_string(s.M));
    std::ofstream f(dir / ("volume_" + tag + ".csv"));
    f << "t,volume_pct_change\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) f << real(s.t[i]) << ',' << real(s.pct_change[i]) << '\n';
    summary << to_string(s.scheme) << ',' << s.M << ',' << real(s.final_pct()) << ',' << s.inverted_elements << '\n';
  }
  return 0;
}

int cmd_dry_run(const RunConfig& c, std::ostream& os)
{
  c.validate();
  std::vector<int> meshes{c.scenario.M};
  for (int M : c.convergence.meshes) {
    if (std::find(meshes.begin(), meshes.end(), M) == meshes.end()) meshes.push_back(M);
  }
  os << std::left << std::setw(6) << "M" << std::setw(10) << "velocity" << std::setw(10) << "pressure"
     << std::setw(8) << "solid" << "multiplier\n";
  for (int M : meshes) {
    const DofTable t = dof_table(at_mesh(c.scenario, M));
    os << std::setw(6) << t.M << std::setw(10) << t.velocity << std::setw(10) << t.pressure << std::setw(8) << t.solid
       << t.multiplier << '\n';
  }
  const Model m = build_model(c.scenario, c.coupling_degree);
  m.disc->lf(m.X0);
  os << "steps " << c.scheme.steps() << ", h_f " << m.disc->fluid().fine.max_diameter() << ", h_s "
     << m.disc->solid_mesh().max_diameter() << '\n';
  return 0;
}

}  // namespace fsi
