#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "swcl/equivmaps.hpp"
#include "swcl/hamiltonian.hpp"
#include "swcl/io.hpp"

using namespace swcl;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, mismatch = 1, unstable = 2, unverified = 3, usage = 64, no_input = 66 };

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::detection_instability:
    case ErrorKind::classification_gap:
    case ErrorKind::impossibility:
    case ErrorKind::compatibility: return unstable;
    case ErrorKind::verification:
    case ErrorKind::numeric:
    case ErrorKind::inconsistency:
    case ErrorKind::internal: return unverified;
    default: return usage;
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) fail(ErrorKind::configuration, "cannot write '" + out + "'");
  f << text;
}

struct Residuals {
  double classifying = 0, cosymmetry = 0, divergence = 0;
  bool pass(double tol, double scale) const {
    return classifying < tol * scale && cosymmetry < 10 * tol * scale && divergence < tol * scale;
  }
  json to_json() const {
    return {{"classifying", classifying}, {"cosymmetry", cosymmetry}, {"divergence", divergence}};
  }
};

Residuals residuals_of(const std::vector<CharTuple>& basis, const Topography& topo, int n, uint64_t seed) {
  auto jets = random_jets<JetPoint>(topo, n, seed);
  auto ext = random_jets<ExtJet>(topo, n, seed + 1);
  Residuals r;
  for (const auto& ct : basis) {
    r.classifying = std::max(r.classifying, residual_classifying(ct, topo, jets));
    r.cosymmetry = std::max(r.cosymmetry, residual_cosymmetry(ct, topo, jets));
    r.divergence = std::max(r.divergence, residual_divergence(ct, topo, ext));
  }
  return r;
}

struct Common {
  std::string topo_path, out;
  uint64_t seed = 1;
  double tol = 0;  // 0: the command's own default
  int njets = 1000;
  double tol_or(double d) const { return tol > 0 ? tol : d; }
};

void add_common(CLI::App* c, Common& o, bool need_topo = true) {
  auto* t = c->add_option("--topo", o.topo_path, "topography spec (JSON)");
  if (need_topo) t->required();
  c->add_option("--seed", o.seed, "random seed for sampling")->capture_default_str();
  c->add_option("--tol", o.tol, "tolerance (default depends on the command)")->check(CLI::PositiveNumber);
  c->add_option("--out", o.out, "output path (default stdout)");
}

DetectOptions detect_opts(const Common& o) {
  DetectOptions d;
  d.seed = o.seed;
  return d;
}

int expectation_code(const TopoSpec& spec, const std::string& got_case, int got_dim) {
  if (spec.expect_case && *spec.expect_case != got_case) return mismatch;
  if (spec.expect_dim && *spec.expect_dim != got_dim) return mismatch;
  return ok;
}

int cmd_classify(const Common& o, bool emit_template, bool chars_only) {
  TopoSpec spec = load_topo_spec(o.topo_path);
  Analysis an = analyze(spec.topo, detect_opts(o));
  Residuals r = residuals_of(an.basis, spec.topo, o.njets, o.seed);
  json rep;
  rep["case"] = an.label.id;
  rep["dimension"] = an.basis.size();
  rep["residuals"] = r.to_json();
  json tuples = json::array();
  for (const auto& ct : an.basis) tuples.push_back(tuple_to_json(ct));
  if (chars_only) {
    rep["tuples"] = tuples;
  } else {
    rep["k"] = an.system.k;
    rep["basis"] = tuples;
    rep["singular_values"] = std::vector<double>(an.system.sigma.data(), an.system.sigma.data() + an.system.sigma.size());
    if (std::isfinite(an.label.beta)) rep["beta"] = an.label.beta;
    if (std::isfinite(an.label.delta)) rep["delta"] = an.label.delta;
    if (an.label.eps != 0) rep["eps"] = an.label.eps;
    if (emit_template) {
      json A = json::array();
      for (int i = 0; i < an.system.A.rows(); ++i) {
        std::vector<double> row(8);
        for (int c = 0; c < 8; ++c) row[c] = an.system.A(i, c);
        A.push_back(row);
      }
      rep["template"] = {{"A", A},
                         {"gap", an.system.gap},
                         {"threshold", an.system.threshold},
                         {"max_angle", an.system.max_angle},
                         {"compatibility", {{"worst", an.compat.worst}, {"ok", an.compat.ok}}}};
    }
  }
  bool pass = r.pass(o.tol_or(1e-9), spec.topo.tolerance_scale());
  rep["verified"] = pass;
  emit(dump17(rep) + "\n", o.out);
  if (!pass) return unverified;
  return expectation_code(spec, an.label.id, static_cast<int>(an.basis.size()));
}

std::vector<CharTuple> load_tuples(const std::string& arg) {
  std::string text = fs::exists(arg) ? read_file(arg) : arg;
  return tuples_from_json(parse_json(text, "tuple list"));
}

int cmd_verify(const Common& o, const std::string& tuples_arg) {
  TopoSpec spec = load_topo_spec(o.topo_path);
  std::vector<CharTuple> basis = tuples_arg.empty() ? analyze(spec.topo, detect_opts(o)).basis : load_tuples(tuples_arg);
  double scale = spec.topo.tolerance_scale();
  json rows = json::array();
  bool all = true;
  for (const auto& ct : basis) {
    Residuals r = residuals_of({ct}, spec.topo, o.njets, o.seed);
    bool pass = r.pass(o.tol_or(1e-9), scale);
    all = all && pass;
    json row = r.to_json();
    row["tuple"] = ct.str();
    row["pass"] = pass;
    rows.push_back(row);
  }
  emit(dump17({{"tuples", rows}, {"verified", all}, {"tolerance", o.tol_or(1e-9) * scale}}) + "\n", o.out);
  return all ? ok : unverified;
}

struct GridOpts {
  int nx = 128, ny = 0;
  double T = 0.5, dt = 0;
  std::string boundary = "periodic";
  std::vector<double> box;
  std::string init = "gauss";
};

Grid make_grid(const GridOpts& g) {
  int ny = g.ny > 0 ? g.ny : g.nx;
  bool periodic = g.boundary == "periodic";
  std::vector<double> b = g.box.empty() ? (periodic ? std::vector<double>{-5, 5, -5, 5} : std::vector<double>{-1, 1, -1, 1})
                                        : g.box;
  if (b.size() != 4) fail(ErrorKind::parameter, "--box needs x0 x1 y0 y1");
  return periodic ? Grid::periodic(g.nx, ny, b[0], b[1], b[2], b[3]) : Grid::audited(g.nx, ny, b[0], b[1], b[2], b[3]);
}

SimState initial_state(const GridOpts& g) {
  if (g.init == "gauss") return gaussian_state(make_grid(g));
  return read_state_file(g.init);
}

int cmd_audit(const Common& o, const GridOpts& go, const std::string& tuples_arg) {
  TopoSpec spec = load_topo_spec(o.topo_path);
  SimState s0 = initial_state(go);
  std::vector<CharTuple> basis = tuples_arg.empty() ? analyze(spec.topo, detect_opts(o)).basis : load_tuples(tuples_arg);
  const Grid& g = s0.grid;
  double dt = go.dt > 0 ? go.dt : go.T / std::ceil(go.T / (0.25 * std::min(g.dx, g.dy)));
  AuditResult res = run_audit(s0, spec.topo, basis, go.T, dt);
  std::ostringstream csv;
  csv << "step,t";
  for (size_t k = 0; k < basis.size(); ++k) csv << ",integral_" << k << ",boundary_flux_" << k << ",residual_" << k;
  csv << "\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const size_t m = res.records.empty() ? 0 : res.records[0].t.size();
  for (size_t i = 0; i < m; ++i) {
    csv << i << "," << num(res.records[0].t[i]);
    for (const auto& r : res.records) csv << "," << num(r.integral[i]) << "," << num(r.boundary_flux[i]) << "," << num(r.residual[i]);
    csv << "\n";
  }
  emit(csv.str(), o.out);
  for (size_t k = 0; k < basis.size(); ++k)
    std::cerr << "# " << basis[k].str() << ": max residual " << num(res.records[k].max_residual()) << ", drift "
              << num(res.records[k].relative_drift()) << "\n";
  if (res.stopped_by_guard) std::cerr << "# stopped by smoothness guard after " << res.steps << " steps\n";
  return ok;
}

std::shared_ptr<const Profile> casimir_density(const std::string& R) {
  if (R == "q0" || R == "1") return Profile::from_expr("1");
  if (R == "q2") return Profile::from_expr("s^2/2");
  if (R == "q3") return Profile::from_expr("s^3");
  return Profile::from_expr(R);
}

int cmd_casimir(const Common& o, const GridOpts& go, const std::string& R) {
  SimState s = initial_state(go);
  double r = casimir_residual(*casimir_density(R), s);
  double tol = o.tol_or(1e-6);
  emit(dump17({{"R", R}, {"residual", r}, {"nx", s.grid.nx}, {"ny", s.grid.ny}, {"pass", r < tol}}) + "\n", o.out);
  return r < tol ? ok : unverified;
}

int cmd_orbit(const Common& o, const std::string& seeds_arg) {
  TopoSpec spec = load_topo_spec(o.topo_path);
  auto seeds = load_tuples(seeds_arg);
  OrbitResult r = generating_orbit(spec.topo, seeds);
  json span = json::array();
  for (const auto& ct : r.span) span.push_back(tuple_to_json(ct));
  emit(dump17({{"dimension", r.dim},
               {"target_dimension", r.target_dim},
               {"closed", r.closed},
               {"iterations", r.iterations},
               {"span", span}}) +
           "\n",
       o.out);
  return ok;
}

// first candidate box on which every node is admissible for both bottoms
Grid push_grid(const PointMap& m, const Topography& src, int n) {
  Vec2 c = src.center();
  std::vector<std::array<double, 4>> boxes = {{-1, 1, -1, 1}, {0.6, 1.6, 0.4, 1.4}, {c.x + 0.6, c.x + 1.6, c.y + 0.4, c.y + 1.4}};
  for (const auto& b : boxes) {
    Grid g = Grid::audited(n, n, b[0], b[1], b[2], b[3]);
    bool fine = true;
    for (int j = 0; j < g.ny && fine; ++j)
      for (int i = 0; i < g.nx && fine; ++i) fine = src.admissible(g.x(i), g.y(j));
    if (fine) return g;
  }
  fail(ErrorKind::domain, "no admissible box for pushing a flow through " + m.name);
}

int cmd_transform(const Common& o, const std::string& map, bool check_case, int n) {
  TopoSpec spec = load_topo_spec(o.topo_path);
  PointMap m = admissible_map(parse_map(map));
  Topography tgt = m.target(spec.topo);
  Grid g = push_grid(m, spec.topo, n);
  PushResult pr = push_flow(m, spec.topo, gaussian_state(g, 0.15), 6, 0.25 * std::min(g.dx, g.dy));
  double bound = o.tol_or(5);
  json rep = {{"map", m.name}, {"residual", pr.residual}, {"baseline", pr.baseline}, {"ratio", pr.ratio()},
              {"pass", pr.ratio() <= bound}};
  if (check_case) {
    auto a = analyze(spec.topo, detect_opts(o)), b = analyze(tgt, detect_opts(o));
    rep["source_case"] = a.label.id;
    rep["target_case"] = b.label.id;
    if (std::isfinite(b.label.delta)) rep["target_delta"] = b.label.delta;
    rep["source_dimension"] = a.basis.size();
    rep["target_dimension"] = b.basis.size();
  }
  emit(dump17(rep) + "\n", o.out);
  return pr.ratio() <= bound ? ok : unverified;
}

struct Row {
  std::string name, expect_case, got_case;
  int expect_dim = 0, got_dim = -1;
  double residual = NAN;
  bool pass = false;
  std::string note;
};

Row report_row(const std::string& name, const Topography& topo, const std::string& ecase, int edim, const Common& o) {
  Row r{name, ecase, "-", edim};
  try {
    Analysis an = analyze(topo, detect_opts(o));
    r.got_case = an.label.id;
    r.got_dim = static_cast<int>(an.basis.size());
    Residuals res = residuals_of(an.basis, topo, o.njets, o.seed);
    r.residual = std::max({res.classifying, res.cosymmetry, res.divergence});
    r.pass = r.got_dim == edim && (ecase.empty() || ecase == r.got_case) && res.pass(o.tol_or(1e-9), topo.tolerance_scale());
  } catch (const Error& e) {
    r.note = e.what();
  }
  return r;
}

int cmd_report(const Common& o, const std::string& dir) {
  std::vector<Row> rows;
  if (dir.empty()) {
    for (const auto& fx : fixture_catalog()) rows.push_back(report_row(fx.name, fx.make(), fx.case_id, fx.dim, o));
  } else {
    if (!fs::is_directory(dir)) throw MissingInput("fixture directory '" + dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    if (files.empty()) throw MissingInput("no fixtures in '" + dir + "'");
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      TopoSpec spec = load_topo_spec(f.string());
      if (!spec.expect_dim) fail(ErrorKind::parameter, f.string() + ": fixture needs expect.dim");
      rows.push_back(report_row(spec.name, spec.topo, spec.expect_case.value_or(""), *spec.expect_dim, o));
    }
  }
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-30s %-8s %-8s %4s %4s %10s  %s\n", "fixture", "case", "got", "dim", "got", "max res",
                "status");
  out << buf;
  bool all = true;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-30s %-8s %-8s %4d %4d %10.2e  %s", r.name.c_str(), r.expect_case.c_str(),
                  r.got_case.c_str(), r.expect_dim, r.got_dim, r.residual, r.pass ? "PASS" : "FAIL");
    out << buf;
    if (!r.note.empty()) out << "  (" << r.note << ")";
    out << "\n";
    all = all && r.pass;
  }
  emit(out.str(), o.out);
  return all ? ok : mismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conservation-law toolkit for shallow water systems with variable bottom"};
  app.require_subcommand(1);
  Common o;
  GridOpts go;
  bool emit_template = false, check_case = false;
  std::string tuples, seeds, R = "q2", map, fixtures;
  int push_n = 48;

  auto* classify = app.add_subcommand("classify", "detect the template system, case and characteristic basis");
  add_common(classify, o);
  classify->add_flag("--emit-template", emit_template, "include A, singular values and compatibility");
  classify->add_option("--jets", o.njets, "jet points for the residual checks")->check(CLI::PositiveNumber);

  auto* chars = app.add_subcommand("chars", "characteristic basis with residuals");
  add_common(chars, o);
  chars->add_option("--jets", o.njets, "jet points for the residual checks")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "residuals of given or computed tuples");
  add_common(verify, o);
  verify->add_option("--tuples", tuples, "tuple list (JSON file or inline)");
  verify->add_option("--jets", o.njets, "jet points")->check(CLI::PositiveNumber);

  auto add_grid = [&](CLI::App* c) {
    c->add_option("--nx", go.nx, "grid nodes in x")->capture_default_str();
    c->add_option("--ny", go.ny, "grid nodes in y (default nx)");
    c->add_option("--init,--state", go.init, "gauss or a state file")->capture_default_str();
    c->add_option("--boundary", go.boundary, "periodic or open")->check(CLI::IsMember({"periodic", "open"}));
    c->add_option("--box", go.box, "x0 x1 y0 y1")->expected(4);
  };
  auto* audit = app.add_subcommand("audit", "integrate and record the balance of each conservation law");
  add_common(audit, o);
  add_grid(audit);
  audit->add_option("--T", go.T, "final time")->check(CLI::PositiveNumber);
  audit->add_option("--dt", go.dt, "time step (default about dx/4, dividing T)")->check(CLI::PositiveNumber);
  audit->add_option("--tuples", tuples, "tuple list (default: computed basis)");

  auto* casimir = app.add_subcommand("casimir", "residual of the Hamiltonian operator on the variational derivative of a Casimir");
  add_common(casimir, o, false);
  add_grid(casimir);
  casimir->add_option("--R", R, "density in q: q0, q2, q3 or an expression in s")->capture_default_str();

  auto* orbit = app.add_subcommand("orbit", "span generated by seeds under symmetries and the bracket");
  add_common(orbit, o);
  orbit->add_option("--seeds", seeds, "tuple list (JSON file or inline)")->required();

  auto* transform = app.add_subcommand("transform", "push a flow through an admissible map");
  add_common(transform, o);
  transform->add_option("--map", map, "T1, T2, T3 or T3xy")->required();
  transform->add_flag("--check-case", check_case, "classify source and image");
  transform->add_option("--nx", push_n, "grid nodes per direction for the pushed flow")->capture_default_str();

  auto* report = app.add_subcommand("report", "catalog table of expected vs computed dimensions");
  add_common(report, o, false);
  report->add_option("--fixtures", fixtures, "directory of fixture specs (default: built-in catalog)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : usage;
  }
  try {
    if (*classify) return cmd_classify(o, emit_template, false);
    if (*chars) return cmd_classify(o, false, true);
    if (*verify) return cmd_verify(o, tuples);
    if (*audit) return cmd_audit(o, go, tuples);
    if (*casimir) return cmd_casimir(o, go, R);
    if (*orbit) return cmd_orbit(o, seeds);
    if (*transform) return cmd_transform(o, map, check_case, push_n);
    if (*report) return cmd_report(o, fixtures);
  } catch (const MissingInput& e) {
    std::cerr << "swcl: " << e.what() << "\n";
    return no_input;
  } catch (const Error& e) {
    std::cerr << "swcl: " << e.what() << "\n";
    return exit_for(e.kind);
  } catch (const std::exception& e) {
    std::cerr << "swcl: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
