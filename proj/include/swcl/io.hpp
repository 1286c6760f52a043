#pragma once
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "swcl/catalog.hpp"
#include "swcl/chartuple.hpp"
#include "swcl/grid.hpp"
#include "swcl/topography.hpp"

// topography specs, grid/state files and report serialization
namespace swcl {

using json = nlohmann::json;

// missing or unreadable input; the CLI maps it to its own exit code
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parameter, "malformed " + what + ": " + e.what());
  }
}

// canonical output: sorted keys (std::map), doubles with 17 significant digits
inline void dump17(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump17(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump17(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    default: out += j.dump();
  }
}

inline std::string dump17(const json& j) {
  std::string s;
  dump17(j, s);
  return s;
}

inline json qp_to_json(const QuasiPoly& q) {
  json a = json::array();
  for (const auto& t : q.terms()) a.push_back({{"rate", t.rate}, {"freq", t.freq}, {"deg", t.deg}, {"c", t.c}, {"s", t.s}});
  return a;
}

inline QuasiPoly qp_from_json(const json& a) {
  if (a.is_number()) return QuasiPoly(a.get<double>());
  if (!a.is_array()) fail(ErrorKind::parameter, "quasi-polynomial must be a number or a list of terms");
  std::vector<QpTerm> ts;
  for (const auto& t : a) {
    QpTerm q;
    q.rate = t.value("rate", 0.0);
    q.freq = t.value("freq", 0.0);
    q.deg = t.value("deg", 0);
    q.c = t.value("c", 0.0);
    q.s = t.value("s", 0.0);
    if (q.deg < 0) fail(ErrorKind::parameter, "negative degree in quasi-polynomial term");
    ts.push_back(q);
  }
  return QuasiPoly(std::move(ts));
}

inline json tuple_to_json(const CharTuple& ct) {
  return {{"c1", ct.c1},
          {"F1", qp_to_json(ct.F1)},
          {"F2", qp_to_json(ct.F2)},
          {"F3", qp_to_json(ct.F3)},
          {"F4", qp_to_json(ct.F4)},
          {"text", ct.str()}};
}

inline CharTuple tuple_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::parameter, "tuple must be an object");
  CharTuple ct;
  ct.c1 = j.value("c1", 0.0);
  if (j.contains("F1")) ct.F1 = qp_from_json(j["F1"]);
  if (j.contains("F2")) ct.F2 = qp_from_json(j["F2"]);
  if (j.contains("F3")) ct.F3 = qp_from_json(j["F3"]);
  if (j.contains("F4")) ct.F4 = qp_from_json(j["F4"]);
  return ct;
}

inline std::vector<CharTuple> tuples_from_json(const json& j) {
  const json& a = j.is_object() && j.contains("tuples") ? j["tuples"] : j;
  if (!a.is_array()) fail(ErrorKind::parameter, "expected a list of tuples");
  std::vector<CharTuple> out;
  for (const auto& t : a) out.push_back(tuple_from_json(t));
  return out;
}

// lattice file: CSV with header "nx,ny,spacing" then rows x,y,b (x fastest), or
// binary: int32 nx, int32 ny, float64 spacing, then nx*ny float64 triples
inline GridData read_grid_file(const std::string& path) {
  std::string raw = read_file(path);
  GridData g;
  std::vector<double> xs, ys;
  double spacing = 0;
  auto finish = [&] {
    if (g.nx < 2 || g.ny < 2 || static_cast<int>(g.b.size()) != g.nx * g.ny)
      fail(ErrorKind::parameter, "grid file '" + path + "': sample count does not match nx*ny");
    g.x0 = xs[0], g.y0 = ys[0];
    g.dx = xs[1] - xs[0];
    g.dy = ys[g.nx] - ys[0];
    if (spacing > 0 && (std::abs(g.dx - spacing) > 1e-9 * spacing || std::abs(g.dy - spacing) > 1e-9 * spacing))
      fail(ErrorKind::parameter, "grid file '" + path + "': node spacing disagrees with the header");
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        size_t k = i + static_cast<size_t>(g.nx) * j;
        if (std::abs(xs[k] - (g.x0 + i * g.dx)) > 1e-9 * (1 + std::abs(xs[k])) ||
            std::abs(ys[k] - (g.y0 + j * g.dy)) > 1e-9 * (1 + std::abs(ys[k])))
          fail(ErrorKind::parameter, "grid file '" + path + "' is not a row-major rectangular lattice");
      }
  };
  bool binary = raw.size() >= 16 && std::filesystem::path(path).extension() == ".bin";
  if (binary) {
    int32_t nx, ny;
    std::memcpy(&nx, raw.data(), 4);
    std::memcpy(&ny, raw.data() + 4, 4);
    std::memcpy(&spacing, raw.data() + 8, 8);
    g.nx = nx, g.ny = ny;
    size_t need = 16 + 24 * static_cast<size_t>(std::max(0, nx)) * std::max(0, ny);
    if (nx < 2 || ny < 2 || raw.size() != need) fail(ErrorKind::parameter, "grid file '" + path + "' has wrong size");
    const char* p = raw.data() + 16;
    for (long k = 0; k < static_cast<long>(nx) * ny; ++k, p += 24) {
      double r[3];
      std::memcpy(r, p, 24);
      xs.push_back(r[0]), ys.push_back(r[1]), g.b.push_back(r[2]);
    }
  } else {
    std::istringstream in(raw);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::parameter, "grid file '" + path + "' is empty");
    for (char& c : line)
      if (c == ',') c = ' ';
    if (!(std::istringstream(line) >> g.nx >> g.ny >> spacing))
      fail(ErrorKind::parameter, "grid file '" + path + "': header must be nx, ny, spacing");
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      for (char& c : line)
        if (c == ',') c = ' ';
      double x, y, b;
      if (!(std::istringstream(line) >> x >> y >> b)) fail(ErrorKind::parameter, "grid file '" + path + "': bad row");
      xs.push_back(x), ys.push_back(y), g.b.push_back(b);
    }
  }
  finish();
  return g;
}

inline Locus locus_from_json(const json& j) {
  Locus l;
  std::string kind = j.value("kind", "point");
  if (kind == "point") l.kind = Locus::point;
  else if (kind == "line") l.kind = Locus::line;
  else if (kind == "ray") l.kind = Locus::ray;
  else fail(ErrorKind::parameter, "unknown exclusion kind '" + kind + "'");
  auto p = j.value("p", std::vector<double>{0, 0});
  auto d = j.value("dir", std::vector<double>{1, 0});
  if (p.size() != 2 || d.size() != 2) fail(ErrorKind::parameter, "exclusion p and dir need two entries");
  l.p = {p[0], p[1]};
  l.dir = {d[0], d[1]};
  return l;
}

inline std::shared_ptr<const Profile> profile_from_json(const json& j) {
  if (j.is_string()) return Profile::from_expr(j.get<std::string>());
  if (j.is_object() && j.contains("s") && j.contains("f"))
    return Profile::from_spline(j["s"].get<std::vector<double>>(), j["f"].get<std::vector<double>>());
  fail(ErrorKind::parameter, "profile must be an expression in s or {s: [...], f: [...]}");
}

struct TopoSpec {
  Topography topo;
  std::string name;
  std::optional<std::string> expect_case;
  std::optional<int> expect_dim;
};

// { kind: case|expression|grid, case_id?, params?, profile?, expression?, grid_file?,
//   exclusions?, exclusion?, name?, expect?: {case, dim} }
inline TopoSpec topo_from_json(const json& j, const std::filesystem::path& base = {}) {
  if (!j.is_object()) fail(ErrorKind::parameter, "topography spec must be a JSON object");
  try {
    TopoSpec out;
    std::string kind = j.value("kind", "");
    std::shared_ptr<const Profile> f = j.contains("profile") ? profile_from_json(j["profile"]) : nullptr;
    if (kind == "case") {
      CaseParams p;
      if (j.contains("params")) {
        const json& q = j["params"];
        p.beta = q.value("beta", p.beta);
        p.delta = q.value("delta", p.delta);
        p.eps = q.value("eps", p.eps);
      }
      out.topo = make_case(j.at("case_id").get<std::string>(), p, f);
    } else if (kind == "expression") {
      std::vector<Locus> ex;
      std::map<std::string, double> params;
      if (j.contains("exclusions"))
        for (const auto& e : j["exclusions"]) ex.push_back(locus_from_json(e));
      if (j.contains("params")) params = j["params"].get<std::map<std::string, double>>();
      out.topo = from_expression(j.at("expression").get<std::string>(), ex, params, f);
    } else if (kind == "grid") {
      std::filesystem::path p = j.at("grid_file").get<std::string>();
      if (p.is_relative() && !base.empty()) p = base / p;
      out.topo = from_grid(read_grid_file(p.string()));
    } else {
      fail(ErrorKind::parameter, "spec kind must be case, expression or grid (got '" + kind + "')");
    }
    if (j.contains("exclusion")) out.topo.set_exclusion(j["exclusion"].get<double>());
    out.name = j.value("name", out.topo.label());
    if (j.contains("expect")) {
      const json& e = j["expect"];
      if (e.contains("case")) out.expect_case = e["case"].get<std::string>();
      if (e.contains("dim")) out.expect_dim = e["dim"].get<int>();
    }
    return out;
  } catch (const json::exception& e) {
    fail(ErrorKind::parameter, std::string("bad topography spec: ") + e.what());
  }
}

inline TopoSpec load_topo_spec(const std::string& path) {
  std::filesystem::path p(path);
  return topo_from_json(parse_json(read_file(path), "topography spec '" + path + "'"), p.parent_path());
}

// state file: header "nx ny x0 x1 y0 y1 [t]" (periodic cell bounds), then nx*ny rows u,v,h (x fastest)
inline SimState read_state_file(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::parameter, "state file '" + path + "' is empty");
  for (char& c : line)
    if (c == ',') c = ' ';
  std::istringstream hs(line);
  int nx, ny;
  double x0, x1, y0, y1, t = 0;
  if (!(hs >> nx >> ny >> x0 >> x1 >> y0 >> y1)) fail(ErrorKind::parameter, "state header must be nx ny x0 x1 y0 y1 [t]");
  hs >> t;
  Grid g = Grid::periodic(nx, ny, x0, x1, y0, y1);
  SimState s{g, Field(nx, ny), Field(nx, ny), Field(nx, ny), t};
  long k = 0;
  while (std::getline(in, line) && k < static_cast<long>(nx) * ny) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    double u, v, h;
    if (!(std::istringstream(line) >> u >> v >> h)) fail(ErrorKind::parameter, "state file '" + path + "': bad row");
    int i = static_cast<int>(k % nx), jj = static_cast<int>(k / nx);
    s.u(i, jj) = u, s.v(i, jj) = v, s.h(i, jj) = h;
    ++k;
  }
  if (k != static_cast<long>(nx) * ny) fail(ErrorKind::parameter, "state file '" + path + "': expected nx*ny rows");
  return s;
}

}  // namespace swcl
