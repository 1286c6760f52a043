#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sys/wait.h>

#include "swcl/io.hpp"

namespace fs = std::filesystem;
using swcl::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(SWCL_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string fixture(const std::string& name) { return std::string(SWCL_FIXTURE_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("swcl_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, ClassifyFlatBottom) {
  auto r = run("classify --topo " + fixture("case14a"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["case"], "14a");
  EXPECT_EQ(j["dimension"], 9);
  EXPECT_EQ(j["k"], 4);
  EXPECT_EQ(j["basis"].size(), 9u);
  for (const char* key : {"residuals", "singular_values", "verified"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Cli, ClassifyGenericBottom) {
  auto r = run("classify --topo " + fixture("generic"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["case"], "generic");
  EXPECT_EQ(j["dimension"], 2);
}

TEST(Cli, UsageAndMissingInput) {
  auto bad = scratch("bad.json");
  write(bad, "{\"kind\": \"case\", \"case_id\": ");
  EXPECT_EQ(run("classify --topo " + bad.string()).code, 64);
  write(bad, "{\"kind\": \"case\", \"case_id\": \"99\"}");
  EXPECT_EQ(run("classify --topo " + bad.string()).code, 64);
  EXPECT_EQ(run("classify --topo /nonexistent/spec.json").code, 66);
  EXPECT_EQ(run("classify").code, 64);
  EXPECT_EQ(run("").code, 64);
  EXPECT_EQ(run("frobnicate").code, 64);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, OutputIsByteIdenticalAndFullPrecision) {
  auto out1 = scratch("one.json"), out2 = scratch("two.json");
  ASSERT_EQ(run("classify --seed 5 --topo " + fixture("case08b") + " --out " + out1.string()).code, 0);
  ASSERT_EQ(run("classify --seed 5 --topo " + fixture("case08b") + " --out " + out2.string()).code, 0);
  std::string a = swcl::read_file(out1.string()), b = swcl::read_file(out2.string());
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  // every float is printed as %.17g of itself (17 significant digits, trailing zeros dropped)
  std::regex num(R"([-+]?\d+\.\d+(e[-+]\d+)?|[-+]?\d+e[-+]\d+)");
  int checked = 0;
  for (auto it = std::sregex_iterator(a.begin(), a.end(), num); it != std::sregex_iterator(); ++it) {
    std::string s = it->str();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::stod(s));
    EXPECT_EQ(s, buf);
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(Cli, EmitTemplate) {
  auto r = run("classify --emit-template --topo " + fixture("case07a_epsp"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["template"]["A"].size(), 2u);
  EXPECT_EQ(j["template"]["A"][0].size(), 8u);
  EXPECT_TRUE(j["template"]["compatibility"]["ok"].get<bool>());
  EXPECT_GE(j["template"]["gap"].get<double>(), 1e6);
}

TEST(Cli, CharsSchema) {
  auto r = run("chars --topo " + fixture("case05_cos"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["case"], "5");
  EXPECT_EQ(j["dimension"], 4);
  ASSERT_EQ(j["tuples"].size(), 4u);
  for (const char* k : {"classifying", "cosymmetry", "divergence"}) EXPECT_LT(j["residuals"][k].get<double>(), 1e-9);
  // tuples round-trip through the term-record schema
  auto ts = swcl::tuples_from_json(j);
  EXPECT_EQ(ts.size(), 4u);
}

TEST(Cli, ExpectationMismatchAndGridSpec) {
  // quadratic bottom sampled on a lattice (CSV), classified as Case 9 with beta = 1/2
  auto csv = scratch("g9.csv");
  {
    std::ofstream f(csv);
    f << "41,41,0.1\n";
    f.precision(17);
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i) {
        double x = -2 + 0.1 * i, y = -2 + 0.1 * j;
        f << x << "," << y << "," << 0.5 * x * x + 0.125 * y * y << "\n";
      }
  }
  auto spec = scratch("g9.json");
  write(spec, R"({"kind": "grid", "grid_file": "g9.csv", "expect": {"case": "9", "dim": 6}})");
  auto r = run("classify --topo " + spec.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["beta"].get<double>(), 0.5, 1e-8);
  write(spec, R"({"kind": "grid", "grid_file": "g9.csv", "expect": {"case": "11", "dim": 6}})");
  EXPECT_EQ(run("classify --topo " + spec.string()).code, 1);
  write(spec, R"({"kind": "grid", "grid_file": "missing.csv"})");
  EXPECT_EQ(run("classify --topo " + spec.string()).code, 66);
}

TEST(Cli, VerifyFlagsWrongTuple) {
  std::string good = R"('[{"F2": [{"rate": 1, "c": 1}]}]')";
  std::string bad = R"('[{"F2": [{"deg": 1, "c": 1}]}]')";
  EXPECT_EQ(run("verify --topo " + fixture("case05_cos") + " --tuples " + good).code, 0);
  auto r = run("verify --topo " + fixture("case05_cos") + " --tuples " + bad);
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(json::parse(r.out)["verified"].get<bool>());
}

TEST(Cli, ReportCatalog) {
  auto r = run("report --fixtures " + std::string(SWCL_FIXTURE_DIR));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  int rows = 0;
  for (size_t p = r.out.find("PASS"); p != std::string::npos; p = r.out.find("PASS", p + 1)) ++rows;
  EXPECT_EQ(rows, 34);
  EXPECT_EQ(run("report").code, 0);  // built-in catalog
}

TEST(Cli, ReportInjectedWrongExpectationAndEmptyDir) {
  auto dir = scratch("fx");
  fs::create_directories(dir);
  fs::copy_file(fixture("case05_cos"), dir / "a.json", fs::copy_options::overwrite_existing);
  write(dir / "b.json", R"({"kind": "case", "case_id": "6", "name": "wrong", "expect": {"case": "6", "dim": 5}})");
  auto r = run("report --fixtures " + dir.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("wrong"), std::string::npos);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  auto empty = scratch("empty");
  fs::create_directories(empty);
  EXPECT_EQ(run("report --fixtures " + empty.string()).code, 66);
  EXPECT_EQ(run("report --fixtures /nonexistent/dir").code, 66);
}

TEST(Cli, Transform) {
  auto r = run("transform --map T3 --check-case --topo " + fixture("case04_delta1"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["source_case"], "4");
  EXPECT_EQ(j["target_case"], "4");
  EXPECT_NEAR(j["target_delta"].get<double>(), 0, 1e-9);
  EXPECT_LE(j["ratio"].get<double>(), 5);
  r = run("transform --map T1 --check-case --topo " + fixture("case03c_sin"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["target_case"], "3a");
  // wrong source form is a precondition failure
  EXPECT_EQ(run("transform --map T1 --topo " + fixture("case03b_sin")).code, 64);
  EXPECT_EQ(run("transform --map T9 --topo " + fixture("case03b_sin")).code, 64);
}

TEST(Cli, OrbitCasimirAudit) {
  auto r = run("orbit --topo " + fixture("case14a") + R"( --seeds '[{"F1": 1}, {"c1": 1}]')");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["closed"].get<bool>());
  EXPECT_EQ(j["dimension"], 9);

  r = run("casimir --R q2 --nx 128");
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(json::parse(r.out)["residual"].get<double>(), 1e-6);
  // R linear in q integrates to circulation plus mass: exact to rounding even on a coarse grid
  EXPECT_EQ(run("casimir --R 's' --nx 32 --tol 1e-12").code, 0);

  auto spec = scratch("flat.json");
  write(spec, R"({"kind": "expression", "expression": "0"})");
  r = run("audit --topo " + spec.string() + R"( --nx 32 --T 0.2 --tuples '[{"F4": 1}]')");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,t,integral_0,boundary_flux_0,residual_0");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_GT(rows, 2);
  EXPECT_EQ(run("audit --topo " + spec.string() + " --nx 32 --T 1 --dt 0.3").code, 64);
}
