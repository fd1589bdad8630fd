#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cheq/cli/commands.hpp"
#include "cheq/cli/spec_file.hpp"

using namespace cheq;
using namespace cheq::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(CHEQ_DATA_DIR) + "/" + name; }

CommonOptions common(const std::string& spec, int threads = 1) {
  CommonOptions c;
  c.spec_path = data(spec);
  c.threads = threads;
  return c;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

template <class Opts, class Fn>
Run run(Fn fn, const CommonOptions& c, const Opts& opts) {
  std::ostringstream out, err;
  Run r;
  r.code = fn(c, opts, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the installed binary through the shell; stdout is captured, stderr
// discarded.
Run shell(const std::string& args) {
  Run r;
  const std::string cmd = std::string("\"") + CHEQ_BINARY + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double chordal_to(const json& rep, double a, double b, double c) {
  // Residual of the unit representative after removing its component
  // along the normalised real vector (a, b, c).
  const double len = std::sqrt(a * a + b * b + c * c);
  const double want[3] = {a / len, b / len, c / len};
  double x[3], y[3], norm2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    x[k] = rep[k][0].get<double>();
    y[k] = rep[k][1].get<double>();
    norm2 += x[k] * x[k] + y[k] * y[k];
  }
  double re = 0.0, im = 0.0;
  for (int k = 0; k < 3; ++k) {
    re += x[k] * want[k];
    im += y[k] * want[k];
  }
  double res2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double dx = x[k] - re * want[k], dy = y[k] - im * want[k];
    res2 += dx * dx + dy * dy;
  }
  return std::sqrt(res2 / norm2);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cheq_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("verify") {
  const Run ok = run(cmd_verify, common("cyclic.json"), VerifyOptions{});
  CHECK(ok.code == kExitOk);
  const json r = json::parse(ok.out);
  CHECK(r["version"] == version());
  CHECK(r["valid"] == true);
  REQUIRE(r["generators"].size() == 1);
  CHECK(r["generators"][0]["classification"]["kind"] == "Loxodromic");
  CHECK(r["generators"][0]["finite_order"].is_null());
  CHECK(r["max_order"] == 1000);
  CHECK_FALSE(r.contains("timings"));

  const Run el = run(cmd_verify, common("elliptic.json"), VerifyOptions{});
  CHECK(el.code == kExitOk);
  CHECK(json::parse(el.out)["generators"][0]["finite_order"] == 4);

  const Run bad = run(cmd_verify, common("invalid.json"), VerifyOptions{});
  CHECK(bad.code == kExitValidation);
  CHECK(bad.err.find("not in U(1,n) up to scale") != std::string::npos);
  CHECK(bad.err.find("D") != std::string::npos);

  const Run malformed = run(cmd_verify, common("malformed.json"), VerifyOptions{});
  CHECK(malformed.code == kExitUsage);
  CHECK(malformed.err.find("line 4, column 25") != std::string::npos);
  CHECK(run(cmd_verify, common("missing.json"), VerifyOptions{}).code == kExitUsage);

  CommonOptions timed = common("cyclic.json");
  timed.timings = true;
  CHECK(json::parse(run(cmd_verify, timed, VerifyOptions{}).out).contains("timings"));
}

TEST_CASE("classify") {
  const json a = json::parse(run(cmd_classify, common("cyclic.json"), ClassifyOptions{"A"}).out);
  CHECK(a["classification"]["kind"] == "Loxodromic");
  const json& fixed = a["classification"]["boundary_fixed_points"];
  REQUIRE(fixed.size() == 2);
  CHECK(chordal_to(fixed[0], 1, 1, 0) <= 1e-12);
  CHECK(chordal_to(fixed[1], 1, -1, 0) <= 1e-12);

  const json id = json::parse(run(cmd_classify, common("cyclic.json"), ClassifyOptions{"A A^-1"}).out);
  CHECK(id["classification"]["kind"] == "Identity");

  const json p = json::parse(run(cmd_classify, common("parabolic.json"), ClassifyOptions{"P"}).out);
  CHECK(p["classification"]["kind"] == "Parabolic");
  REQUIRE(p["classification"]["boundary_fixed_points"].size() == 1);
  CHECK(chordal_to(p["classification"]["boundary_fixed_points"][0], 1, 1, 0) <= 1e-7);

  CHECK(run(cmd_classify, common("cyclic.json"), ClassifyOptions{"Q"}).code == kExitUsage);
  CHECK(run(cmd_classify, common("cyclic.json"), ClassifyOptions{"A^x"}).code == kExitUsage);
}

TEST_CASE("limitset") {
  TempDir tmp;
  LimitsetOptions o;
  o.cloud.depth = 20;
  o.out = (tmp.path / "cyclic.csv").string();
  const Run r = run(cmd_limitset, common("cyclic.json"), o);
  REQUIRE(r.code == kExitOk);
  const json report = json::parse(r.out);
  CHECK(report["cloud"]["size"] == 2);
  CHECK(report["cloud"]["method"] == "orbit");
  const std::string csv = read_file(*o.out);
  const auto pts = points_from_csv(csv);
  REQUIRE(pts.size() == 2);
  const double h = 0.7071068;
  CHECK(std::abs(pts[0].rep()[0].real() - h) <= 1e-4);
  CHECK(std::abs(pts[0].rep()[1].real() + h) <= 1e-4);
  CHECK(std::abs(pts[1].rep()[0].real() - h) <= 1e-4);
  CHECK(std::abs(pts[1].rep()[1].real() - h) <= 1e-4);
  // Re-reading and re-writing is byte-identical.
  LimitSetCloud back;
  back.points = pts;
  CHECK(cloud_to_csv(back) == csv);

  LimitsetOptions e;
  const Run el = run(cmd_limitset, common("elliptic.json"), e);
  CHECK(el.code == kExitOk);
  const json er = json::parse(el.out);
  CHECK(er["cloud"]["size"] == 0);
  CHECK(er["cloud"]["diagnostics"].size() >= 1);

  LimitsetOptions m;
  m.cloud.method = "merged";
  m.out = (tmp.path / "two.csv").string();
  CHECK(run(cmd_limitset, common("two_generator.json", 4), m).code == kExitOk);
  CHECK(points_from_csv(read_file(*m.out)).size() >= 10);
  const std::string first = read_file(*m.out);
  m.out = (tmp.path / "two_again.csv").string();
  CHECK(run(cmd_limitset, common("two_generator.json", 1), m).code == kExitOk);
  CHECK(read_file(*m.out) == first);

  LimitsetOptions based;
  based.cloud.base = "1,0.5,0";
  CHECK(run(cmd_limitset, common("cyclic.json"), based).code == kExitOk);
  based.cloud.base = "1,1,0";
  CHECK(run(cmd_limitset, common("cyclic.json"), based).code != kExitOk);
  CHECK(run(cmd_limitset, common("missing.json"), LimitsetOptions{}).code == kExitUsage);
}

TEST_CASE("qplimit") {
  QplimitOptions a;
  a.word = "A";
  a.powers = 40;
  const Run ra = run(cmd_qplimit, common("cyclic.json"), a);
  REQUIRE(ra.code == kExitOk);
  const json r = json::parse(ra.out);
  const json& f = r["forward"];
  CHECK(f["converged"] == true);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(f["limit"][i][j][0].get<double>() - 1.0) <= 1e-9);
      CHECK(std::abs(f["limit"][i][j][1].get<double>()) <= 1e-9);
    }
  }
  CHECK(std::abs(f["limit"][2][2][0].get<double>()) <= 1e-9);
  CHECK(chordal_to(f["image_point"], 1, 1, 0) <= 1e-9);
  CHECK(chordal_to(f["kernel_tangency"], 1, -1, 0) <= 1e-9);
  CHECK(r["duality"]["forward_image_to_backward_kernel"].get<double>() <= 1e-9);
  CHECK(r["duality"]["backward_image_to_forward_kernel"].get<double>() <= 1e-9);

  QplimitOptions p;
  p.word = "P";
  const json rp = json::parse(run(cmd_qplimit, common("parabolic.json"), p).out);
  CHECK(chordal_to(rp["forward"]["image_point"], 1, 1, 0) <= 1e-8);
  CHECK(chordal_to(rp["forward"]["kernel_tangency"], 1, 1, 0) <= 1e-8);

  QplimitOptions id;
  id.word = "A A^-1";
  const Run ri = run(cmd_qplimit, common("cyclic.json"), id);
  CHECK(ri.code == kExitOk);
  CHECK(json::parse(ri.out).contains("note"));

  QplimitOptions e;
  e.word = "E";
  e.schedule = "linear";
  const Run re = run(cmd_qplimit, common("elliptic.json"), e);
  CHECK(re.code == kExitDivergence);
  CHECK(re.err.find("trace") != std::string::npos);

  QplimitOptions unknown;
  unknown.word = "Z";
  CHECK(run(cmd_qplimit, common("cyclic.json"), unknown).code == kExitUsage);
}

TEST_CASE("eqregion") {
  TempDir tmp;
  EqregionOptions o;
  o.chart = "1,0,0;0,1,0;0,0,1";
  o.out = (tmp.path / "c.pgm").string();
  REQUIRE(run(cmd_eqregion, common("cyclic.json", 4), o).code == kExitOk);
  const std::string pgm = read_file(*o.out);
  const std::string header = "P5\n401 401\n255\n";
  REQUIRE(pgm.size() == header.size() + 401u * 401u);
  CHECK(pgm.compare(0, header.size(), header) == 0);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 200 * 401 + 300]) == 0);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 200 * 401 + 100]) == 0);

  EqregionOptions one = o;
  one.res = "1x1";
  one.out = (tmp.path / "one.pgm").string();
  REQUIRE(run(cmd_eqregion, common("cyclic.json"), one).code == kExitOk);
  const std::string single = read_file(*one.out);
  CHECK(single == std::string("P5\n1 1\n255\n") + static_cast<char>(255));

  for (int threads : {1, 2, 8}) {
    EqregionOptions again = o;
    again.out = (tmp.path / ("t" + std::to_string(threads) + ".pgm")).string();
    REQUIRE(run(cmd_eqregion, common("cyclic.json", threads), again).code == kExitOk);
    CHECK(read_file(*again.out) == pgm);
  }

  const Run empty = run(cmd_eqregion, common("elliptic.json"), o);
  CHECK(empty.code == kExitEmptyCloud);
  CHECK(empty.err.find("Eq(G) = whole space (finite group?)") != std::string::npos);

  EqregionOptions bad = o;
  bad.chart = "1,0,0;0,1,0;0,2,0";
  CHECK(run(cmd_eqregion, common("cyclic.json"), bad).code != kExitOk);
  bad.chart = "1,0;0,1,0;0,0,1";
  CHECK(run(cmd_eqregion, common("cyclic.json"), bad).code == kExitUsage);
  bad = o;
  bad.res = "10by10";
  CHECK(run(cmd_eqregion, common("cyclic.json"), bad).code == kExitUsage);
  bad = o;
  bad.window = "1,2,3";
  CHECK(run(cmd_eqregion, common("cyclic.json"), bad).code == kExitUsage);
}

TEST_CASE("binary exit codes") {
  const std::string d = std::string(CHEQ_DATA_DIR) + "/";
  CHECK(shell("verify \"" + d + "cyclic.json\"").code == 0);
  CHECK(shell("verify \"" + d + "invalid.json\"").code == 1);
  CHECK(shell("verify \"" + d + "malformed.json\"").code == 2);
  CHECK(shell("frobnicate").code == 2);
  CHECK(shell("classify \"" + d + "cyclic.json\"").code == 2);
  CHECK(shell("limitset \"" + d + "cyclic.json\" --method nonsense").code == 2);
  CHECK(shell("qplimit \"" + d + "elliptic.json\" --word E --schedule linear").code == 3);
  CHECK(shell("eqregion \"" + d + "elliptic.json\" --res 3x3").code == 4);
  const Run v = shell("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find(version()) != std::string::npos);
  const Run c = shell("classify \"" + d + "cyclic.json\" --word \"A A^-1\"");
  CHECK(c.code == 0);
  CHECK(json::parse(c.out)["command_line"].get<std::string>().find("\"A A^-1\"") != std::string::npos);
}
