#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const std::string out = "/tmp/dgeo_cli_out.txt";
  const std::string err = "/tmp/dgeo_cli_err.txt";
  const std::string cmd = std::string(DGEO_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return std::string(DGEO_DATA) + "/" + name; }

}  // namespace

TEST_CASE("validate") {
  CHECK(run("validate " + data("tetrahedron.csv")).code == 0);
  const auto bad = run("validate " + data("triangle_violation.csv") + " --format json");
  CHECK(bad.code == 2);
  const auto doc = nlohmann::json::parse(bad.out);
  CHECK(doc["error"] == "TriangleViolation");
  CHECK(doc["indices"] == nlohmann::json::array({0, 2, 1}));
  CHECK(run("validate " + data("malformed.json")).code == 3);
  CHECK(run("validate /nonexistent/file.csv").code == 3);
}

TEST_CASE("check-embed") {
  CHECK(run("check-embed " + data("equilateral.json") + " --dim 2").code == 0);
  const auto no = run("check-embed " + data("equilateral.json") + " --dim 1 --format json");
  CHECK(no.code == 1);
  const auto doc = nlohmann::json::parse(no.out);
  CHECK(doc["result"]["witness_tuple"] == nlohmann::json::array({0, 1, 2}));
  CHECK(doc["seed"] == 0);
  for (const char* c : {"menger", "schoenberg", "blumenthal", "all"})
    CHECK(run("check-embed " + data("star_k13.csv") + " --dim 3 --criterion " + c).code == 1);
  const auto real = run("check-embed " + data("equilateral.json") +
                        " --dim 2 --realize --format json");
  CHECK(real.code == 0);
  CHECK(nlohmann::json::parse(real.out)["result"]["residual"].get<double>() <= 1e-9);
  CHECK(run("check-embed " + data("triangle_violation.csv") + " --dim 2").code == 2);
}

TEST_CASE("min-dim") {
  const auto t = run("min-dim " + data("tetrahedron.csv"));
  CHECK(t.code == 0);
  CHECK(t.out == "3\n");
  const auto s = run("min-dim " + data("star_k13.csv"));
  CHECK(s.code == 1);
  CHECK(s.out == "infeasible\n");
  CHECK(run("min-dim " + data("pair.csv")).out == "1\n");
  const auto r = run("min-dim " + data("tetrahedron.csv") + " --realize --format json");
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["realization"]["max_residual"].get<double>() <= 1e-9);
  CHECK(doc["realization"]["coordinates"].size() == 4);
}

TEST_CASE("scan") {
  const std::string fast = " --samples 300 --format json";
  const auto circle = run("scan " + data("circle.json") + " --dim 1" + fast);
  CHECK(circle.code == 0);
  CHECK(nlohmann::json::parse(circle.out)["result"]["aggregate"] == "consistent");

  const auto grid = run("scan " + data("plane_grid.json") + " --dim 1" + fast);
  CHECK(grid.code == 1);
  const auto g = nlohmann::json::parse(grid.out)["result"];
  CHECK(g["aggregate"] == "refuted");
  const auto w = g["reports"][g["witness_report"].get<std::size_t>()]["witness"];
  CHECK(w["points"].size() == 3);
  CHECK(w["value"].get<double>() >= 0.5);

  const auto point = run("scan " + data("one_point.json") + " --dim 2" + fast);
  CHECK(point.code == 0);
  for (const auto& rep : nlohmann::json::parse(point.out)["result"]["reports"])
    for (const auto& v : rep["per_scale_sup"]) CHECK(v.get<double>() == 0.0);

  CHECK(run("scan " + data("circle.json") + " --scales 0.5:2:3").code == 3);
  CHECK(run("scan " + data("malformed.json")).code == 3);
}

TEST_CASE("identical runs give byte-identical json") {
  const std::string args = "scan " + data("plane.json") + " --dim 2 --samples 200 --seed 9 --format json";
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["seed"] == 9);
  const auto out = run(args + " --out /tmp/dgeo_cli_report.json");
  CHECK(out.out.empty());
  CHECK(slurp("/tmp/dgeo_cli_report.json") == a.out);
}
