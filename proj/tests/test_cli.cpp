#include <fstream>
#include <sstream>

#include "doctest.h"

#include "commands.hpp"
#include "run_config.hpp"

using namespace hyperksh;
using namespace hyperksh::cli;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hyperksh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("classify") {
  SUBCASE("default grid over one period") {
    const Run r = run({"classify", "--alpha", "1"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 10);
    const std::size_t c = column(rows[0], "class");
    const std::vector<std::string> expected = {"Schrodinger", "Kahler",     "Kahler",
                                               "Kahler",      "RealLine",   "AntiKahler",
                                               "AntiKahler",  "AntiKahler", "Schrodinger"};
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(rows[i + 1][c] == expected[i]);
    for (const char* name : {"t", "kahler_density", "w_a_re", "w_a_im", "w_b_re", "w_b_im"}) {
      CHECK_NOTHROW(column(rows[0], name));
    }
  }
  SUBCASE("single time") {
    const Run r = run({"classify", "--alpha", "1", "--t", "0"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][column(rows[0], "class")] == "Schrodinger");
  }
  SUBCASE("exact boundary") {
    const Run r = run({"classify", "--alpha", "1", "--t-pi", "1/2"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][column(rows[0], "class")] == "RealLine");
    CHECK(rows[1][column(rows[0], "t_pi")] == "1/2");
    CHECK(std::stod(rows[1][column(rows[0], "direction_x")]) == 0.0);
    CHECK(std::stod(rows[1][column(rows[0], "direction_p")]) == 1.0);
    CHECK(std::stod(rows[1][column(rows[0], "w_a_re")]) == 0.0);
  }
  SUBCASE("general H through the h flags") {
    const Run r = run({"classify", "--h11", "-2", "--h12", "1", "--h22", "1", "--t-pi", "1/4,3/4"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    CHECK(rows[1][column(rows[0], "class")] == "AntiKahler");
    CHECK(rows[2][column(rows[0], "class")] == "Kahler");
  }
}

TEST_CASE("unitarity") {
  SUBCASE("quarter period on a 5x5 grid") {
    const Run r = run({"unitarity", "--alpha", "1", "--t-pi", "1/4"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 26);
    const std::size_t s = column(rows[0], "status"), n = column(rows[0], "closed_form_norm"),
                      q = column(rows[0], "quadrature_norm"), g = column(rows[0], "gram_defect");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i][s] == "ok");
      CHECK(std::abs(std::stod(rows[i][n]) - 1.0) < 1e-12);
      CHECK(std::abs(std::stod(rows[i][q]) - 1.0) < 1e-8);
      CHECK(std::stod(rows[i][g]) < 1e-8);
    }
  }
  SUBCASE("t = 0 is the identity") {
    const Run r = run({"unitarity", "--alpha", "1", "--t", "0", "--y-grid", "-1:1:3,-1:1:3"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 10);
    const std::size_t n = column(rows[0], "closed_form_norm");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][n]) - 1.0) < 1e-15);
  }
  SUBCASE("anti-Kahler times are flagged, not aborted") {
    const Run r = run({"unitarity", "--alpha", "1", "--t", "2.0"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 26);
    const std::size_t s = column(rows[0], "status");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][s] == "divergent");
  }
  SUBCASE("general hyperbolic H") {
    const Run r = run({"unitarity", "--h11", "2", "--h12", "1", "--h22", "-1", "--t", "0.2",
                       "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["summary"]["ok"] == 25);
    CHECK(j["summary"]["max_quadrature_deviation"].get<double>() < 1e-8);
  }
  SUBCASE("an impossible tolerance fails with exit 1") {
    const Run r = run({"unitarity", "--alpha", "1", "--t", "0.5", "--tol", "gram=1e-300",
                       "--y-grid", "0:1:2,0:1:2"});
    CHECK(r.code == 1);
  }
}

TEST_CASE("endpoints") {
  SUBCASE("defaults") {
    const Run r = run({"endpoints", "--alpha", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["summary"]["max_fourier_deviation"].get<double>() < 1e-10);
    CHECK(j["summary"]["max_sb_deviation"].get<double>() < 1e-9);
    CHECK(j["summary"]["max_constant_deviation"].get<double>() < 1e-9);
  }
  SUBCASE("t = 0 pair") {
    const Run r = run({"endpoints", "--alpha", "2", "--t", "0", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    for (const auto& row : j["rows"]) {
      if (row["kind"] == "segal_bargmann") {
        CHECK(row["t_tilde"].get<double>() == 0.0);
        CHECK(row["max_deviation"].get<double>() < 1e-15);
      }
    }
  }
  SUBCASE("quarter period matches the classical transform") {
    const Run r = run({"endpoints", "--alpha", "1", "--t-pi", "1/4"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    const std::size_t k = column(rows[0], "kind"), tt = column(rows[0], "t_tilde"),
                      d = column(rows[0], "max_deviation");
    int sb = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][k] != "segal_bargmann") continue;
      ++sb;
      CHECK(std::abs(std::stod(rows[i][tt]) - 1.0) < 1e-15);
      CHECK(std::stod(rows[i][d]) < 1e-9);
    }
    CHECK(sb == 25);
  }
  SUBCASE("times outside the window are configuration errors") {
    const Run r = run({"endpoints", "--alpha", "1", "--t", "2.0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("t_grid") != std::string::npos);
  }
}

TEST_CASE("accept") {
  const Run list = run({"accept", "--list"});
  REQUIRE(list.code == 0);
  for (const char* id : {"C1-unitarity", "C5-sb-equivalence", "C10-periodicity"}) {
    CHECK(list.out.find(id) != std::string::npos);
  }
  CHECK(list.out.find("PASS") == std::string::npos);
}

TEST_CASE("configuration errors") {
  CHECK(run({"classify", "--h11", "1", "--h12", "0", "--h22", "1"}).code == 2);
  CHECK(run({"classify", "--t-grid", "0:1:0"}).code == 2);
  CHECK(run({"classify", "--t-grid", "1:0:5"}).code == 2);
  CHECK(run({"classify", "--t-pi", "1/0"}).code == 2);
  CHECK(run({"classify", "--t", "0", "--t-pi", "1/2"}).code == 2);
  CHECK(run({"classify", "--format", "xml"}).code == 2);
  CHECK(run({"unitarity", "--tol", "bogus=1"}).code == 2);
  CHECK(run({"classify", "--alpha", "2", "--h11", "1", "--h22", "-1"}).code == 2);
  CHECK(run({"classify", "--config", "does-not-exist.json"}).code == 2);
  CHECK(run({}).code == 2);
  const Run bad = run({"classify", "--h11", "1", "--h22", "1"});
  CHECK(bad.err.find("hamiltonian") != std::string::npos);

  {
    std::ofstream f("unknown_key.json");
    f << R"({"alpha": 1.0, "t_grid": {"start": 0, "stop": 1, "count": 3}, "colour": "red"})";
  }
  const Run unknown = run({"classify", "--config", "unknown_key.json"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("colour") != std::string::npos);

  CHECK_THROWS_AS(from_json(json::parse(R"({"y_grid": {"p": {"start": 0, "stop": 1, "count": 2, "step": 1}}})")),
                  ConfigError);
  CHECK_THROWS_AS(from_json(json::parse(R"({"t_pi": [[1, 2, 3]]})")), ConfigError);
  CHECK_THROWS_AS(from_json(json::parse(R"({"seed": -4})")), ConfigError);
}

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.hamiltonian = {2.0, 1.0, -1.0};
  cfg.t_pi = {{1, 6}, {1, 4}};
  cfg.p_grid = {-1.0, 1.0, 3};
  cfg.q_grid = {0.0, 2.0, 2};
  cfg.tolerances["gram"] = 1e-9;
  cfg.format = OutputFormat::Json;
  cfg.seed = 7;
  const RunConfig back = from_json(to_json(cfg));
  CHECK(back.hamiltonian == cfg.hamiltonian);
  REQUIRE(back.t_pi.size() == 2);
  CHECK(back.t_pi[1].k == 1);
  CHECK(back.t_pi[1].d == 4);
  CHECK(back.p_grid.count == 3);
  CHECK(back.q_grid.stop == 2.0);
  CHECK(back.tolerance("gram") == 1e-9);
  CHECK(back.tolerance("fourier") == 1e-10);
  CHECK(back.format == OutputFormat::Json);
  CHECK(back.seed == 7);
  CHECK(to_json(back) == to_json(cfg));

  // the config embedded in JSON output reloads
  const Run r = run({"classify", "--alpha", "1", "--t-grid", "0:3:4", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const RunConfig reloaded = from_json(j["config"]);
  REQUIRE(reloaded.t_grid);
  CHECK(reloaded.t_grid->count == 4);
  CHECK(j["rows"].size() == 4);

  CHECK(parse_range("0:1:5", "x").values().back() == 1.0);
  CHECK(parse_range("0.5:0.5:1", "x").values() == std::vector<double>{0.5});
  CHECK(parse_tolerance("sb=1e-7").second == 1e-7);
}

TEST_CASE("csv output") {
  const std::vector<std::string> args = {"classify", "--alpha", "1.5", "--t-grid", "0:2:7"};
  const Run a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find('\r') == std::string::npos);
  // 17 significant digits
  CHECK(a.out.find("0.33333333333333331") != std::string::npos);

  const Run f = run({"classify", "--alpha", "1", "--t", "0.5", "--out", "classify_out.csv"});
  REQUIRE(f.code == 0);
  CHECK(f.out.empty());
  std::ifstream in("classify_out.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().rfind("t,t_pi,class", 0) == 0);

  Table t{{"a", "b"}, {{1.0, std::string("x,y")}, {Cell{}, 3L}}};
  std::ostringstream out;
  write_csv(t, out);
  CHECK(out.str() == "a,b\n1,\"x,y\"\n,3\n");
}
