#include "doctest.h"

#include "cli.hpp"

#include "moptree/asymptotics.hpp"
#include "moptree/spectral.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace moptree;
namespace fs = std::filesystem;

namespace {

std::string system_file(const std::string& name) { return std::string(MOPTREE_DATA_DIR) + "/" + name + ".json"; }

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run mop_trees(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::main_entry(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("moptree_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

int data_lines(const std::string& csv) { return static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) - 1; }

// A failing run must leave one parseable {error, context} object on stderr.
void check_error_json(const Run& r) {
  INFO(r.err);
  REQUIRE_FALSE(r.err.empty());
  auto j = nlohmann::json::parse(r.err);
  CHECK(j.contains("error"));
  CHECK(j.contains("context"));
  CHECK(j["error"].is_string());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run configs round-trip") {
  auto cfg = cli::parse_command_line({"compute", "theta", "--system", "s.json", "--z", "5,0", "3i-unused", "--depth",
                                      "12", "--kappa", "0,1", "--backend", "bigfloat:128", "--out", "o"});
  CHECK(cfg.command == "compute");
  CHECK(cfg.target == "theta");
  CHECK(cfg.z == std::vector<std::string>{"5,0", "3i-unused"});
  CHECK(cfg.params.at("depth") == "12");
  auto j = cfg.to_json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) {
    keys.push_back(k);
  }
  CHECK(keys == std::vector<std::string>{"command", "target", "system", "out", "backend", "params", "z"});
  auto back = cli::RunConfig::from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.to_json().dump() == j.dump());

  // Parameter order on the command line does not matter.
  auto a = cli::parse_command_line({"verify", "all", "--window", "2,2", "--N", "3,2", "--system", "x"});
  auto b = cli::parse_command_line({"verify", "--system", "x", "--N", "3,2", "all", "--window", "2,2"});
  CHECK(a.to_json().dump() == b.to_json().dump());

  auto dir = scratch("config");
  write(dir / "run.json", j.dump());
  auto printed = mop_trees({"--config", (dir / "run.json").string(), "--print-config"});
  CHECK(printed.code == 0);
  CHECK(nlohmann::ordered_json::parse(printed.out).dump() == j.dump());

  CHECK_THROWS_AS(cli::RunConfig::from_json(nlohmann::json::parse(R"({"command":"compute"})")), Error);
  CHECK_THROWS_AS(cli::RunConfig::from_json(nlohmann::json::parse(
                      R"({"command":"compute","target":"mop","system":"s","bogus":1})")),
                  Error);
  CHECK_THROWS_AS(cli::RunConfig::from_json(nlohmann::json::parse(
                      R"({"command":"compute","target":"mop","system":"s","params":{"depth":3}})")),
                  Error);
}

TEST_CASE("complex and list parsing") {
  auto [re, im] = cli::parse_complex("1/2,-3");
  CHECK(re == Rational(1, 2));
  CHECK(im == -3);
  CHECK(cli::parse_complex("0.25").second == 0);
  CHECK_THROWS_AS(cli::parse_complex("1,2,3"), Error);
  CHECK(cli::parse_rational_list("0,1/3").size() == 2);
}

TEST_CASE("recurrence CSV") {
  auto r = mop_trees({"compute", "recurrence", "--window", "4,4", "--system", system_file("symmetric")});
  REQUIRE(r.code == 0);
  // two coefficients per label per cell: 2 * 25 * 2
  CHECK(data_lines(r.out) == 100);
  CHECK(r.out.rfind("n1,n2,j,coefficient,value(bits=256),exact,provenance\n", 0) == 0);
  CHECK(r.out.find("\n0,0,1,b,") != std::string::npos);
  CHECK(r.out.find(",-3/4,por-formula\n") != std::string::npos);

  auto f = mop_trees({"compute", "recurrence", "--window", "1,1", "--backend", "bigfloat:128", "--system",
                      system_file("symmetric")});
  REQUIRE(f.code == 0);
  CHECK(f.out.find("value(bits=128),exact") != std::string::npos);
  CHECK(f.out.find("/") == std::string::npos);
}

TEST_CASE("chi constants of the symmetric system") {
  auto r = mop_trees({"compute", "chi", "--system", system_file("symmetric"), "--z", "2,1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  BigFloat A1(j["A"][0].get<std::string>()), A2(j["A"][1].get<std::string>());
  BigFloat B1(j["B"][0].get<std::string>()), B2(j["B"][1].get<std::string>());
  CHECK(abs(A1 - A2) < BigFloat(1e-25));
  CHECK(abs(B1 + B2) < BigFloat(1e-25));
  CHECK(j["chi"].size() == 1);
}

TEST_CASE("theta pair") {
  auto r = mop_trees({"compute", "theta", "--z", "5,0", "--depth", "12", "--kappa", "0,1", "--system",
                      system_file("symmetric")});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "z_re,z_im,method,value_re,value_im");
  std::vector<BigFloat> values;
  std::vector<std::string> methods;
  while (std::getline(in, row)) {
    std::vector<std::string> cells;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    REQUIRE(cells.size() == 5);
    methods.push_back(cells[2]);
    values.emplace_back(cells[3]);
  }
  REQUIRE(methods == std::vector<std::string>{"truncated", "formula"});
  // Oracle: the library's formula evaluated directly.
  auto table = make_table<BigFloat>(load_system(system_file("symmetric_bigfloat")));
  auto th = theta_formula(table->family().moments(), {BigFloat(0), BigFloat(1)}, Complex<BigFloat>(5));
  CHECK(abs(values[1] - th.re) < BigFloat(1e-60));
  CHECK(abs(values[0] - values[1]) < BigFloat(1e-6));
}

TEST_CASE("verify suites") {
  auto r = mop_trees({"verify", "identities", "--system", system_file("symmetric")});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "pass");
  for (const auto& c : j["suites"][0]["checks"]) {
    CHECK(c["status"] == "pass");
    CHECK(c["residual"] == "0");
  }

  auto h = mop_trees({"verify", "bounds", "--system", system_file("hermite")});
  CHECK(h.code == 0);
  auto hj = nlohmann::json::parse(h.out);
  CHECK(hj["suites"][0]["status"] == "skipped");
  CHECK_FALSE(hj["suites"][0]["note"].get<std::string>().empty());

  auto g = mop_trees({"verify", "green-crosscheck", "--N", "3,2", "--system", system_file("symmetric_bigfloat")});
  CHECK(g.code == 0);
  auto gj = nlohmann::json::parse(g.out);
  CHECK(gj["suites"][0]["checks"].size() == 3);
  for (const auto& c : gj["suites"][0]["checks"]) {
    CHECK(c["status"] == "pass");
    CHECK(BigFloat(c["residual"].get<std::string>()) <= BigFloat(1e-30));
  }

  auto all = mop_trees({"verify", "all", "--window", "2,2", "--system", system_file("three_intervals")});
  CHECK(all.code == 2);  // window has the wrong dimension
  check_error_json(all);
}

TEST_CASE("export") {
  auto d1 = scratch("export1"), d2 = scratch("export2"), d3 = scratch("export3");
  REQUIRE(mop_trees({"export", "--N", "2,1", "--system", system_file("symmetric"), "--out", d1.string()}).code == 0);
  REQUIRE(mop_trees({"export", "--N", "2,1", "--system", system_file("symmetric"), "--out", d2.string()}).code == 0);
  auto tree = nlohmann::json::parse(slurp(d1 / "tree.json"));
  CHECK(tree["vertices"].size() == 9);
  CHECK(slurp(d1 / "tree.json") == slurp(d2 / "tree.json"));
  CHECK(slurp(d1 / "operator.csv") == slurp(d2 / "operator.csv"));
  REQUIRE(mop_trees({"export", "tree", "--kind", "truncated", "--depth", "3", "--system", system_file("symmetric"),
                     "--out", d3.string()})
              .code == 0);
  CHECK(nlohmann::json::parse(slurp(d3 / "tree.json"))["vertices"].size() == 15);
}

TEST_CASE("vertex cap") {
  setenv("MOP_TREES_MAX_VERTICES", "10", 1);
  auto r = mop_trees({"export", "--kind", "truncated", "--depth", "5", "--system", system_file("symmetric")});
  unsetenv("MOP_TREES_MAX_VERTICES");
  CHECK(r.code == 2);
  check_error_json(r);
  CHECK(nlohmann::json::parse(r.err)["error"] == "SizeLimitExceeded");
}

TEST_CASE("exit codes") {
  auto missing = mop_trees({"compute", "mop", "--system", "/nonexistent/system.json"});
  CHECK(missing.code == 2);
  check_error_json(missing);

  for (std::vector<std::string> bad :
       {std::vector<std::string>{"compute", "nothing", "--system", system_file("symmetric")},
        {"verify", "everything", "--system", system_file("symmetric")},
        {"compute", "mop"},
        {"compute", "mop", "--system", system_file("symmetric"), "--backend", "bigfloat:abc"},
        {"compute", "mop", "--system", system_file("symmetric"), "--backend", "decimal"},
        {"compute", "mop", "--system", system_file("hermite"), "--backend", "rational"},
        {"compute", "theta", "--kappa", "1,1", "--system", system_file("symmetric")},
        {"compute", "theta", "--depth", "x", "--system", system_file("symmetric")},
        {"compute", "mop", "--n", "1", "--system", system_file("symmetric")},
        {"compute", "mop", "--system", system_file("symmetric"), "--unknown-flag", "1"},
        {"frobnicate"}}) {
    INFO(bad[0] << " " << (bad.size() > 1 ? bad[1] : ""));
    auto r = mop_trees(bad);
    CHECK(r.code == 2);
    check_error_json(r);
  }

  // Computation errors: a point on the support, and d = 1 where the gamma constants do not exist.
  auto on_support = mop_trees({"compute", "theta", "--z", "3/4,0", "--system", system_file("symmetric")});
  CHECK(on_support.code == 3);
  check_error_json(on_support);
  CHECK(mop_trees({"compute", "density", "--system", system_file("legendre")}).code == 2);
}

TEST_CASE("malformed system documents") {
  const std::string good = slurp(system_file("symmetric"));
  auto dir = scratch("fuzz");
  std::vector<std::string> cases{
      "",
      "{",
      "[]",
      R"({"kind":"angelesco"})",
      R"({"kind":"angelesco","measures":[]})",
      R"({"kind":"nonsense","measures":[{"interval":["0","1"],"weight":{"kind":"lebesgue"}}]})",
      R"({"kind":"angelesco","measures":[{"interval":["0","1"],"weight":{"kind":"lebesgue"}},
                                         {"interval":["1/2","2"],"weight":{"kind":"lebesgue"}}]})",
      R"({"kind":"angelesco","measures":[{"interval":["2","3"],"weight":{"kind":"lebesgue"}},
                                         {"interval":["0","1"],"weight":{"kind":"lebesgue"}}]})",
      R"({"kind":"angelesco","measures":[{"interval":["0","1"],"weight":{"kind":"lebesgue"}}],"backend":{"type":"x"}})",
      R"({"kind":"angelesco","measures":[{"interval":["0","1"],"weight":{"kind":"lebesgue"}}],"backend":{"type":"bigfloat","bits":8}})",
      R"({"kind":"angelesco","measures":[{"interval":["a","1"],"weight":{"kind":"lebesgue"}}]})",
      R"({"kind":"hermite","measures":[{"interval":"R","weight":{"kind":"gaussian","c":"1"}},
                                      {"interval":"R","weight":{"kind":"gaussian","c":"1"}}]})",
  };
  // Deterministic byte-level damage to a valid document.
  std::mt19937_64 rng(2024);
  const std::string junk = "{}[]\",:0x-/ ";
  for (int k = 0; k < 40; ++k) {
    std::string s = good;
    std::uniform_int_distribution<std::size_t> pos(0, s.size() - 1);
    if (k % 2 == 0) {
      s = s.substr(0, pos(rng));
    } else {
      s[pos(rng)] = junk[rng() % junk.size()];
    }
    cases.push_back(s);
  }
  int rejected = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto path = dir / ("case" + std::to_string(k) + ".json");
    write(path, cases[k]);
    auto r = mop_trees({"compute", "recurrence", "--window", "1,1", "--system", path.string()});
    INFO(cases[k]);
    CHECK((r.code == 0 || r.code == 2 || r.code == 3));
    if (r.code != 0) {
      check_error_json(r);
      ++rejected;
    }
    if (k < 12) {
      CHECK(r.code == 2);
    }
  }
  CHECK(rejected >= 12);
}

TEST_CASE("determinism") {
  std::vector<std::string> args{"compute", "random-path", "--steps", "60", "--trials", "5", "--seed", "9",
                                "--system", system_file("symmetric")};
  auto a = mop_trees(args);
  auto b = mop_trees(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["rates"].size() == 5);

  std::vector<std::string> conv{"compute", "converge", "--m-max", "6", "--system", system_file("symmetric")};
  auto c1 = mop_trees(conv);
  auto c2 = mop_trees(conv);
  REQUIRE(c1.code == 0);
  CHECK(c1.out == c2.out);
  CHECK(data_lines(c1.out) == 6 * 2 * 3);
}

TEST_CASE("other computations") {
  auto mop = mop_trees({"compute", "mop", "--n", "2,1", "--system", system_file("symmetric")});
  REQUIRE(mop.code == 0);
  auto mj = nlohmann::json::parse(mop.out);
  CHECK(mj["normal"] == true);
  CHECK(mj["P"].size() == 4);
  CHECK(mj["P"][3]["exact"] == "1");
  CHECK(mj["zeros"][0].size() == 2);
  CHECK(mj["zeros"][1].size() == 1);

  auto green = mop_trees({"compute", "tree-green", "--N", "2,1", "--z", "2,1", "--z", "5", "--system",
                          system_file("symmetric")});
  REQUIRE(green.code == 0);
  CHECK(data_lines(green.out) == 6);

  auto support = mop_trees({"compute", "support", "--N", "2,1", "--j", "2", "--system", system_file("symmetric")});
  REQUIRE(support.code == 0);
  auto sj = nlohmann::json::parse(support.out);
  CHECK(sj["ok"] == true);
  CHECK(sj["vertices"] == 9);

  auto density = mop_trees({"compute", "density", "--points", "4", "--system", system_file("symmetric")});
  REQUIRE(density.code == 0);
  CHECK(data_lines(density.out) == 8);

  auto herm = mop_trees({"compute", "converge", "--system", system_file("hermite")});
  REQUIRE(herm.code == 0);
  CHECK(nlohmann::json::parse(herm.out)["skipped"] == true);
}

}  // TEST_SUITE
