#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "safe_explore/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "safe_explore");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = safe_explore::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("help exits 0") {
  const auto r = run({"bandit", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--epsilons") != std::string::npos);
}

TEST_CASE("unknown flag or subcommand exits 1") {
  CHECK(run({"corridor", "--bogus"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
}

TEST_CASE("corridor csv is deterministic given the seed") {
  const std::string a = "/tmp/safe_explore_cli_a.csv", b = "/tmp/safe_explore_cli_b.csv";
  CHECK(run({"corridor", "--length", "15", "--agents", "50", "--seed", "7", "--out", a}).code == 0);
  CHECK(run({"corridor", "--length", "15", "--agents", "50", "--seed", "7", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("oracle on an exported corridor") {
  const std::string path = "/tmp/safe_explore_corridor15.json";
  CHECK(run({"corridor", "--length", "15", "--export-mdp", path}).code == 0);
  const auto r = run({"oracle", "--mdp", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("unsafe_pairs 31\n") != std::string::npos);
  CHECK(r.out.find("lag 0\n") != std::string::npos);
  CHECK(run({"validate", "--mdp", path}).code == 0);
  std::remove(path.c_str());
}

TEST_CASE("validate rejects a malformed kernel") {
  const std::string path = "/tmp/safe_explore_bad.json";
  {
    std::ofstream f(path);
    f << R"({"n_states": 1, "n_actions": 1, "terminal": [],
             "transitions": [{"s": 0, "a": 0, "branches": [{"sp": 0, "p": 0.4, "r": 0, "d": 0}]}]})";
  }
  const auto r = run({"validate", "--mdp", path});
  CHECK(r.code == 1);
  CHECK(r.err.find("sum to") != std::string::npos);
  CHECK(run({"oracle", "--mdp", path}).code == 1);
  std::remove(path.c_str());
}

TEST_CASE("config file then flags") {
  const std::string cfg = "/tmp/safe_explore_cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"corridor": {"length": 4, "n_agents": 3}})";
  }
  auto r = run({"corridor", "--config", cfg, "--agents", "2"});
  CHECK(r.code == 0);
  // header + 2 agents x 2 modes + 4 summary rows
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 4 + 4);
  {
    std::ofstream f(cfg);
    f << R"({"corridor": {"lenght": 4}})";
  }
  CHECK(run({"corridor", "--config", cfg}).code == 1);
  std::remove(cfg.c_str());
}

TEST_CASE("strict mode reports incomplete runs with exit 2") {
  CHECK(run({"grid", "--runs", "1", "--max-steps", "10", "--strict"}).code == 2);
  CHECK(run({"grid", "--runs", "1", "--max-steps", "10"}).code == 0);
}

TEST_CASE("parameter errors exit 1") {
  CHECK(run({"bandit", "--mu", "1.5"}).code == 1);
}
