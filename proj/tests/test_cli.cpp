#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ringcheck/cli.hpp"

using json = nlohmann::ordered_json;
using ringcheck::run_cli;

namespace {

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> json_keys(const json& j) {
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  return keys;
}

}  // namespace

TEST_CASE("check: builtin properties on the modified ring pass with exit 0") {
  CliResult r = run({"check", "--variant", "modified", "-n", "3", "--uids", "0,1,2",
                     "--props", "builtin", "--fairness", "running"});
  CHECK(r.status == 0);
  json doc = json::parse(r.out);
  CHECK(doc["tool"] == "ringcheck");
  CHECK(doc["variant"] == "modified");
  CHECK(doc["n"] == 3);
  REQUIRE(doc["properties"].size() == 3);
  for (const auto& p : doc["properties"]) {
    CHECK(p["holds"] == p["expected"]);
  }
  CHECK(doc["stats"]["quiescent_nonleader"] == 0);
  // Stable key order for golden tooling.
  CHECK(json_keys(doc) == std::vector<std::string>{"tool", "version", "variant", "n", "uids",
                                                   "properties", "stats", "elapsed_ms"});
}

TEST_CASE("check: fairness off fails P1 with a starvation lasso and exit 1") {
  CliResult r = run({"check", "--variant", "modified", "-n", "3", "--uids", "0,1,2",
                     "--props", "builtin", "--fairness", "off"});
  CHECK(r.status == 1);
  json doc = json::parse(r.out);
  const auto& p1 = doc["properties"][0];
  CHECK(p1["holds"] == false);
  CHECK(p1["expected"] == true);
  REQUIRE(p1.contains("evidence"));
  CHECK(p1["evidence"].contains("loop_start"));
}

TEST_CASE("check: default fairness is per-property") {
  CliResult r = run({"check", "--variant", "extra", "-n", "3", "--uids", "2,0,1"});
  CHECK(r.status == 0);
  json doc = json::parse(r.out);
  CHECK(doc["properties"][0]["fairness"] == "running");
  CHECK(doc["properties"][1]["fairness"] == "off");
  CHECK(doc["properties"][2]["fairness"] == "off");
}

TEST_CASE("check: single-node ring handles the empty pair disjunction") {
  CliResult r = run({"check", "--variant", "general", "-n", "1"});
  CHECK(r.status == 0);
  json doc = json::parse(r.out);
  CHECK(doc["properties"][1]["formula"] == "EF false");
  CHECK(doc["properties"][1]["holds"] == false);
}

TEST_CASE("check: custom property file with expected verdicts") {
  const std::string path = "/tmp/ringcheck_props_test.txt";
  {
    std::ofstream f(path);
    f << "# custom battery\n";
    f << "expect:false two-leaders: EF (leader(0) & leader(1))\n";
    f << "eventual: AF (leader(0) | leader(1))\n";
  }
  CliResult ok = run({"check", "--variant", "modified", "-n", "2", "--props", path,
                      "--fairness", "running"});
  CHECK(ok.status == 0);
  json doc = json::parse(ok.out);
  REQUIRE(doc["properties"].size() == 2);
  CHECK(doc["properties"][0]["name"] == "two-leaders");
  CHECK(doc["properties"][0]["holds"] == false);
  CHECK(doc["properties"][1]["holds"] == true);
  std::remove(path.c_str());
}

TEST_CASE("check: malformed property file is a usage error") {
  const std::string path = "/tmp/ringcheck_props_bad.txt";
  {
    std::ofstream f(path);
    f << "broken: leader(9)\n";
  }
  CliResult r = run({"check", "--variant", "modified", "-n", "2", "--props", path});
  CHECK(r.status == 2);
  CHECK_FALSE(r.err.empty());
  std::remove(path.c_str());
}

TEST_CASE("explore: stats document with the declared field set") {
  CliResult r = run({"explore", "--variant", "extra", "-n", "4", "--uids", "0,1,2,3",
                     "--max-states", "5000000"});
  CHECK(r.status == 0);
  json doc = json::parse(r.out);
  CHECK(doc["quiescent_nonleader"] == 0);
  CHECK(json_keys(doc) ==
        std::vector<std::string>{"variant", "n", "uids", "reachable_states", "transitions",
                                 "self_loops", "quiescent_nonleader", "peak_frontier"});
}

TEST_CASE("explore: hitting the state cap exits 3") {
  CliResult r = run({"explore", "--variant", "modified", "-n", "4", "--max-states", "10"});
  CHECK(r.status == 3);
  json doc = json::parse(r.out);
  CHECK(doc["truncated"] == true);
}

TEST_CASE("explore: worker count does not change the stats document") {
  CliResult serial = run({"explore", "--variant", "general", "-n", "4", "--jobs", "1"});
  CliResult parallel = run({"explore", "--variant", "general", "-n", "4", "--jobs", "4"});
  CHECK(serial.status == 0);
  CHECK(serial.out == parallel.out);
}

TEST_CASE("simulate: JSON report with oracle cross-check") {
  CliResult r = run({"simulate", "--variant", "extra", "-n", "4", "--uids", "3,1,2,0",
                     "--seed", "7", "--runs", "2"});
  CHECK(r.status == 0);
  json doc = json::parse(r.out);
  CHECK(doc["oracle_winner"] == 3);
  REQUIRE(doc["runs"].size() == 2);
  for (const auto& run_doc : doc["runs"]) {
    CHECK(run_doc["terminated"] == true);
    CHECK(run_doc["elected"] == 3);
    CHECK(run_doc["elected_vid"] == 3);
  }
}

TEST_CASE("simulate: csv format matches the sweep schema") {
  CliResult r = run({"simulate", "--variant", "modified", "-n", "3", "--seed", "1",
                     "--runs", "2", "--format", "csv"});
  CHECK(r.status == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "variant,n,seed,uids,elected,elected_vid,steps,link_transmissions,oracle_winner,phases");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK(rows == 2);
}

TEST_CASE("simulate: exhausted budget exits 3") {
  CliResult r = run({"simulate", "--variant", "modified", "-n", "4", "--max-steps", "2"});
  CHECK(r.status == 3);
}

TEST_CASE("sweep: csv loads with held invariants") {
  CliResult r = run({"sweep", "--n-range", "2..5", "--runs", "3", "--seed", "11"});
  CHECK(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK(rows == 3 * 4 * 3);  // variants x sizes x runs
}

TEST_CASE("sweep: bad range is a usage error") {
  CHECK(run({"sweep", "--n-range", "5"}).status == 2);
  CHECK(run({"sweep", "--n-range", "6..2"}).status == 2);
}

TEST_CASE("export-smv writes the named model file") {
  const std::string path = "/tmp/ringcheck_export_test.smv";
  CliResult r = run({"export-smv", "--variant", "modified", "-n", "3", "--out", path});
  CHECK(r.status == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str().find("MODULE main") != std::string::npos);
  CHECK(buf.str().find("FAIRNESS node2.running") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("uid-seed derives a reproducible permutation") {
  CliResult a = run({"explore", "--variant", "modified", "-n", "5", "--uid-seed", "99"});
  CliResult b = run({"explore", "--variant", "modified", "-n", "5", "--uid-seed", "99"});
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  json doc = json::parse(a.out);
  CHECK(doc["uids"].size() == 5);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"check", "--variant", "nosuch", "-n", "3"}).status == 2);
  CHECK(run({"check", "--variant", "modified"}).status == 2);       // missing -n
  CHECK(run({"check", "-n", "3", "--uids", "0,0,1"}).status == 2);  // duplicate uids
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({}).status == 2);
}

TEST_CASE("help is not an error") {
  CliResult r = run({"--help"});
  CHECK(r.status == 0);
  CHECK(r.out.find("check") != std::string::npos);
}
