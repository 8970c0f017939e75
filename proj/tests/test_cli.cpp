#include "taskspace/cli.hpp"
#include "taskspace/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace taskspace;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string sys(const std::string& name) { return std::string(TASKSPACE_SYSTEMS_DIR) + "/" + name; }

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("taskspace-test-" + name);
  std::ofstream(path) << content;
  return path;
}

// (k, quantity, type) -> (value, stderr) from CSV output.
std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, std::string>> parse_csv(
    const std::string& csv) {
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, std::string>> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() == 4) cells.push_back("");
    REQUIRE(cells.size() == 5);
    out[{cells[0], cells[1], cells[2]}] = {std::stod(cells[3]), cells[4]};
  }
  return out;
}

}  // namespace

TEST_CASE("classify prints the classification") {
  const auto r = cli({"classify", sys("one-type-05.ts")});
  CHECK(r.code == 0);
  CHECK(r.out.find("\nCritical\n") != std::string::npos);
  CHECK(cli({"classify", sys("sys-c.ts")}).out.find("\nSubcritical\n") != std::string::npos);
}

TEST_CASE("optimal-dist csv rows") {
  const auto r = cli({"optimal-dist", sys("one-type-05.ts"), "--kmax", "4", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("k,quantity,type,value,stderr\n", 0) == 0);
  CHECK(r.out.find("1,tail,X,1,\n2,tail,X,0.5,\n3,tail,X,0.25,\n4,tail,X,0.125,\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(cli({"classify", "missing.ts"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"classify"}).code == 2);
  CHECK(cli({"classify", sys("sys-c.ts"), "--format", "xml"}).code == 2);
  CHECK(cli({"optimal-dist", sys("sys-c.ts"), "--kmax", "x"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"simulate", "--help"}).code == 0);
  CHECK(cli({"depth-first", sys("sys-c.ts"), "--swap", "1"}).code == 2);
  CHECK(cli({"light-first", sys("sys-c.ts"), "--ell", "1", "--estimate-ell"}).code == 2);

  const auto bad = temp_file("bad.ts", "init X\nX -> X X : 0.3\nX -> : 0.5\n");
  const auto parse = cli({"classify", bad.string()});
  CHECK(parse.code == 1);
  CHECK(parse.err.find("line 3") != std::string::npos);
  CHECK(parse.err.find("sum to 0.8") != std::string::npos);

  CHECK(cli({"validate", sys("one-type-06.ts")}).code == 1);
  CHECK(cli({"validate", sys("sys-c.ts")}).code == 0);
  CHECK(cli({"classify", sys("one-type-06.ts")}).code == 1);
  CHECK(cli({"online-bounds", sys("sys-d.ts")}).code == 1);
  CHECK(cli({"online-bounds", sys("sys-d.ts"), "--compact"}).code == 0);
  CHECK(cli({"online-bounds", sys("intro.ts")}).code == 1);
  CHECK(cli({"depth-first", sys("one-type-05.ts")}).code == 1);

  const auto not_compact = temp_file("chain.ts", "X -> Y : 1\nY -> : 1\n");
  const auto r = cli({"light-first", not_compact.string(), "--compact"});
  CHECK(r.code == 1);
  CHECK(r.err.find("2") != std::string::npos);
}

TEST_CASE("every subcommand is deterministic") {
  const std::vector<std::vector<std::string>> commands{
      {"validate", sys("intro.ts")},
      {"classify", sys("sys-c.ts")},
      {"optimal-dist", sys("sys-c.ts"), "--kmax", "8"},
      {"optimal-mean", sys("sys-c.ts")},
      {"online-bounds", sys("sys-c.ts"), "--kmax", "6", "--refine"},
      {"light-first", sys("sys-c.ts"), "--kmax", "6", "--estimate-ell"},
      {"depth-first", sys("sys-c.ts"), "--kmax", "6", "--swap", "0", "--mean"},
      {"simulate", sys("sys-c.ts"), "--policy", "random", "--samples", "5000", "--seed", "4"},
      {"simulate", sys("sys-c.ts"), "--policy", "optimal", "--samples", "5000", "--seed", "4"},
  };
  for (auto args : commands) {
    for (const std::string format : {"csv", "json", "text"}) {
      auto a = args;
      a.insert(a.end(), {"--format", format});
      const auto first = cli(a);
      const auto second = cli(a);
      CHECK(first.code == 0);
      CHECK(first.out == second.out);
      CHECK(!first.out.empty());
    }
  }
}

TEST_CASE("simulate output does not depend on the thread count") {
  std::vector<std::string> base{"simulate", sys("sys-c.ts"), "--policy", "light-first", "--samples", "20000",
                                "--format", "json"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  CHECK(cli(one).out == cli(four).out);
}

TEST_CASE("json output round trips") {
  const auto r = cli({"light-first", sys("sys-c.ts"), "--kmax", "5", "--estimate-ell", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto parsed = report_from_json(nlohmann::ordered_json::parse(r.out));
  CHECK(emit_json(parsed) == r.out);
  CHECK(parsed.command == "light-first");
  CHECK(parsed.system.names == std::vector<std::string>{"X", "Y"});

  Report rep;
  rep.command = "x";
  rep.system = {2, 3, "A", {"A", "B"}};
  rep.classification = "Critical";
  rep.rows = {{1, "tail", "A", 0.1, 0.01}, {std::nullopt, "v", "B", 1.0 / 3.0, std::nullopt},
              {2, "upper", "A", INFINITY, std::nullopt}};
  rep.notes = {"n1", "a, \"quoted\" note"};
  rep.provenance = {{"z", "1"}, {"a", "2"}};
  CHECK(report_from_json(nlohmann::ordered_json::parse(emit_json(rep))) == rep);
}

TEST_CASE("emit") {
  Report empty;
  CHECK(emit_csv(empty) == "k,quantity,type,value,stderr\n");
  Report rep;
  rep.rows = {{3, "tail", "X", 0.25, 0.001}, {std::nullopt, "name,with comma", "X", 2.0, std::nullopt}};
  CHECK(emit_csv(rep) == "k,quantity,type,value,stderr\n3,tail,X,0.25,0.001\n,\"name,with comma\",X,2,\n");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(parse_format("json") == Format::Json);
  CHECK_FALSE(parse_format("yaml"));

  const auto sim = cli({"simulate", sys("one-type-03.ts"), "--samples", "1000", "--kmax", "3", "--format", "csv"});
  const auto rows = parse_csv(sim.out);
  CHECK_FALSE(rows.at({"2", "tail", "X"}).second.empty());
}

TEST_CASE("--out writes the report to a file") {
  const auto path = std::filesystem::temp_directory_path() / "taskspace-test-out.csv";
  std::filesystem::remove(path);
  const auto r = cli({"classify", sys("sys-c.ts"), "--format", "csv", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == cli({"classify", sys("sys-c.ts"), "--format", "csv"}).out);
  CHECK(cli({"classify", sys("sys-c.ts"), "--out", "/nonexistent-dir/x.csv"}).code == 2);
}

TEST_CASE("simulation agrees with the optimal distribution end to end") {
  const auto dist = parse_csv(cli({"optimal-dist", sys("sys-c.ts"), "--kmax", "6", "--format", "csv"}).out);
  const auto sim = parse_csv(cli({"simulate", sys("sys-c.ts"), "--policy", "optimal", "--samples", "100000",
                                  "--kmax", "6", "--seed", "8", "--format", "csv"})
                                 .out);
  for (int k = 1; k <= 6; ++k) {
    const auto key = std::to_string(k);
    const double exact = dist.at({key, "tail", "X"}).first;
    const auto& [estimate, se] = sim.at({key, "tail", "X"});
    const double null_se = std::sqrt(exact * (1 - exact) / 100000.0);
    CHECK(std::abs(estimate - exact) <= 3 * null_se + 1e-12);
    CHECK_FALSE(se.empty());
  }
}
