#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/fixtures.hpp"
#include "xjoin/bench.hpp"
#include "xjoin/cli.hpp"
#include "xjoin/xml_io.hpp"

using namespace xjoin;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("gen is byte-deterministic and validates") {
  TempDir tmp("xjoin_cli_gen");
  const auto a = tmp.path / "a";
  const auto b = tmp.path / "b";
  const std::vector<std::string> spec{"--dims", "5", "--nodes", "20", "--attrs", "4", "--cells", "300", "--seed", "42"};
  auto args = std::vector<std::string>{"gen", "--out", a.string()};
  args.insert(args.end(), spec.begin(), spec.end());
  REQUIRE(run(args).code == kExitOk);
  args[2] = b.string();
  REQUIRE(run(args).code == kExitOk);
  CHECK(slurp(a / "Dimensions.xml") == slurp(b / "Dimensions.xml"));
  CHECK(slurp(a / "TableFacts.xml") == slurp(b / "TableFacts.xml"));

  const auto check = run({"validate", "--in", a.string()});
  CHECK(check.code == kExitOk);
  CHECK(check.out == "kind,locator,message\n");
}

TEST_CASE("gen with zero cells writes an empty cube") {
  TempDir tmp("xjoin_cli_gen0");
  REQUIRE(run({"gen", "--out", tmp.path.string(), "--cells", "0"}).code == kExitOk);
  CHECK(slurp(tmp.path / "TableFacts.xml") ==
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<CubeFacts>\n  <cube/>\n</CubeFacts>\n");
}

TEST_CASE("index and query over the sales fixture") {
  TempDir tmp("xjoin_cli_index");
  save_warehouse(xjoin::testing::lyon_customers_warehouse(), tmp.path);
  const auto index_file = (tmp.path / "Index.xml").string();

  REQUIRE(run({"index", "--in", tmp.path.string(), "--out", index_file}).code == kExitOk);
  const auto index_text = slurp(index_file);
  CHECK(index_text.find("<dimension id=\"customers\" node=\"c1\">\n        <attribute name=\"cust_city\" value=\"Lyon\"/>") !=
        std::string::npos);

  const std::vector<std::string> q{"--agg", "sum:quantity", "--where", "customers.cust_city=Lyon", "--group-by",
                                   "customers.cust_first_name,customers.cust_postal_code"};
  auto join_args = std::vector<std::string>{"query", "--in", tmp.path.string(), "--path", "join"};
  join_args.insert(join_args.end(), q.begin(), q.end());
  auto index_args = std::vector<std::string>{"query", "--index", index_file};
  index_args.insert(index_args.end(), q.begin(), q.end());
  const auto joined = run(join_args);
  const auto indexed = run(index_args);
  REQUIRE(joined.code == kExitOk);
  REQUIRE(indexed.code == kExitOk);
  CHECK(joined.out == indexed.out);
  CHECK(joined.out ==
        "customers.cust_first_name,customers.cust_postal_code,sum(quantity),row_count\nJean,69001,5,1\nMarie,69001,5,2\n");

  const auto counted = run({"query", "--in", tmp.path.string(), "--agg", "count:quantity"});
  CHECK(counted.out == "count(quantity),row_count\n4,4\n");

  CHECK(run({"query", "--index", index_file, "--agg", "sum:quantity", "--where", "stores.city=Lyon"}).code == kExitData);
  CHECK(run({"query", "--in", tmp.path.string(), "--path", "join", "--agg", "sum:revenue"}).code == kExitData);
  CHECK(run({"query", "--index", index_file, "--path", "join", "--agg", "sum:quantity"}).code == kExitUsage);
  CHECK(run({"query", "--index", index_file, "--agg", "median:quantity"}).code == kExitUsage);
  CHECK(run({"query", "--agg", "sum:quantity"}).code == kExitUsage);
}

TEST_CASE("index of an empty warehouse") {
  TempDir tmp("xjoin_cli_empty");
  save_warehouse(Warehouse{}, tmp.path);
  const auto result = run({"index", "--in", tmp.path.string()});
  CHECK(result.code == kExitOk);
  CHECK(result.out == "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<CubeFacts>\n  <cube/>\n</CubeFacts>\n");
}

TEST_CASE("dangling reference is a data error") {
  TempDir tmp("xjoin_cli_dangling");
  auto w = xjoin::testing::two_cell_warehouse();
  w.cells[1].dimensionRefs[0].nodeId = "c9";
  save_warehouse(w, tmp.path);
  const auto indexed = run({"index", "--in", tmp.path.string()});
  CHECK(indexed.code == kExitData);
  CHECK(indexed.err.find("cell[1].dimension[customers]") != std::string::npos);
  const auto validated = run({"validate", "--in", tmp.path.string()});
  CHECK(validated.code == kExitData);
  CHECK(validated.out.find("unknown-node,cell[1].dimension[customers]") != std::string::npos);
}

TEST_CASE("malformed input and missing files") {
  TempDir tmp("xjoin_cli_bad");
  std::ofstream(tmp.path / "Dimensions.xml") << "<dimensionData><classification/></dimensionData>";
  std::ofstream(tmp.path / "TableFacts.xml") << "<CubeFacts><cube><Cell><Fact id='q' value='abc'/></Cell></cube></CubeFacts>";
  const auto parsed = run({"validate", "--in", tmp.path.string()});
  CHECK(parsed.code == kExitData);
  CHECK(parsed.err.find("abc") != std::string::npos);
  CHECK(run({"validate", "--in", (tmp.path / "missing").string()}).code == kExitIo);
  CHECK(run({"index", "--in", tmp.path.string(), "--out", (tmp.path / "no/such/dir/Index.xml").string()}).code ==
        kExitData);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"gen"}).code == kExitUsage);
  CHECK(run({"gen", "--out", "x", "--cells", "many"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("cost subcommand") {
  const auto result = run({"cost", "--cells", "100,0", "--dims", "5", "--nodes", "50", "--attrs", "10"});
  REQUIRE(result.code == kExitOk);
  CHECK(result.out ==
        "cells,dimensions,nodes_per_dim,attrs_per_node,cost_without_index,cost_with_index,gain\n"
        "100,5,50,10,252500,1500,168.33333333333334\n"
        "0,5,50,10,0,0,\n");

  const auto pair = run({"cost", "--cells", "10,1000000"});
  std::istringstream lines(pair.out);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first.substr(first.rfind(',')) == second.substr(second.rfind(',')));

  TempDir tmp("xjoin_cli_cost");
  REQUIRE(run({"gen", "--out", tmp.path.string(), "--cells", "100"}).code == kExitOk);
  const auto derived = run({"cost", "--in", tmp.path.string()});
  CHECK(derived.out.find("\n100,5,50,10,252500,1500,168.33333333333334\n") != std::string::npos);
  CHECK(run({"cost", "--in", tmp.path.string(), "--dims", "3"}).code == kExitUsage);
}

TEST_CASE("bench subcommand") {
  SUBCASE("one size, one repetition") {
    const auto result = run({"bench", "--cells", "10", "--reps", "1"});
    REQUIRE(result.code == kExitOk);
    std::istringstream lines(result.out);
    std::string header, join_row, index_row, extra;
    std::getline(lines, header);
    std::getline(lines, join_row);
    std::getline(lines, index_row);
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(header == kBenchmarkCsvHeader);
    CHECK(join_row.rfind("10,join,", 0) == 0);
    CHECK(index_row.rfind("10,index,", 0) == 0);
    auto field = [](const std::string& row, int n) {
      std::istringstream s(row);
      std::string f;
      for (int i = 0; i <= n; ++i) {
        std::getline(s, f, ',');
      }
      return f;
    };
    CHECK(field(join_row, 3) == field(index_row, 3));
    CHECK(field(index_row, 4) == "0");
    CHECK(result.err.find("reps=1") != std::string::npos);
  }
  SUBCASE("no sizes gives a header-only report") {
    const auto result = run({"bench", "--reps", "1"});
    CHECK(result.code == kExitOk);
    CHECK(result.out == std::string(kBenchmarkCsvHeader) + "\n");
  }
  SUBCASE("custom query") {
    const auto result = run({"bench", "--cells", "50", "--reps", "1", "--dims", "2", "--agg", "count:quantity",
                             "--group-by", "dim0.attr0_0"});
    CHECK(result.code == kExitOk);
  }
}

TEST_CASE("benchmark report invariants") {
  BenchmarkConfig config;
  config.spec = GenSpec{5, 10, 4, 0, 1, 5};
  config.cellCounts = {0, 10, 200};
  config.repetitions = 3;
  const auto report = run_benchmark(config);
  REQUIRE(report.rows.size() == 6);
  for (std::size_t i = 0; i < report.rows.size(); i += 2) {
    CHECK(report.rows[i].path == ExecutionPath::Join);
    CHECK(report.rows[i + 1].path == ExecutionPath::Index);
    CHECK(report.rows[i].resultChecksum == report.rows[i + 1].resultChecksum);
    CHECK(report.rows[i + 1].joinComparisons == 0);
  }
  const auto again = run_benchmark(config);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(again.rows[i].resultChecksum == report.rows[i].resultChecksum);
    CHECK(again.rows[i].nodeVisits == report.rows[i].nodeVisits);
  }
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
