#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "fscap/app/manifest.hpp"
#include "fscap/app/methods.hpp"
#include "fscap/app/sweep.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"

using namespace fscap;
using namespace fscap::app;

namespace {

// CSV text with the runtime_ms column blanked out.
std::string without_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() < 7) return "short row: " + line;
    cells[5].clear();
    for (const auto& c : cells) out << c << ',';
    out << '\n';
  }
  return out.str();
}

SweepSpec small_spec() {
  SweepSpec s;
  s.channel = "dec";
  s.delay = 2;
  s.grid = {0.2, 0.5, 0.8};
  s.methods = {"dec-fb", "analytic-thm", "qgraph-ub-markov1", "dual-ub-appendixC"};
  s.qgraph = "markov1";
  s.random_starts = 2;
  return s;
}

}  // namespace

TEST(ParseMethod, Forms) {
  auto m = parse_method("qgraph-ub-markov3-d2", "markov1", 1);
  EXPECT_EQ(m.kind, "qgraph-ub");
  EXPECT_EQ(m.graph, "markov:k=3");
  EXPECT_EQ(m.delay, 2);
  EXPECT_EQ(parse_method("qgraph-ub", "markov2", 1).graph, "markov:k=2");
  m = parse_method("bcjr-lb", "appendixA", 2);
  EXPECT_EQ(m.kind, "bcjr-lb");
  EXPECT_EQ(m.graph, "appendixA");
  EXPECT_EQ(m.delay, 2);
  m = parse_method("dual-ub-appendixC-d3", "markov1", 1);
  EXPECT_EQ(m.graph, "appendixC");
  EXPECT_EQ(m.delay, 3);
  EXPECT_EQ(parse_method("dec-fb", "", 2).kind, "dec-fb");
  EXPECT_THROW(parse_method("lower-ub", "markov1", 1), InvalidArgument);
  EXPECT_THROW(parse_method("qgraph-ub-d0", "markov1", 1), InvalidArgument);
  EXPECT_THROW(parse_method("qgraph-ub-hexagon", "markov1", 1), InvalidArgument);
}

TEST(ParseGrid, RangesAndLists) {
  const auto g = parse_grid("0.1:0.5:0.1");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_NEAR(g.back(), 0.5, 1e-12);
  EXPECT_EQ(parse_grid("0.3,0.1,0.2"), (std::vector<double>{0.3, 0.1, 0.2}));
  EXPECT_EQ(parse_grid("0.01:0.99:0.01").size(), 99u);
  EXPECT_THROW(parse_grid("0.1:0.5:0"), InvalidArgument);
  EXPECT_THROW(parse_grid("a,b"), InvalidArgument);
  EXPECT_TRUE(parse_grid("").empty());
}

TEST(Validate, RejectsBrokenSpecs) {
  EXPECT_NO_THROW(validate(small_spec()));
  auto s = small_spec();
  s.grid.clear();
  EXPECT_THROW(validate(s), InvalidArgument);
  s = small_spec();
  s.grid = {0.5, 0.2};
  EXPECT_THROW(validate(s), InvalidArgument);
  s = small_spec();
  s.methods.clear();
  EXPECT_THROW(validate(s), InvalidArgument);
  s = small_spec();
  s.channel = "awgn";
  EXPECT_THROW(validate(s), InvalidArgument);
  s = small_spec();
  s.delay = 0;
  EXPECT_THROW(validate(s), InvalidArgument);
}

TEST(Sweep, DeterministicUnderFixedSeed) {
  const auto a = run_sweep(small_spec());
  const auto b = run_sweep(small_spec());
  EXPECT_EQ(without_runtime(to_csv(a.rows)), without_runtime(to_csv(b.rows)));
  EXPECT_EQ(to_csv(a.rows).substr(0, to_csv(a.rows).find('\n')), kCsvHeader);
}

TEST(Sweep, GridOrderWithWorkers) {
  auto spec = small_spec();
  const auto serial = run_sweep(spec);
  spec.jobs = 3;
  const auto parallel = run_sweep(spec);
  ASSERT_EQ(parallel.rows.size(), 12u);
  for (std::size_t i = 0; i < parallel.rows.size(); ++i) {
    EXPECT_EQ(parallel.rows[i].param, spec.grid[i / 4]);
    EXPECT_EQ(parallel.rows[i].method, spec.methods[i % 4]);
  }
  EXPECT_EQ(without_runtime(to_csv(serial.rows)), without_runtime(to_csv(parallel.rows)));
}

TEST(Sweep, FailingPointOnlyMarksItsRow) {
  auto spec = small_spec();
  // The DEC theorem bound exists only at p=0.5.
  spec.grid = {0.4, 0.5};
  spec.methods = {"dec-fb", "analytic-thm"};
  const auto r = run_sweep(spec);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].status, "ok");
  EXPECT_EQ(r.rows[1].status.rfind("error: ", 0), 0u);
  EXPECT_EQ(r.rows[2].status, "ok");
  EXPECT_EQ(r.rows[3].status, "ok");
  EXPECT_NEAR(r.rows[3].value, dec_bound().value, 1e-12);
}

TEST(Sweep, CsvFormatting) {
  SweepRow row;
  row.param = 0.5;
  row.method = "dec-fb";
  row.value = 0.67850931838712;
  row.status = "ok";
  const auto csv = to_csv({row});
  EXPECT_NE(csv.find("0.5,dec-fb,0.6785093184,"), std::string::npos);
}

TEST(Sweep, ConfigRoundTrip) {
  const auto spec = small_spec();
  const auto back = sweep_from_json(to_json(spec));
  EXPECT_EQ(back.grid, spec.grid);
  EXPECT_EQ(back.methods, spec.methods);
  EXPECT_EQ(back.channel, spec.channel);
  EXPECT_EQ(sweep_from_json(R"({"channel":"dec","grid":"0.1:0.3:0.1","methods":["dec-fb"]})").grid.size(), 3u);
  EXPECT_THROW(sweep_from_json("{\"grid\": 5}"), InvalidArgument);
}

TEST(Methods, Values) {
  MethodOptions opts;
  opts.random_starts = 2;
  EXPECT_NEAR(evaluate_method("dec", 0.5, parse_method("dec-fb", "", 2), opts).value, 0.6785093184, 1e-9);
  EXPECT_NEAR(evaluate_method("trapdoor", 0.0, parse_method("qgraph-ub-markov1-d2", "", 2), opts).value, std::log2(1.5), 1e-6);
  const auto thm = evaluate_method("dec", 0.5, parse_method("analytic-thm", "", 2), opts);
  EXPECT_EQ(thm.status, "ok");
  EXPECT_LE(thm.residual, 1e-8);
  const auto err = evaluate_method("trapdoor", 0.0, parse_method("dec-fb", "", 2), opts);
  EXPECT_EQ(err.status.rfind("error", 0), 0u);
}

TEST(Manifest, GitBlobHash) {
  EXPECT_EQ(git_blob_hash("hello"), "b6fc4c620b67d95f953a5c1c1230aaab5db5a1b0");
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Manifest, FieldsFromSweep) {
  const auto r = run_sweep(small_spec());
  const auto j = nlohmann::json::parse(to_json(r.manifest));
  EXPECT_EQ(j["tool_version"], tool_version());
  EXPECT_EQ(j["input_hash"], git_blob_hash(r.manifest.config));
  EXPECT_EQ(j["tasks"].size(), 12u);
  EXPECT_EQ(j["seeds"].size(), r.manifest.seeds.size());
  EXPECT_FALSE(r.manifest.seeds.empty());
}
