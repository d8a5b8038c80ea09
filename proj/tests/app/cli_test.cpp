#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fscap/app/cli.hpp"
#include "fscap/app/manifest.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/io.hpp"

using namespace fscap::app;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fscap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(int(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"bound", "upper", "--channel", "trapdoor"}).code, kExitUsage);  // no --qgraph
  EXPECT_EQ(run({"bound", "upper", "--channel", "nosuch", "--qgraph", "markov:k=1"}).code, kExitUsage);
  EXPECT_EQ(run({"reproduce", "no-such-target"}).code, kExitUsage);
  EXPECT_EQ(run({"analytic", "bsc", "--p", "1.5"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--certificate", temp_path("fscap_missing_certificate.json")}).code, kExitUsage);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_NE(v.out.find(tool_version()), std::string::npos);
}

TEST(Cli, BoundUpperAndLower) {
  const auto up = run({"bound", "upper", "--channel", "trapdoor", "--delay", "2", "--qgraph", "appendixA", "--starts", "2"});
  ASSERT_EQ(up.code, kExitOk) << up.err;
  const auto j = json::parse(up.out);
  EXPECT_EQ(j["kind"], "upper");
  EXPECT_NEAR(j["value"].get<double>(), std::log2(1.5), 1e-6);

  const auto policy = temp_path("fscap_cli_policy.json");
  fscap::io::write_file(policy, fscap::io::to_json(fscap::trapdoor_encoder().policy));
  const auto low = run({"bound", "lower", "--channel", "trapdoor", "--delay", "2", "--qgraph", "appendixA", "--policy", policy});
  ASSERT_EQ(low.code, kExitOk) << low.err;
  EXPECT_EQ(json::parse(low.out)["value_text"], "0.5849625007");
  std::filesystem::remove(policy);
}

TEST(Cli, BoundLowerFailsWithoutBcjrPolicy) {
  // Both nodes ignore the output, so no unichain BCJR-invariant policy exists on this graph.
  const auto g = temp_path("fscap_cli_graph.json");
  fscap::io::write_file(g, R"({"nodes":2,"outputs":2,"phi":[[1,1],[0,0]]})");
  const auto fail = run({"bound", "lower", "--channel", "trapdoor", "--delay", "2", "--qgraph", g});
  EXPECT_EQ(fail.code, kExitFailure) << fail.out << fail.err;
  std::filesystem::remove(g);
}

TEST(Cli, VerifyBuiltins) {
  EXPECT_EQ(run({"verify", "--certificate", "builtin:trapdoorA", "--tol", "1e-12"}).code, kExitOk);
  EXPECT_EQ(run({"verify", "--certificate", "builtin:decC"}).code, kExitOk);
  EXPECT_EQ(run({"verify", "--certificate", "builtin:bscB:p=0.2"}).code, kExitOk);
  // Any feasible point certifies its own (larger) bound; infeasible parameters are rejected.
  EXPECT_EQ(run({"verify", "--certificate", "builtin:bscB:p=0.2,a=0.48,b=0.7168,c=0.5199,d=0.6372"}).code, kExitOk);
  EXPECT_EQ(run({"verify", "--certificate", "builtin:bscB:p=0.2,a=0.9,b=0.1,c=0.9,d=0.1"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--certificate", "builtin:nosuch"}).code, kExitUsage);
}

TEST(Cli, VerifyCertificateFile) {
  const auto path = temp_path("fscap_cli_cert.json");
  fscap::io::write_file(path, fscap::io::to_json(fscap::trapdoor_certificate()));
  const auto ok = run({"verify", "--certificate", path, "--tol", "1e-12"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_TRUE(json::parse(ok.out)["passed"].get<bool>());
  auto tampered = json::parse(fscap::io::to_json(fscap::trapdoor_certificate()));
  tampered["rho"] = tampered["rho"].get<double>() + 1e-3;
  fscap::io::write_file(path, tampered.dump());
  const auto bad = run({"verify", "--certificate", path});
  EXPECT_EQ(bad.code, kExitFailure);
  EXPECT_FALSE(json::parse(bad.out)["passed"].get<bool>());
  fscap::io::write_file(path, "{\"rho\": ");
  EXPECT_EQ(run({"verify", "--certificate", path}).code, kExitUsage);
  std::filesystem::remove(path);
}

TEST(Cli, Analytic) {
  const auto fb = run({"analytic", "dec-fb", "--p", "0.5"});
  ASSERT_EQ(fb.code, kExitOk);
  EXPECT_NEAR(json::parse(fb.out)["value"].get<double>(), 0.6785093184, 1e-9);
  const auto dec = run({"analytic", "dec"});
  ASSERT_EQ(dec.code, kExitOk);
  EXPECT_LT(json::parse(dec.out)["value"].get<double>(), 0.6785093184);
  EXPECT_EQ(run({"analytic", "bsc", "--p", "0.1"}).code, kExitOk);
}

TEST(Cli, DualOptimizedTest) {
  const auto r = run({"dual", "--channel", "trapdoor", "--delay", "2", "--qgraph", "markov:k=1", "--test", "optimized"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(json::parse(r.out)["summary"]["rho"].get<double>(), std::log2(1.5), 1e-6);
}

TEST(Cli, SweepWritesCsv) {
  const auto csv = temp_path("fscap_cli_sweep.csv");
  const auto r = run({"sweep", "--channel", "dec", "--grid", "0.2,0.4", "--methods", "dec-fb", "--out", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto text = fscap::io::read_file(csv);
  EXPECT_EQ(text.rfind("param,method,value,residual,iterations,runtime_ms,status", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  std::filesystem::remove(csv);
  EXPECT_EQ(run({"sweep", "--channel", "dec", "--grid", "0.4,0.2", "--methods", "dec-fb"}).code, kExitUsage);
}

TEST(Cli, ReproduceFastTarget) {
  const auto r = run({"reproduce", "trapdoor-cfb2"});
  ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["target"], "trapdoor-cfb2");
}
