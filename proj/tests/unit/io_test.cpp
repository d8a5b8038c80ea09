#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <random>

#include "fscap/error.hpp"
#include "fscap/io.hpp"
#include "oracles.hpp"

using namespace fscap;
using nlohmann::json;

TEST(IoChannel, RoundTrip) {
  for (const auto& c : {make_trapdoor(), make_bsc_rll({0.125}), make_dec({0.5})}) EXPECT_EQ(io::channel_from_json(io::to_json(c)), c);
}

TEST(IoChannel, AdmissibleDefaultsToAllInputs) {
  auto j = json::parse(io::to_json(make_trapdoor()));
  j.erase("admissible");
  EXPECT_EQ(io::channel_from_json(j.dump()).admissible, make_trapdoor().admissible);
}

TEST(IoChannel, RejectsInvalid) {
  EXPECT_THROW(io::channel_from_json("{"), InvalidArgument);
  EXPECT_THROW(io::channel_from_json("{\"states\": 2}"), InvalidArgument);
  auto j = json::parse(io::to_json(make_trapdoor()));
  j["kernel"][0][0] = {0.5, 0.6};
  EXPECT_THROW(io::channel_from_json(j.dump()), InvalidArgument);
  j = json::parse(io::to_json(make_trapdoor()));
  j["states"] = "two";
  EXPECT_THROW(io::channel_from_json(j.dump()), InvalidArgument);
}

TEST(IoTransformed, DecodeAnnex) {
  const auto tc = transform(make_bsc_rll({0.1}), 3);
  const auto j = json::parse(io::to_json(tc));
  EXPECT_EQ(j["delay"], 3);
  ASSERT_EQ(j["decode"].size(), tc.channel.state_count);
  for (std::size_t i = 0; i < tc.channel.state_count; ++i) {
    EXPECT_EQ(j["decode"][i]["state"].get<int>(), tc.states[i].base_state);
    EXPECT_EQ(j["decode"][i]["history"].get<std::vector<int>>(), tc.states[i].history);
  }
  // The channel part reads back as a plain channel.
  EXPECT_EQ(io::channel_from_json(j.dump()).kernel, tc.channel.kernel);
}

TEST(IoQGraph, RoundTripAndSchema) {
  const auto g = appendix_c_qgraph();
  EXPECT_EQ(io::qgraph_from_json(io::to_json(g)), g);
  const auto j = json::parse(io::to_json(markov_qgraph(1, 2)));
  EXPECT_EQ(j["phi"], json::parse("[[0,1],[0,1]]"));
  EXPECT_THROW(io::qgraph_from_json("{\"nodes\":2,\"outputs\":2,\"phi\":[[0,0],[1,1]]}"), InvalidArgument);
  EXPECT_THROW(io::qgraph_from_json("{\"nodes\":2,\"outputs\":2,\"phi\":[[0,1]]}"), InvalidArgument);
}

TEST(IoPolicy, RoundTrip) {
  std::mt19937_64 rng(1);
  const auto tc = transform(make_dec({0.2}), 2);
  const auto g = markov_qgraph(1, 4);
  const auto p = oracle::random_policy(tc.channel, g, rng);
  EXPECT_EQ(io::policy_from_json(io::to_json(p)), p);
}

TEST(IoTest, RoundTrip) {
  const auto t = make_test_distribution(2, 2, {0.25, 0.75, 1.0, 0.0});
  const auto back = io::test_distribution_from_json(io::to_json(t));
  EXPECT_EQ(back.prob, t.prob);
  EXPECT_THROW(io::test_distribution_from_json("{\"nodes\":1,\"outputs\":2,\"prob\":[[0.5,0.6]]}"), InvalidArgument);
}

TEST(IoCertificate, KeysAndRoundTrip) {
  const auto b = trapdoor_certificate();
  const auto j = json::parse(io::to_json(b.certificate, b.graph.node_count));
  EXPECT_TRUE(j.contains("rho"));
  EXPECT_EQ(j["h"]["(0,1)"], 1.0);
  EXPECT_EQ(j["support"].size(), 8u);
  const auto back = io::certificate_from_json(j.dump(), b.channel.channel.state_count, b.graph.node_count);
  EXPECT_EQ(back.h, b.certificate.h);
  EXPECT_EQ(back.support, b.certificate.support);
  EXPECT_THROW(io::certificate_from_json("{\"rho\":0,\"h\":{\"(9,9)\":0}}", 4, 2), InvalidArgument);
  EXPECT_THROW(io::certificate_from_json("{\"rho\":0,\"h\":{\"0,1\":0}}", 4, 2), InvalidArgument);
}

TEST(IoBundle, RoundTripVerifies) {
  const auto b = dec_certificate(0.3);
  const auto back = io::bundle_from_json(io::to_json(b));
  EXPECT_EQ(back.channel.channel, b.channel.channel);
  EXPECT_EQ(back.graph, b.graph);
  EXPECT_EQ(back.certificate.support, b.certificate.support);
  EXPECT_TRUE(verify_certificate(back.channel.channel, back.graph, back.test, back.certificate, 1e-8).passed);
}

TEST(IoBundle, NamedParts) {
  const auto b = trapdoor_certificate();
  auto j = json::parse(io::to_json(b));
  j["channel"] = "trapdoor";
  j["qgraph"] = "markov:k=1";
  const auto back = io::bundle_from_json(j.dump());
  EXPECT_TRUE(verify_certificate(back.channel.channel, back.graph, back.test, back.certificate, 1e-12).passed);
}

TEST(IoReport, BoundReportFields) {
  const auto enc = trapdoor_encoder();
  const auto r = lower_bound(enc.channel, enc.graph, enc.policy);
  const auto j = json::parse(io::to_json(r));
  for (const char* key : {"channel", "delay", "qgraph", "kind", "value", "value_text", "policy", "residuals", "diagnostics"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["kind"], "lower");
  EXPECT_EQ(j["value_text"], "0.5849625007");
  EXPECT_FALSE(j.contains("ci_half_width"));
}

TEST(IoReport, FormatValue) {
  EXPECT_EQ(io::format_value(std::log2(1.5)), "0.5849625007");
  EXPECT_EQ(io::format_value(0.5), "0.5");
  EXPECT_EQ(io::format_value(1234567.891234), "1234567.891");
}

TEST(IoFile, WriteThenRead) {
  const auto path = (std::filesystem::temp_directory_path() / "fscap_io_test.json").string();
  io::write_file(path, io::to_json(make_trapdoor()));
  EXPECT_EQ(io::channel_from_json(io::read_file(path)), make_trapdoor());
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_file(path), InvalidArgument);
}
