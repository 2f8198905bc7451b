#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "moran/cli.hpp"
#include "moran/spec_json.hpp"

using moran::Json;

namespace {

const char* kCantor = R"({"b":{"kind":"constant","value":4},"q":{"kind":"constant","value":2}})";
const char* kNoDivide = R"({"b":{"kind":"constant","value":3},"q":{"kind":"constant","value":2}})";

struct Out {
  int code;
  std::string text;
  Json json() const { return Json::parse(text); }
};

Out run(std::vector<std::string> args) {
  std::ostringstream os;
  const int code = moran::cli::run(args, os);
  return {code, os.str()};
}

}  // namespace

TEST(Cli, DimsOnCantor) {
  const auto r = run({"dims", "--inline", kCantor, "--depth", "64"});
  ASSERT_EQ(r.code, 0) << r.text;
  const Json j = r.json();
  EXPECT_EQ(j["tool"], "moran");
  EXPECT_EQ(j["command"], "dims");
  EXPECT_EQ(j["tool_version"], moran::cli::version());
  for (const char* k : {"assouad", "lower", "hausdorff", "packing"}) {
    EXPECT_EQ(j["result"][k]["exact"], "1/2") << k;
    EXPECT_EQ(j["result"][k]["estimate"], 0.5) << k;
  }
}

TEST(Cli, DesignProducesCyclicSpec) {
  const auto r = run({"design", "--gamma", "1/2"});
  ASSERT_EQ(r.code, 0) << r.text;
  const Json j = r.json();
  const Json& res = j["result"];
  EXPECT_EQ(res["params"]["alpha0"], 2);
  EXPECT_EQ(res["params"]["alpha1"], 16);
  EXPECT_EQ(res["params"]["beta"], 64);
  EXPECT_EQ(res["period"], "110");
  const auto spec = moran::moran_from_json(res["spec"]);
  EXPECT_EQ(spec.q.expand(6), (std::vector<std::uint64_t>{16, 16, 2, 16, 16, 2}));
  EXPECT_EQ(spec.b.term(99), 64);
  EXPECT_EQ(res["stages"][1]["n_k"], "3");  // integers travel as decimal strings
  EXPECT_EQ(res["stages"][2]["n_k"], "inf");
  EXPECT_EQ(j["spec_hash"], moran::spec_hash(spec));

  // the envelope feeds straight back into dims
  const auto d = run({"dims", "--inline", r.text, "--depth", "600"});
  ASSERT_EQ(d.code, 0) << d.text;
  for (const char* k : {"assouad", "lower", "hausdorff", "packing"}) EXPECT_EQ(d.json()["result"][k]["exact"], "1/2");
}

TEST(Cli, SpectralReports) {
  auto r = run({"spectral", "--inline", kCantor, "--level", "2"});
  ASSERT_EQ(r.code, 0) << r.text;
  auto j = r.json();
  EXPECT_EQ(j["result"]["basis"], true);
  EXPECT_LT(j["result"]["max_offdiag"].get<double>(), 1e-10);
  r = run({"spectral", "--inline", kNoDivide, "--level", "1"});
  ASSERT_EQ(r.code, 0) << r.text;
  j = r.json();
  EXPECT_EQ(j["result"]["basis"], false);
  EXPECT_EQ(j["result"]["condition"]["first_violation"], "1");
}

TEST(Cli, InterleaveSummary) {
  const auto r = run({"interleave", "--targets", "0.2,0.4,0.6,0.8", "--super-blocks", "3"});
  ASSERT_EQ(r.code, 0) << r.text;
  const Json j = r.json();
  EXPECT_EQ(j["result"]["params"]["beta"], 32);
  EXPECT_EQ(j["result"]["schedule_invariants"], true);
  EXPECT_EQ(j["result"]["schedule"]["blocks"].size(), 12u);
}

TEST(Cli, CsvTrace) {
  const auto r = run({"dims", "--inline", kCantor, "--depth", "64", "--format", "csv", "--report", "assouad"});
  ASSERT_EQ(r.code, 0) << r.text;
  EXPECT_EQ(r.text.rfind("N,value\n", 0), 0u) << r.text;
  EXPECT_EQ(std::count(r.text.begin(), r.text.end(), '\n'), 17);
  const auto bad = run({"spectral", "--inline", kCantor, "--format", "csv"});
  EXPECT_EQ(bad.code, 1);
}

TEST(Cli, Errors) {
  auto r = run({});
  EXPECT_EQ(r.code, 1);
  r = run({"dims", "--inline", R"({"b":{"kind":"constant","value":2},"q":{"kind":"constant","value":2}})"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.json()["error"]["code"], "invalid_spec");
  r = run({"dims", "--inline", "{not json"});
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(r.json().contains("error"));
  r = run({"design", "--gamma", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.json()["error"]["code"], "no_parameters");
  r = run({"dims", "--inline", kCantor, "--format", "xml"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, Deterministic) {
  const std::vector<std::string> args{"oracle", "--inline", kCantor, "--depth", "8", "--samples", "10"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.text;
  EXPECT_EQ(a.text, b.text);
  const auto c = run({"oracle", "--inline", kCantor, "--depth", "8", "--samples", "10", "--seed", "5"});
  EXPECT_EQ(c.json()["seed"], 5);
}

TEST(Cli, EnvironmentSuppliesDefaults) {
  ::setenv("MORAN_SEED", "12345", 1);
  ::setenv("MORAN_DEPTH", "40", 1);
  auto r = run({"dims", "--inline", kCantor});
  ASSERT_EQ(r.code, 0) << r.text;
  EXPECT_EQ(r.json()["seed"], 12345);
  EXPECT_EQ(r.json()["result"]["depth"], "40");
  // flags win over the environment
  r = run({"dims", "--inline", kCantor, "--depth", "50"});
  EXPECT_EQ(r.json()["result"]["depth"], "50");
  ::unsetenv("MORAN_SEED");
  ::unsetenv("MORAN_DEPTH");
}

TEST(Cli, WritesOutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "moran_cli_test.json";
  std::filesystem::remove(path);
  const auto r = run({"dims", "--inline", kCantor, "--depth", "16", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.text;
  std::ifstream in(path);
  const Json j = Json::parse(in);
  EXPECT_EQ(j["command"], "dims");
  std::filesystem::remove(path);
}

TEST(Cli, Validate) {
  // four b-levels leave the finite-scale constant visible: 0.625 > 0.5 + 0.05
  auto r = run({"validate", "--inline", kCantor, "--depth", "40"});
  EXPECT_EQ(r.code, 3) << r.text;
  EXPECT_EQ(r.json()["result"]["passed"], false);
  r = run({"validate", "--inline", kCantor, "--depth", "40", "--min-gap", "10"});
  EXPECT_EQ(r.code, 0) << r.text;
  for (const auto& c : r.json()["result"]["checks"]) EXPECT_NE(c["status"], "fail") << c["name"];
}
