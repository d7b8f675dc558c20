#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cmd_computation.hpp"

using namespace cli;

namespace {

struct Captured {
  int status;
  json report;
  std::string raw;
};

template <class F>
Captured run(F&& f) {
  testing::internal::CaptureStdout();
  int status = f();
  std::string out = testing::internal::GetCapturedStdout();
  return {status, json::parse(out), out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, TreeRankExample) {
  Config c;
  c.width = 4;
  Captured r = run([&] { return tree_rank(c, "fat(S(3))"); });
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.report["schema"], kSchemaVersion);
  EXPECT_EQ(r.report["rank"], "3");
  EXPECT_EQ(r.report["truncation_rank"], 3);
}

TEST(Cli, GraphRoundtripExample) {
  Captured r = run([] { return graph_roundtrip(Config{}, "{1,4};{0}"); });
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.report["pass"].get<bool>());
  EXPECT_EQ(r.report["decoded"]["sets"], json::parse("[[0],[1,4]]"));
}

TEST(Cli, RandomRunExample) {
  Config c;
  c.stages = 50;
  Captured r = run([&] { return random_run(c, "default", "", true); });
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.report["pass"].get<bool>());
  for (const auto& run : r.report["runs"]) {
    EXPECT_TRUE(run["ledger_exact"].get<bool>());
    // measures are exact dyadics
    EXPECT_NE(run["measure"].get<std::string>().find("/2^"), std::string::npos);
  }
}

TEST(Cli, SameConfigSameBytes) {
  Config c;
  c.seed = 5;
  c.stages = 40;
  auto a = run([&] { return random_run(c, "default", "", true); });
  auto b = run([&] { return random_run(c, "default", "", true); });
  EXPECT_EQ(a.raw, b.raw);
  auto x = run([&] { return linord_sample(c, "pow(w*)", 10); });
  auto y = run([&] { return linord_sample(c, "pow(w*)", 10); });
  EXPECT_EQ(x.raw, y.raw);
  c.seed = 6;
  auto z = run([&] { return linord_sample(c, "pow(w*)", 10); });
  EXPECT_NE(x.raw, z.raw);
}

TEST(Cli, FailingCheckExitsNonzero) {
  Config c;
  Captured r = run([&] { return linord_density(c, "chain(1)", 20); });
  EXPECT_EQ(r.status, 1);
  EXPECT_FALSE(r.report["pass"].get<bool>());
  EXPECT_TRUE(r.report.contains("first_failure"));
}

TEST(Cli, StarvedRecoveryLeavesEdgesUnresolved) {
  Config c;
  c.stages = 4;
  Captured r = run([&] { return recover_cmd(c, "3:0-1", "1", true); });
  EXPECT_EQ(r.status, 0);
  EXPECT_FALSE(r.report["complete"].get<bool>());
  EXPECT_EQ(r.report["edges"], json::array());
  EXPECT_EQ(r.report["unresolved"].size(), 6u);
  Captured full = run([&] { return recover_cmd(Config{}, "3:0-1", "1", false); });
  EXPECT_EQ(full.report["edges"], json::parse("[[0,1]]"));
}

TEST(Cli, ManifestFromSuiteDir) {
  auto dir = std::filesystem::temp_directory_path() / "spectra_cli_test_suites";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "tiny.json") << R"({"schema": 1, "programs": [{"name": "count", "code": "OUT r1; INC r1; JMP 0"}],
                                          "base": [1, 2], "budget": 100})";
  setenv(kSuiteDirEnv, dir.c_str(), 1);
  Manifest m = load_manifest("tiny.json", "pairs-demo");
  unsetenv(kSuiteDirEnv);
  EXPECT_EQ(m.name, "tiny");
  EXPECT_EQ(m.suite->size(), 3u);
  EXPECT_EQ(m.suite->entry(2).name, "count");
  EXPECT_EQ(m.base, (FiniteSet{1, 2}));
  EXPECT_EQ(m.budget, 100u);
  EXPECT_EQ(load_manifest("", "pairs-demo").suite->size(), 4u);
}

TEST(Cli, Errors) {
  EXPECT_THROW(load_manifest("no/such/manifest.json", "pairs-demo"), UsageError);
  EXPECT_THROW(load_manifest(temp_file("spectra_bad.json", "{").string(), ""), UsageError);
  EXPECT_THROW(load_manifest(temp_file("spectra_bad2.json", R"({"programs": [{"name": "x", "code": "FROB"}]})").string(), ""),
               UsageError);
  EXPECT_THROW(load_manifest(temp_file("spectra_bad3.json", R"({"schema": 2})").string(), ""), UsageError);
  EXPECT_THROW(parse_set("{1,x}"), UsageError);
  EXPECT_THROW(parse_graph("3:0-3"), UsageError);
  EXPECT_THROW(parse_graph("3:0-0"), UsageError);
  EXPECT_THROW(parse_graph("x:0-1"), UsageError);
  EXPECT_THROW(parse_bounds("4"), UsageError);
  EXPECT_THROW(parse_format("yaml"), UsageError);
  EXPECT_THROW(tree_term("fat(S(3)"), UsageError);
  EXPECT_THROW(check_cmd(Config{}, "12", false), UsageError);
  EXPECT_THROW(pair_theta(Config{}, 2, 0, std::nullopt, false), UsageError);
  EXPECT_THROW(pair_theta(Config{}, 1, 0, 1, false), UsageError);
}

TEST(Cli, Syntax) {
  EXPECT_EQ(parse_set("{}"), FiniteSet{});
  EXPECT_EQ(parse_set("3, 1"), (FiniteSet{1, 3}));
  EXPECT_EQ(parse_family("{1,4};{0};{}").size(), 3u);
  spectra::Graph g = parse_graph("4:0-1,2-3");
  EXPECT_EQ(g.vertices, 4u);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(parse_graph("2").edges.size(), 0u);
  spectra::WehnerBounds b = parse_bounds("3,5,7");
  EXPECT_EQ(b.e_bound, 3u);
  EXPECT_EQ(b.s0_bound, 7u);
}

TEST(Cli, TextFormatFlattens) {
  std::ostringstream out;
  write_text(out, json::parse(R"({"a": 1, "b": {"c": "x", "d": [1, 2]}, "e": [{"f": true}]})"), "");
  EXPECT_EQ(out.str(), "a: 1\nb.c: x\nb.d: [1,2]\ne[0].f: true\n");
}
