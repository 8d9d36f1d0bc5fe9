#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + RULESMITH_CLI + " " + args + " 2>&1";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& rel) { return (support::data_dir() / rel).string(); }

std::string gen(const fs::path& out, int subsets, double corruption, int seed, int scenarios = 0) {
  return "gen --rules " + data("rules/planted.rules") + " --bias " + data("bias/vocabulary.bias") + " --subsets " +
         std::to_string(subsets) + " --corruption " + std::to_string(corruption) + " --seed " + std::to_string(seed) +
         " --out " + out.string() + (scenarios ? " --scenarios " + std::to_string(scenarios) : "");
}

nlohmann::json config_record(const fs::path& report) {
  std::istringstream in(support::slurp(report));
  std::string first;
  std::getline(in, first);
  return nlohmann::json::parse(first);
}

}  // namespace

TEST(Cli, HelpAndUnknownFlags) {
  const CliRun help = cli("learn --help");
  EXPECT_EQ(help.code, 0);
  for (const char* flag : {"--corpus", "--bias", "--rho", "--tau", "--retries", "--seed", "--timeout", "--out",
                           "--validation-attempts", "--max-vars", "--max-body", "--max-clauses"}) {
    EXPECT_NE(help.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(cli("learn --corpus . --bogus").code, 2);
  EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, GenLearnEvalPipeline) {
  support::TempDir dir("cli");
  const fs::path corpus = dir.path() / "c";
  const CliRun g = cli(gen(corpus, 30, 0.1, 3, 10));
  ASSERT_EQ(g.code, 0) << g.out;
  EXPECT_NE(g.out.find("3 corrupted"), std::string::npos) << g.out;
  EXPECT_TRUE(fs::exists(corpus / "manifest.tsv"));

  const CliRun l = cli("learn --corpus " + corpus.string() + " --out " + (dir.path() / "o").string());
  ASSERT_EQ(l.code, 0) << l.out;
  for (const char* f : {"report.txt", "report.jsonl", "final.rules"}) EXPECT_TRUE(fs::exists(dir.path() / "o" / f));

  const CliRun e = cli("eval --rules " + (dir.path() / "o/final.rules").string() + " --scenarios " + corpus.string() +
                    "-scenarios --out " + (dir.path() / "eval.jsonl").string());
  EXPECT_EQ(e.code, 0) << e.out;
  EXPECT_NE(e.out.find("precision 1.000"), std::string::npos) << e.out;
  EXPECT_TRUE(fs::exists(dir.path() / "eval.jsonl"));
}

TEST(Cli, LearnIsByteIdenticalAcrossRuns) {
  support::TempDir dir("cli");
  const fs::path corpus = dir.path() / "c";
  ASSERT_EQ(cli(gen(corpus, 12, 0.25, 8)).code, 0);
  ASSERT_EQ(cli("learn --corpus " + corpus.string() + " --seed 5 --out " + (dir.path() / "a").string()).code, 0);
  ASSERT_EQ(cli("--jobs 1 learn --corpus " + corpus.string() + " --seed 5 --out " + (dir.path() / "b").string()).code, 0);
  for (const char* f : {"report.jsonl", "final.rules", "report.txt"}) {
    EXPECT_EQ(support::slurp(dir.path() / "a" / f), support::slurp(dir.path() / "b" / f)) << f;
  }
}

TEST(Cli, ExitCodes) {
  support::TempDir dir("cli");
  support::spit(dir.path() / "empty/bias.bias", support::slurp(support::data_dir() / "bias/vocabulary.bias"));
  const CliRun empty = cli("learn --corpus " + (dir.path() / "empty").string());
  EXPECT_EQ(empty.code, 1) << empty.out;
  EXPECT_NE(empty.out.find("emptied at level1"), std::string::npos) << empty.out;

  fs::create_directories(dir.path() / "nobias");
  EXPECT_EQ(cli("learn --corpus " + (dir.path() / "nobias").string()).code, 3);
  EXPECT_EQ(cli("learn --corpus " + (dir.path() / "empty").string() + " --rho 2").code, 2);
  EXPECT_EQ(cli("learn --corpus " + (dir.path() / "empty").string() + " --tau 0").code, 2);
  support::spit(dir.path() / "bad.rules", "collision(A,B):- \n");
  EXPECT_EQ(cli("print-rules " + (dir.path() / "bad.rules").string()).code, 2);
}

TEST(Cli, ConfigFileOverlay) {
  support::TempDir dir("cli");
  const fs::path corpus = dir.path() / "c";
  ASSERT_EQ(cli(gen(corpus, 6, 0.0, 2)).code, 0);
  support::spit(dir.path() / "rs.ini", "[learn]\ntau = 1.0\nretries = 2\n");
  const std::string env = "RULESMITH_CONFIG=" + (dir.path() / "rs.ini").string();
  ASSERT_LE(cli("learn --corpus " + corpus.string() + " --out " + (dir.path() / "a").string(), env).code, 1);
  auto j = config_record(dir.path() / "a/report.jsonl");
  EXPECT_DOUBLE_EQ(j.at("tau").get<double>(), 1.0);
  EXPECT_EQ(j.at("max_retries"), 2);
  ASSERT_LE(cli("learn --corpus " + corpus.string() + " --tau 0.5 --out " + (dir.path() / "b").string(), env).code, 1);
  j = config_record(dir.path() / "b/report.jsonl");
  EXPECT_DOUBLE_EQ(j.at("tau").get<double>(), 0.5);

  support::spit(dir.path() / "typo.ini", "[learn]\ntua = 1.0\n");
  EXPECT_EQ(cli("--config " + (dir.path() / "typo.ini").string() + " learn --corpus " + corpus.string()).code, 2);
}

TEST(Cli, TauOneKeepsOnlyMaxSupportRules) {
  support::TempDir dir("cli");
  const fs::path corpus = dir.path() / "c";
  ASSERT_EQ(cli(gen(corpus, 30, 0.0, 1)).code, 0);
  ASSERT_EQ(cli("learn --corpus " + corpus.string() + " --tau 1.0 --out " + (dir.path() / "o").string()).code, 0);
  std::istringstream in(support::slurp(dir.path() / "o/report.jsonl"));
  std::size_t max_support = 0, kept = 0, at_max = 0;
  std::vector<std::pair<std::size_t, bool>> rules;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    if (j.at("record") == "level4") rules.emplace_back(j.at("support").get<std::size_t>(), j.at("kept").get<bool>());
  }
  ASSERT_GT(rules.size(), 1u);
  for (const auto& [s, k] : rules) max_support = std::max(max_support, s);
  for (const auto& [s, k] : rules) {
    kept += k;
    at_max += s == max_support;
    EXPECT_EQ(k, s == max_support);
  }
  EXPECT_EQ(kept, at_max);
}

TEST(Cli, CheckReportsLevelOneAndTwo) {
  const CliRun r = cli("check --corpus " + data("fixtures/retry"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("persists rejected: unknown predicate taxi_speed/2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("recovers accepted on attempt 3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Level 2: 1/1"), std::string::npos) << r.out;
}

TEST(Cli, EvalShippedFixtures) {
  const CliRun hand = cli("eval --rules " + data("rules/hand_engineered.rules") + " --scenarios " + data("scenarios"));
  EXPECT_EQ(hand.code, 0);
  EXPECT_NE(hand.out.find("accuracy  1.000"), std::string::npos) << hand.out;

  support::TempDir dir("cli");
  support::spit(dir.path() / "none.rules", "% nothing\n");
  const CliRun none = cli("eval --rules " + (dir.path() / "none.rules").string() + " --scenarios " + data("scenarios"));
  EXPECT_NE(none.out.find("recall    0.000"), std::string::npos) << none.out;

  const CliRun d = cli("diff --before " + data("rules/hand_engineered.rules") + " --after " + data("rules/planted.rules") +
                    " --scenarios " + data("scenarios"));
  EXPECT_EQ(d.code, 0);
  EXPECT_NE(d.out.find("delta tp -2 fp 0"), std::string::npos) << d.out;
}

TEST(Cli, PrintRulesIsCanonical) {
  support::TempDir dir("cli");
  support::spit(dir.path() / "r.rules", "collision(X,Y):- landing_runway(Y,R),cross_runway(X,R).\n");
  const CliRun r = cli("print-rules " + (dir.path() / "r.rules").string() + " --bias " + data("bias/vocabulary.bias"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "collision(V0,V1):- cross_runway(V0,V2),landing_runway(V1,V2).\n");
}
