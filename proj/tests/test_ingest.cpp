#include <gtest/gtest.h>

#include <ctime>
#include <map>
#include <random>

#include "rulesmith/ingest.hpp"
#include "support.hpp"

using namespace rulesmith;
using namespace rulesmith::ingest;

namespace {

SourceRecord record(std::string id, RecordKind kind) { return {std::move(id), kind, {}, {}}; }

std::vector<SourceRecord> records(std::size_t n, RecordKind kind, char tag) {
  std::vector<SourceRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(record(std::string(1, tag) + std::to_string(i), kind));
  return out;
}

}  // namespace

TEST(Timestamp, MatchesTimegm) {
  std::mt19937 gen(17);
  for (int i = 0; i < 2000; ++i) {
    std::tm tm{};
    tm.tm_year = std::uniform_int_distribution(70, 199)(gen);
    tm.tm_mon = std::uniform_int_distribution(0, 11)(gen);
    tm.tm_mday = std::uniform_int_distribution(1, 28)(gen);
    tm.tm_hour = std::uniform_int_distribution(0, 23)(gen);
    tm.tm_min = std::uniform_int_distribution(0, 59)(gen);
    tm.tm_sec = std::uniform_int_distribution(0, 59)(gen);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    const auto t = parse_timestamp(buf);
    ASSERT_TRUE(t) << buf;
    EXPECT_EQ(t->time_since_epoch().count(), ::timegm(&tm)) << buf;
    EXPECT_EQ(format_timestamp(*t), buf);
  }
}

TEST(Timestamp, RejectsMalformed) {
  for (const char* bad : {"", "2024-01-01", "2024-01-01T00:00:00", "2024-13-01T00:00:00Z", "2023-02-29T00:00:00Z",
                          "2024-01-01T24:00:00Z", "2024-01-01T00:60:00Z", "2024-01-0xT00:00:00Z",
                          "2024/01/01T00:00:00Z"}) {
    EXPECT_FALSE(parse_timestamp(bad)) << bad;
  }
  EXPECT_TRUE(parse_timestamp("2024-02-29T23:59:59Z"));
}

TEST(FixtureExtractor, FallsBackToFirstAttempt) {
  support::TempDir dir("fixture");
  support::spit(dir.path() / "v1/attempt-1/bk.bk", "landing_runway(a1,r1).\ncross_runway(a2,r1).\n");
  support::spit(dir.path() / "v1/attempt-1/exs.exs", "pos(collision(a2,a1)).\n");
  const FixtureExtractor ex(dir.path());
  const auto r = record("v1", RecordKind::violation);
  const RawBundle a1 = ex.extract(r, 1);
  const RawBundle a2 = ex.extract(r, 2);
  EXPECT_EQ(a1.background_text, a2.background_text);
  EXPECT_EQ(a1.examples_text, a2.examples_text);
  EXPECT_TRUE(a1.issues.empty());
  EXPECT_NE(a1.background_text.find("cross_runway"), std::string::npos);
}

TEST(FixtureExtractor, PrefersRequestedAttempt) {
  support::TempDir dir("fixture");
  support::spit(dir.path() / "v1/attempt-1/bk.bk", "bad\n");
  support::spit(dir.path() / "v1/attempt-2/bk.bk", "landing_runway(a1,r1).\n");
  const FixtureExtractor ex(dir.path());
  EXPECT_EQ(ex.extract(record("v1", RecordKind::violation), 2).background_text, "landing_runway(a1,r1).\n");
  EXPECT_EQ(ex.extract(record("v1", RecordKind::violation), 1).background_text, "bad\n");
}

TEST(FixtureExtractor, MissingFixtureIsIoError) {
  support::TempDir dir("fixture");
  const FixtureExtractor ex(dir.path());
  EXPECT_THROW(ex.extract(record("nowhere", RecordKind::nominal), 1), IoError);
}

TEST(RoleIssues, FlagsWrongPolarity) {
  const std::string exs = "pos(collision(a,b)).\n% neg(collision(b,a)). is a comment\nneg(collision(b,a)).\n";
  EXPECT_EQ(role_issues(record("v", RecordKind::violation), exs).size(), 1u);
  EXPECT_EQ(role_issues(record("n", RecordKind::nominal), exs).size(), 1u);
  EXPECT_TRUE(role_issues(record("v", RecordKind::violation), "pos(collision(a,b)).\n").empty());
  EXPECT_TRUE(role_issues(record("n", RecordKind::nominal), "neg(collision(a,b)).\n").empty());
}

TEST(ExtractPair, ConcatenatesAndCollectsIssues) {
  support::TempDir dir("fixture");
  support::spit(dir.path() / "v1/attempt-1/bk.bk", "landing_runway(a1,r1).");
  support::spit(dir.path() / "v1/attempt-1/exs.exs", "pos(collision(a2,a1)).");
  support::spit(dir.path() / "n1/attempt-1/bk.bk", "on_taxiway(b1).\n");
  support::spit(dir.path() / "n1/attempt-1/exs.exs", "pos(collision(b1,b2)).\n");
  const FixtureExtractor ex(dir.path());
  const RawBundle b = extract_pair(ex, {record("v1", RecordKind::violation), record("n1", RecordKind::nominal)}, 1);
  EXPECT_EQ(b.background_text, "landing_runway(a1,r1).\non_taxiway(b1).\n");
  EXPECT_EQ(b.examples_text, "pos(collision(a2,a1)).\npos(collision(b1,b2)).\n");
  EXPECT_EQ(b.issues.size(), 1u);
}

TEST(PairSubsets, ThreeViolationsTwoNominalsReuseFirstNominalOnce) {
  const auto v = records(3, RecordKind::violation, 'v');
  const auto n = records(2, RecordKind::nominal, 'n');
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pairs = pair_subsets(v, n, seed);
    ASSERT_EQ(pairs.size(), 3u);
    std::map<std::string, int> uses;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(pairs[i].violation.id, v[i].id);
      ++uses[pairs[i].nominal.id];
    }
    EXPECT_EQ(uses["n0"], 2);
    EXPECT_EQ(uses["n1"], 1);
  }
}

TEST(PairSubsets, UsageCountsAreRoundRobin) {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nv = std::uniform_int_distribution<std::size_t>(1, 40)(gen);
    const std::size_t nn = std::uniform_int_distribution<std::size_t>(1, 15)(gen);
    const auto pairs = pair_subsets(records(nv, RecordKind::violation, 'v'), records(nn, RecordKind::nominal, 'n'),
                                    static_cast<std::uint64_t>(trial));
    ASSERT_EQ(pairs.size(), nv);
    std::map<std::string, std::size_t> uses;
    for (const auto& p : pairs) ++uses[p.nominal.id];
    for (std::size_t k = 0; k < nn; ++k) {
      const std::size_t expected = k < nv ? (nv - k + nn - 1) / nn : 0;
      EXPECT_EQ(uses["n" + std::to_string(k)], expected);
    }
  }
}

TEST(PairSubsets, DeterministicInSeed) {
  const auto v = records(30, RecordKind::violation, 'v');
  const auto n = records(30, RecordKind::nominal, 'n');
  auto ids = [&](std::uint64_t seed) {
    std::vector<std::string> out;
    for (const auto& p : pair_subsets(v, n, seed)) out.push_back(subset_id(p));
    return out;
  };
  EXPECT_EQ(ids(9), ids(9));
  EXPECT_NE(ids(9), ids(10));
}

TEST(PairSubsets, PaperScaleIsOneToOne) {
  const auto pairs =
      pair_subsets(records(300, RecordKind::violation, 'v'), records(300, RecordKind::nominal, 'n'), 1);
  ASSERT_EQ(pairs.size(), 300u);
  std::set<std::string> nominals;
  for (const auto& p : pairs) nominals.insert(p.nominal.id);
  EXPECT_EQ(nominals.size(), 300u);
}

TEST(PairSubsets, EmptyInputsThrow) {
  EXPECT_THROW(pair_subsets({}, records(2, RecordKind::nominal, 'n'), 0), std::invalid_argument);
  EXPECT_THROW(pair_subsets(records(2, RecordKind::violation, 'v'), {}, 0), std::invalid_argument);
}

TEST(PairSubsets, SubsetIdJoinsRecordIds) {
  EXPECT_EQ(subset_id({record("v007", RecordKind::violation), record("n003", RecordKind::nominal)}), "v007__n003");
}
