#pragma once

// Extraction boundary: source records in, candidate bundle text out.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rulesmith::ingest {

using Timestamp = std::chrono::sys_seconds;

/// "YYYY-MM-DDTHH:MM:SSZ". Returns nullopt on malformed input.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

enum class RecordKind { violation, nominal };

std::string_view to_string(RecordKind k);

struct SourceRecord {
  std::string id;
  RecordKind kind = RecordKind::violation;
  Timestamp timestamp{};
  std::string payload;
};

/// Candidate bundle as produced by an extractor; untrusted until validated.
struct RawBundle {
  std::string background_text;
  std::string examples_text;
  /// Problems noticed while assembling the bundle (e.g. a violation record
  /// that produced negative examples). Validation rejects on any of them.
  std::vector<std::string> issues;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::string name() const = 0;
  virtual bool supports_regeneration() const = 0;
  /// attempt starts at 1. Throws IoError when the record cannot be read.
  virtual RawBundle extract(const SourceRecord& record, int attempt) const = 0;
};

/// Reads `<root>/<record-id>/attempt-<n>/{bk.bk,exs.exs}`, falling back to
/// attempt-1 when the requested attempt is absent. Either file may be
/// missing (treated as empty) but the attempt directory must exist.
class FixtureExtractor final : public Extractor {
 public:
  explicit FixtureExtractor(std::filesystem::path root) : root_(std::move(root)) {}
  std::string name() const override { return "fixture"; }
  bool supports_regeneration() const override { return true; }
  RawBundle extract(const SourceRecord& record, int attempt) const override;

 private:
  std::filesystem::path root_;
};

/// Flags example lines that contradict the record's role: violations must
/// not yield neg(...) and nominals must not yield pos(...).
std::vector<std::string> role_issues(const SourceRecord& record, std::string_view examples_text);

struct RecordPair {
  SourceRecord violation;
  SourceRecord nominal;
};

/// One pair per violation, in violation order. Violations are visited in a
/// seeded permutation and assigned nominals round-robin, so nominal k is
/// used ceil((|violations| - k) / |nominals|) times whatever the seed.
/// Throws std::invalid_argument when either list is empty.
std::vector<RecordPair> pair_subsets(const std::vector<SourceRecord>& violations,
                                     const std::vector<SourceRecord>& nominals, std::uint64_t seed);

/// Subset id for a pair: "<violation-id>__<nominal-id>".
std::string subset_id(const RecordPair& p);

/// Bundle for a pair: both extractions concatenated, with role issues.
RawBundle extract_pair(const Extractor& ex, const RecordPair& p, int attempt);

}  // namespace rulesmith::ingest
