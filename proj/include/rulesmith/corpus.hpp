#pragma once

// On-disk corpora and scenario sets.
//
//   <dir>/bias.bias                 shared bias (optional)
//   <dir>/manifest.tsv              generator bookkeeping (optional)
//   <dir>/<subset-id>/bk.bk
//   <dir>/<subset-id>/exs.exs
//   <dir>/<subset-id>/meta          `key: value` lines
//   <dir>/<subset-id>/attempt-<n>/  optional per-attempt overrides
//
// A scenario set has the same per-directory files; its meta may carry a
// `tags:` line with comma-separated labels.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rulesmith/eval.hpp"
#include "rulesmith/pipeline.hpp"
#include "rulesmith/synth.hpp"

namespace rulesmith::corpus {

namespace fs = std::filesystem;

using Meta = std::map<std::string, std::string>;

/// Throws ParseError on a line without `:`. Blank and `%` lines are skipped.
Meta parse_meta(std::string_view text);
std::string print_meta(const Meta& meta);

/// Reads a whole file; throws ingest::IoError when it cannot be opened.
std::string read_file(const fs::path& p);
/// Creates parent directories; throws ingest::IoError on failure.
void write_file(const fs::path& p, const std::string& text);

/// Writes every subset plus bias.bias and manifest.tsv. Existing files are
/// overwritten.
void write_corpus(const fs::path& dir, const synth::Corpus& corpus, const BiasSpec& bias);

/// Subset directories in name order. Bundle files are read lazily by each
/// source's attempt hook: attempt-<n>/ if present, else the subset's own
/// files, else attempt-1/. Meta must carry a valid `timestamp:`.
std::vector<pipeline::SubsetSource> load_corpus(const fs::path& dir);

/// `<dir>/bias.bias` parsed; throws ingest::IoError if absent.
BiasSpec load_bias(const fs::path& file);

struct ManifestRow {
  std::string id;
  std::string violation;
  std::string nominal;
  std::string timestamp;
  std::size_t planted_rule = 0;  // 1-based
  std::string corruption;
};

std::vector<ManifestRow> read_manifest(const fs::path& dir);

void write_scenarios(const fs::path& dir, const std::vector<eval::Scenario>& scenarios);
/// Scenario directories in name order; files are parsed eagerly.
std::vector<eval::Scenario> load_scenarios(const fs::path& dir);

}  // namespace rulesmith::corpus
