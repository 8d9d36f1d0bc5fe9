#include "rulesmith/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rulesmith/text_format.hpp"

namespace rulesmith::corpus {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<fs::path> subdirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ingest::IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Meta parse_meta(std::string_view text) {
  Meta m;
  std::size_t line = 0;
  std::istringstream in{std::string(text)};
  for (std::string l; std::getline(in, l);) {
    ++line;
    const std::string t = trim(l);
    if (t.empty() || t[0] == '%') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(line, "expected `key: value`");
    m[trim(std::string_view(t).substr(0, colon))] = trim(std::string_view(t).substr(colon + 1));
  }
  return m;
}

std::string print_meta(const Meta& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += k + ": " + v + "\n";
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ingest::IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw ingest::IoError("cannot write " + p.string());
}

void write_corpus(const fs::path& dir, const synth::Corpus& corpus, const BiasSpec& bias) {
  write_file(dir / "bias.bias", print_bias(bias));
  std::string manifest = "id\tviolation\tnominal\ttimestamp\tplanted_rule\tcorruption\n";
  for (const auto& s : corpus.subsets) {
    const fs::path sub = dir / s.id;
    write_file(sub / "bk.bk", s.background_text);
    write_file(sub / "exs.exs", s.examples_text);
    const std::string ts = ingest::format_timestamp(s.records.violation.timestamp);
    write_file(sub / "meta", print_meta({{"timestamp", ts},
                                         {"violation", s.records.violation.id},
                                         {"nominal", s.records.nominal.id}}));
    manifest += s.id + "\t" + s.records.violation.id + "\t" + s.records.nominal.id + "\t" + ts + "\t" +
                std::to_string(s.planted_rule + 1) + "\t" + std::string(synth::to_string(s.corruption)) + "\n";
  }
  write_file(dir / "manifest.tsv", manifest);
}

std::vector<pipeline::SubsetSource> load_corpus(const fs::path& dir) {
  std::vector<pipeline::SubsetSource> out;
  for (const auto& sub : subdirs(dir)) {
    const Meta meta = parse_meta(read_file(sub / "meta"));
    pipeline::SubsetSource s;
    s.id = sub.filename().string();
    const auto ts = meta.find("timestamp");
    if (ts == meta.end()) throw ingest::IoError(s.id + ": meta has no timestamp");
    const auto t = ingest::parse_timestamp(ts->second);
    if (!t) throw ingest::IoError(s.id + ": bad timestamp " + ts->second);
    s.timestamp = *t;
    if (auto it = meta.find("violation"); it != meta.end()) s.violation_id = it->second;
    if (auto it = meta.find("nominal"); it != meta.end()) s.nominal_id = it->second;
    s.attempt = [sub](int n) {
      fs::path from = sub / ("attempt-" + std::to_string(n));
      if (!fs::is_directory(from)) from = fs::exists(sub / "bk.bk") ? sub : sub / "attempt-1";
      return ingest::RawBundle{read_file(from / "bk.bk"), read_file(from / "exs.exs"), {}};
    };
    out.push_back(std::move(s));
  }
  return out;
}

BiasSpec load_bias(const fs::path& file) { return parse_bias(read_file(file)); }

std::vector<ManifestRow> read_manifest(const fs::path& dir) {
  std::vector<ManifestRow> out;
  std::istringstream in(read_file(dir / "manifest.tsv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cols(line);
    for (std::string c; std::getline(cols, c, '\t');) f.push_back(c);
    if (f.size() != 6) throw ingest::IoError("malformed manifest row: " + line);
    out.push_back({f[0], f[1], f[2], f[3], static_cast<std::size_t>(std::stoul(f[4])), f[5]});
  }
  return out;
}

void write_scenarios(const fs::path& dir, const std::vector<eval::Scenario>& scenarios) {
  for (const auto& s : scenarios) {
    std::string tags;
    for (const auto& t : s.tags) tags += (tags.empty() ? "" : ", ") + t;
    write_file(dir / s.id / "bk.bk", print_program(s.background));
    write_file(dir / s.id / "exs.exs", print_examples(s.examples));
    write_file(dir / s.id / "meta", print_meta({{"tags", tags}}));
  }
}

std::vector<eval::Scenario> load_scenarios(const fs::path& dir) {
  std::vector<eval::Scenario> out;
  for (const auto& sub : subdirs(dir)) {
    eval::Scenario s;
    s.id = sub.filename().string();
    s.background = parse_facts(read_file(sub / "bk.bk"));
    s.examples = parse_examples(read_file(sub / "exs.exs"));
    if (fs::exists(sub / "meta")) {
      const Meta meta = parse_meta(read_file(sub / "meta"));
      if (auto it = meta.find("tags"); it != meta.end()) {
        std::istringstream in(it->second);
        for (std::string t; std::getline(in, t, ',');) {
          if (!trim(t).empty()) s.tags.push_back(trim(t));
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rulesmith::corpus
