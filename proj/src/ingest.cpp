#include "rulesmith/ingest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rng.hpp"

namespace rulesmith::ingest {

namespace fs = std::filesystem;

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  auto num = [&](std::size_t pos, std::size_t len) -> int {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return -1;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  const int y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), s = num(17, 2);
  if (y < 0 || mo < 0 || d < 0 || h < 0 || mi < 0 || s < 0 || h > 23 || mi > 59 || s > 59) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} + std::chrono::seconds{s};
}

std::string format_timestamp(Timestamp t) {
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string_view to_string(RecordKind k) { return k == RecordKind::violation ? "violation" : "nominal"; }

namespace {

std::string read_optional(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RawBundle FixtureExtractor::extract(const SourceRecord& record, int attempt) const {
  const fs::path base = root_ / record.id;
  fs::path dir = base / ("attempt-" + std::to_string(attempt));
  if (!fs::is_directory(dir)) dir = base / "attempt-1";
  if (!fs::is_directory(dir)) throw IoError("no fixture for record " + record.id + " under " + root_.string());
  RawBundle b;
  b.background_text = read_optional(dir / "bk.bk");
  b.examples_text = read_optional(dir / "exs.exs");
  b.issues = role_issues(record, b.examples_text);
  return b;
}

std::vector<std::string> role_issues(const SourceRecord& record, std::string_view examples_text) {
  const std::string_view forbidden = record.kind == RecordKind::violation ? "neg(" : "pos(";
  std::vector<std::string> out;
  std::size_t line = 1;
  std::size_t start = 0;
  while (start <= examples_text.size()) {
    std::size_t end = examples_text.find('\n', start);
    if (end == std::string_view::npos) end = examples_text.size();
    std::string_view l = examples_text.substr(start, end - start);
    const auto first = l.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && l.substr(first).starts_with(forbidden)) {
      out.push_back(std::string(to_string(record.kind)) + " record " + record.id + " yields " +
                    std::string(forbidden.substr(0, 3)) + " example at line " + std::to_string(line));
    }
    start = end + 1;
    ++line;
  }
  return out;
}

std::vector<RecordPair> pair_subsets(const std::vector<SourceRecord>& violations,
                                     const std::vector<SourceRecord>& nominals, std::uint64_t seed) {
  if (violations.empty()) throw std::invalid_argument("no violation records to pair");
  if (nominals.empty()) throw std::invalid_argument("no nominal records to pair");
  std::vector<std::size_t> order(violations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  detail::Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::size_t> nominal_of(violations.size());
  for (std::size_t k = 0; k < order.size(); ++k) nominal_of[order[k]] = k % nominals.size();
  std::vector<RecordPair> out;
  out.reserve(violations.size());
  for (std::size_t i = 0; i < violations.size(); ++i) out.push_back({violations[i], nominals[nominal_of[i]]});
  return out;
}

std::string subset_id(const RecordPair& p) { return p.violation.id + "__" + p.nominal.id; }

RawBundle extract_pair(const Extractor& ex, const RecordPair& p, int attempt) {
  RawBundle v = ex.extract(p.violation, attempt);
  RawBundle n = ex.extract(p.nominal, attempt);
  auto join = [](std::string a, const std::string& b) {
    if (!a.empty() && a.back() != '\n') a += '\n';
    return a + b;
  };
  RawBundle out;
  out.background_text = join(std::move(v.background_text), n.background_text);
  out.examples_text = join(std::move(v.examples_text), n.examples_text);
  out.issues = std::move(v.issues);
  out.issues.insert(out.issues.end(), n.issues.begin(), n.issues.end());
  return out;
}

}  // namespace rulesmith::ingest
