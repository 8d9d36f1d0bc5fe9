#include "rulesmith/report.hpp"

#include <cstdio>
#include <json.hpp>

#include "rulesmith/text_format.hpp"

namespace rulesmith::report {

namespace {

using Json = nlohmann::ordered_json;

Json record(const char* kind) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["record"] = kind;
  return j;
}

std::string lines(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

Json rules_json(const Program& p) {
  Json a = Json::array();
  for (const auto& c : p) a.push_back(print_clause(c));
  return a;
}

Json metrics_json(const eval::Metrics& m) {
  return Json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"accuracy_degenerate", m.accuracy_degenerate},
              {"precision_degenerate", m.precision_degenerate},
              {"recall_degenerate", m.recall_degenerate}};
}

Json counts_json(const eval::Confusion& c) { return Json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}}; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void level12_json(const pipeline::PipelineReport& r, std::vector<Json>& out) {
  for (const auto& v : r.level1) {
    Json j = record("level1");
    j["id"] = v.id;
    j["accepted"] = v.accepted;
    j["attempts"] = v.attempts.size();
    Json attempts = Json::array();
    for (const auto& a : v.attempts) attempts.push_back(Json{{"attempt", a.attempt}, {"reasons", a.reasons}});
    j["attempt_log"] = attempts;
    out.push_back(j);
  }
  for (const auto& c : r.level2) {
    Json j = record("level2");
    j["id"] = c.id;
    j["reliable"] = c.reliable;
    j["outcome"] = to_string(c.outcome);
    j["clauses_enumerated"] = c.stats.clauses_enumerated;
    j["hypothesis"] = rules_json(c.hypothesis);
    out.push_back(j);
  }
}

void level12_text(const pipeline::PipelineReport& r, std::string& out) {
  std::size_t accepted = 0;
  for (const auto& v : r.level1) accepted += v.accepted;
  out += "Level 1: " + std::to_string(accepted) + "/" + std::to_string(r.level1.size()) + " bundles valid\n";
  for (const auto& v : r.level1) {
    if (v.accepted && v.attempts.size() == 1) continue;
    out += "  " + v.id + (v.accepted ? " accepted on attempt " + std::to_string(v.attempts.size()) : " rejected");
    const auto reasons = v.reasons();
    for (std::size_t i = 0; i < reasons.size(); ++i) out += (i ? "; " : ": ") + reasons[i];
    out += "\n";
  }
  std::size_t reliable = 0;
  for (const auto& c : r.level2) reliable += c.reliable;
  out += "Level 2: " + std::to_string(reliable) + "/" + std::to_string(r.level2.size()) + " subsets reliable\n";
  for (const auto& c : r.level2) {
    if (!c.reliable) out += "  " + c.id + " discarded (" + std::string(to_string(c.outcome)) + ")\n";
  }
}

}  // namespace

std::string pipeline_jsonl(const pipeline::PipelineReport& r, const pipeline::PipelineConfig& config) {
  std::vector<Json> out;
  Json head = record("config");
  head["rho"] = config.rho;
  head["tau"] = config.tau;
  head["max_retries"] = config.max_retries;
  head["validation_attempts"] = config.validation_attempts;
  head["seed"] = config.seed;
  head["timeout_ms"] = config.timeout.count();
  out.push_back(head);
  level12_json(r, out);
  for (std::size_t t = 0; t < r.level3.trials.size(); ++t) {
    const auto& tr = r.level3.trials[t];
    Json j = record("trial");
    j["trial"] = tr.trial;
    j["order"] = tr.order;
    j["k"] = tr.k;
    j["fail_frac"] = tr.fail_frac;
    j["success"] = tr.success;
    j["best"] = static_cast<int>(t) == r.level3.best_trial;
    j["accepted"] = tr.state.accepted;
    j["hypothesis"] = rules_json(tr.state.hypothesis);
    out.push_back(j);
    for (const auto& d : tr.state.trial_log) {
      Json dj = record("decision");
      dj["trial"] = tr.trial;
      dj["id"] = d.id;
      dj["decision"] = to_string(d.decision);
      dj["reason"] = d.reason;
      dj["solver_calls"] = d.solver_calls;
      Json removed = Json::array();
      for (const auto& e : d.removed) removed.push_back(Json{{"atom", print_atom(e.atom)}, {"positive", e.positive}});
      dj["removed"] = removed;
      out.push_back(dj);
    }
  }
  Json l3 = record("level3");
  l3["trials"] = r.level3.trials.size();
  l3["early_stopped"] = r.level3.early_stopped;
  if (const auto* best = r.level3.best()) {
    l3["best_trial"] = best->trial;
    l3["k"] = best->k;
    l3["fail_frac"] = best->fail_frac;
    l3["success"] = best->success;
    l3["raw_rules"] = best->state.hypothesis.size();
  }
  out.push_back(l3);
  for (const auto& rs : r.level4.rules) {
    Json j = record("level4");
    j["rule"] = print_clause(rs.rule);
    j["support"] = rs.support;
    j["kept"] = rs.kept;
    out.push_back(j);
  }
  Json fin = record("final");
  fin["emptied_at"] = r.emptied_at;
  fin["max_support"] = r.level4.max_support;
  fin["threshold"] = r.level4.threshold;
  fin["rules"] = rules_json(r.final_hypothesis);
  out.push_back(fin);
  return lines(out);
}

std::string pipeline_text(const pipeline::PipelineReport& r, const pipeline::PipelineConfig& config) {
  std::string out;
  out += "rho=" + fmt("%.2f", config.rho) + " tau=" + fmt("%.2f", config.tau) +
         " T=" + std::to_string(config.max_retries) + " seed=" + std::to_string(config.seed) + "\n";
  level12_text(r, out);
  if (!r.level3.trials.empty()) {
    out += "Level 3:\n";
    for (std::size_t t = 0; t < r.level3.trials.size(); ++t) {
      const auto& tr = r.level3.trials[t];
      out += "  trial " + std::to_string(tr.trial) + ": k=" + std::to_string(tr.k) +
             " fail_frac=" + fmt("%.3f", tr.fail_frac) + (tr.success ? " success" : "") +
             (static_cast<int>(t) == r.level3.best_trial ? " [best]" : "") + "\n";
      for (const auto& d : tr.state.trial_log) {
        if (d.decision == pipeline::Decision::accepted) continue;
        out += "    " + d.id + " " + std::string(to_string(d.decision));
        if (!d.reason.empty()) out += " (" + d.reason + ")";
        if (!d.removed.empty()) {
          out += " removed:";
          for (const auto& e : d.removed) out += std::string(" ") + (e.positive ? "pos(" : "neg(") + print_atom(e.atom) + ")";
        }
        out += "\n";
      }
    }
    if (r.level3.early_stopped) out += "  stopped early\n";
  }
  if (!r.level4.rules.empty()) {
    out += "Level 4: threshold " + fmt("%.2f", r.level4.threshold) + "\n";
    for (const auto& rs : r.level4.rules) {
      out += std::string("  ") + (rs.kept ? "keep " : "drop ") + std::to_string(rs.support) + "  " +
             print_clause(rs.rule) + "\n";
    }
  }
  if (!r.emptied_at.empty()) out += "Pipeline emptied at " + r.emptied_at + "\n";
  out += "Final hypothesis (" + std::to_string(r.final_hypothesis.size()) + " rules):\n" +
         print_program(r.final_hypothesis);
  return out;
}

std::string check_jsonl(const pipeline::PipelineReport& r) {
  std::vector<Json> out;
  level12_json(r, out);
  return lines(out);
}

std::string check_text(const pipeline::PipelineReport& r) {
  std::string out;
  level12_text(r, out);
  return out;
}

std::string eval_jsonl(const eval::EvalReport& r) {
  std::vector<Json> out;
  for (const auto& s : r.scenarios) {
    Json j = record("scenario");
    j["id"] = s.id;
    j["correct"] = s.correct;
    j["counts"] = counts_json(s.counts);
    out.push_back(j);
  }
  for (const auto& v : r.verdicts) {
    Json j = record("verdict");
    j["scenario"] = v.scenario;
    j["example"] = print_atom(v.example);
    j["label"] = v.label;
    j["predicted"] = v.predicted;
    out.push_back(j);
  }
  Json s = record("summary");
  s["counts"] = counts_json(r.counts);
  s["metrics"] = metrics_json(r.metrics);
  std::size_t correct = 0;
  for (const auto& sc : r.scenarios) correct += sc.correct;
  s["scenarios_correct"] = correct;
  s["scenarios"] = r.scenarios.size();
  out.push_back(s);
  return lines(out);
}

std::string eval_text(const eval::EvalReport& r) {
  std::string out;
  for (const auto& s : r.scenarios) {
    out += (s.correct ? "  ok    " : "  WRONG ") + s.id + "  tp=" + std::to_string(s.counts.tp) +
           " fp=" + std::to_string(s.counts.fp) + " fn=" + std::to_string(s.counts.fn) +
           " tn=" + std::to_string(s.counts.tn) + "\n";
  }
  const auto& c = r.counts;
  const auto& m = r.metrics;
  out += "tp=" + std::to_string(c.tp) + " fp=" + std::to_string(c.fp) + " fn=" + std::to_string(c.fn) +
         " tn=" + std::to_string(c.tn) + "\n";
  out += "accuracy  " + fmt("%.3f", m.accuracy) + (m.accuracy_degenerate ? " (no examples)" : "") + "\n";
  out += "precision " + fmt("%.3f", m.precision) + (m.precision_degenerate ? " (no predicted positives)" : "") + "\n";
  out += "recall    " + fmt("%.3f", m.recall) + (m.recall_degenerate ? " (no positives)" : "") + "\n";
  out += "f1        " + fmt("%.3f", m.f1) + "\n";
  return out;
}

std::string diff_jsonl(const eval::HypothesisDiff& d) {
  std::vector<Json> out;
  for (const auto& c : d.disagreements) {
    Json j = record("disagreement");
    j["scenario"] = c.scenario;
    j["example"] = print_atom(c.example);
    j["label"] = c.label;
    j["before"] = c.before;
    j["after"] = c.after;
    out.push_back(j);
  }
  Json s = record("summary");
  s["before"] = counts_json(d.before);
  s["after"] = counts_json(d.after);
  s["before_metrics"] = metrics_json(d.before_metrics);
  s["after_metrics"] = metrics_json(d.after_metrics);
  s["delta"] = Json{{"tp", d.delta_tp()}, {"fp", d.delta_fp()}, {"fn", d.delta_fn()}, {"tn", d.delta_tn()}};
  out.push_back(s);
  return lines(out);
}

std::string diff_text(const eval::HypothesisDiff& d) {
  std::string out;
  for (const auto& c : d.disagreements) {
    out += "  " + c.scenario + "  " + (c.label ? "pos " : "neg ") + print_atom(c.example) + "  " +
           (c.before ? "covered" : "not covered") + " -> " + (c.after ? "covered" : "not covered") + "\n";
  }
  auto signed_str = [](long v) { return (v > 0 ? "+" : "") + std::to_string(v); };
  out += std::to_string(d.disagreements.size()) + " disagreements; delta tp " + signed_str(d.delta_tp()) + " fp " +
         signed_str(d.delta_fp()) + " fn " + signed_str(d.delta_fn()) + " tn " + signed_str(d.delta_tn()) + "\n";
  out += "f1 " + fmt("%.3f", d.before_metrics.f1) + " -> " + fmt("%.3f", d.after_metrics.f1) + "\n";
  return out;
}

}  // namespace rulesmith::report
