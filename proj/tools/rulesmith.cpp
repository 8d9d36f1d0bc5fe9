// rulesmith: generate corpora, validate, learn, evaluate and compare rules.

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "rulesmith/corpus.hpp"
#include "rulesmith/eval.hpp"
#include "rulesmith/pipeline.hpp"
#include "rulesmith/report.hpp"
#include "rulesmith/synth.hpp"
#include "rulesmith/text_format.hpp"

namespace fs = std::filesystem;
using namespace rulesmith;

namespace {

enum Exit { kOk = 0, kEmpty = 1, kInvalid = 2, kIo = 3 };

struct GenArgs {
  fs::path rules;
  fs::path bias;
  std::size_t subsets = 30;
  double corruption = 0.0;
  std::uint64_t seed = 0;
  fs::path out;
  std::size_t scenarios = 0;
  fs::path scenarios_out;
};

struct PipelineArgs {
  fs::path corpus;
  fs::path bias;
  fs::path out;
  pipeline::PipelineConfig config;
  long timeout_ms = 10'000;
  std::size_t max_vars = 0, max_body = 0, max_clauses = 0;
};

struct EvalArgs {
  fs::path rules;
  fs::path after;
  fs::path scenarios;
  fs::path out;
};

BiasSpec bias_for(const PipelineArgs& a) {
  return corpus::load_bias(a.bias.empty() ? a.corpus / "bias.bias" : a.bias);
}

Program read_rules(const fs::path& p) { return parse_rules(corpus::read_file(p)); }

void apply_bounds(PipelineArgs& a) {
  a.config.timeout = std::chrono::milliseconds(a.timeout_ms);
  if (a.max_vars) a.config.max_vars = a.max_vars;
  if (a.max_body) a.config.max_body = a.max_body;
  if (a.max_clauses) a.config.max_clauses = a.max_clauses;
  a.config.check();
}

int run_gen(const GenArgs& a) {
  synth::GenConfig cfg{read_rules(a.rules), corpus::load_bias(a.bias), a.subsets, a.corruption, a.seed};
  if (a.subsets == 0) throw InvariantError("--subsets must be at least 1");
  const synth::Corpus c = synth::generate_corpus(cfg);
  corpus::write_corpus(a.out, c, cfg.bias);
  std::size_t corrupted = 0;
  for (const auto& s : c.subsets) {
    if (s.corruption != synth::Corruption::none) {
      ++corrupted;
      std::cout << "corrupted " << s.id << " (" << synth::to_string(s.corruption) << ")\n";
    }
  }
  std::cout << "wrote " << c.subsets.size() << " subsets (" << corrupted << " corrupted) to " << a.out.string()
            << "\n";
  if (a.scenarios > 0) {
    const fs::path dir = a.scenarios_out.empty() ? fs::path(a.out.string() + "-scenarios") : a.scenarios_out;
    corpus::write_scenarios(dir, synth::generate_scenarios(cfg.rules, cfg.bias, a.scenarios, a.seed ^ 0x5eedULL));
    std::cout << "wrote " << a.scenarios << " held-out scenarios to " << dir.string() << "\n";
  }
  return kOk;
}

pipeline::PipelineReport levels_1_2(const std::vector<pipeline::SubsetSource>& sources, const BiasSpec& bias,
                                    const pipeline::PipelineConfig& cfg) {
  pipeline::PipelineReport rep;
  std::vector<pipeline::SubsetInstance> valid;
  for (const auto& s : sources) {
    auto v = pipeline::validate_bundle(s, bias, cfg.validation_attempts);
    rep.level1.push_back(std::move(v.record));
    if (v.instance) valid.push_back(std::move(*v.instance));
  }
  rep.level2 = pipeline::check_subsets(valid, bias, cfg, ReferenceSolver({SearchMode::pruned, cfg.parallel})).checks;
  return rep;
}

int run_check(PipelineArgs a) {
  apply_bounds(a);
  const BiasSpec bias = a.config.effective_bias(bias_for(a));
  bias.check();
  const auto rep = levels_1_2(corpus::load_corpus(a.corpus), bias, a.config);
  std::cout << report::check_text(rep);
  if (!a.out.empty()) corpus::write_file(a.out, report::check_jsonl(rep));
  return kOk;
}

int run_learn(PipelineArgs a) {
  apply_bounds(a);
  const BiasSpec bias = bias_for(a);
  a.config.effective_bias(bias).check();
  const auto sources = corpus::load_corpus(a.corpus);
  const ReferenceSolver solver({SearchMode::pruned, a.config.parallel});
  const auto rep = pipeline::run_pipeline(sources, bias, a.config, solver);
  const std::string text = report::pipeline_text(rep, a.config);
  std::cout << text;
  if (!a.out.empty()) {
    corpus::write_file(a.out / "report.txt", text);
    corpus::write_file(a.out / "report.jsonl", report::pipeline_jsonl(rep, a.config));
    corpus::write_file(a.out / "final.rules", print_program(rep.final_hypothesis));
  }
  return rep.final_hypothesis.empty() ? kEmpty : kOk;
}

int run_eval(const EvalArgs& a) {
  const auto r = eval::evaluate(read_rules(a.rules), corpus::load_scenarios(a.scenarios));
  std::cout << report::eval_text(r);
  if (!a.out.empty()) corpus::write_file(a.out, report::eval_jsonl(r));
  return kOk;
}

int run_diff(const EvalArgs& a) {
  const auto d = eval::diff_hypotheses(read_rules(a.rules), read_rules(a.after), corpus::load_scenarios(a.scenarios));
  std::cout << report::diff_text(d);
  if (!a.out.empty()) corpus::write_file(a.out, report::diff_jsonl(d));
  return kOk;
}

int run_print(const fs::path& rules, const fs::path& bias_file) {
  const Program p = read_rules(rules);
  std::optional<BiasSpec> bias;
  if (!bias_file.empty()) bias = corpus::load_bias(bias_file);
  for (const auto& c : p) {
    std::cout << print_clause(canonical(c));
    if (bias) {
      bool ok = bias->is_head(c.head.predicate, c.head.arity());
      for (const auto& b : c.body) ok = ok && bias->declares(b.predicate, b.arity()) && !bias->is_head(b.predicate, b.arity());
      if (!ok) std::cout << "  % outside bias";
    }
    std::cout << "\n";
  }
  return kOk;
}

void add_pipeline_flags(CLI::App* cmd, PipelineArgs& a, bool learn) {
  cmd->add_option("--corpus", a.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--bias", a.bias, "Bias file (default: <corpus>/bias.bias)");
  cmd->add_option("--validation-attempts", a.config.validation_attempts, "Level-1 attempts per bundle")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.config.seed, "Root seed")->capture_default_str();
  cmd->add_option("--timeout", a.timeout_ms, "Solver timeout per call, in milliseconds")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-vars", a.max_vars, "Override the bias variable bound")->check(CLI::PositiveNumber);
  cmd->add_option("--max-body", a.max_body, "Override the bias body-length bound")->check(CLI::PositiveNumber);
  cmd->add_option("--max-clauses", a.max_clauses, "Override the bias clause bound")->check(CLI::PositiveNumber);
  if (learn) {
    cmd->add_option("--rho", a.config.rho, "Failure threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--tau", a.config.tau, "Support threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--retries", a.config.max_retries, "Aggregation trials T")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, "Directory for report.txt, report.jsonl and final.rules");
  } else {
    cmd->add_option("--out", a.out, "Structured report file");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn safety rules from noisy incident bundles"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file of `key = value` lines ([command] sections)")
      ->envname("RULESMITH_CONFIG");
  app.allow_config_extras(CLI::config_extras_mode::error);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0: OpenMP default, 1: serial)")->check(CLI::NonNegativeNumber);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic corpus planted from rules");
  g->add_option("--rules", gen.rules, "Rules to plant")->required()->check(CLI::ExistingFile);
  g->add_option("--bias", gen.bias, "Bias file")->required()->check(CLI::ExistingFile);
  g->add_option("--subsets", gen.subsets, "Number of subsets")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--corruption", gen.corruption, "Fraction of corrupted subsets")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output corpus directory")->required();
  g->add_option("--scenarios", gen.scenarios, "Also write this many held-out scenarios")->capture_default_str();
  g->add_option("--scenarios-out", gen.scenarios_out, "Scenario directory (default: <out>-scenarios)");

  PipelineArgs check_args, learn_args;
  auto* c = app.add_subcommand("check", "Run Level 1 validation and Level 2 consistency checks only");
  add_pipeline_flags(c, check_args, false);
  auto* l = app.add_subcommand("learn", "Run the full pipeline and write the final rules");
  add_pipeline_flags(l, learn_args, true);

  EvalArgs ev, df;
  auto* e = app.add_subcommand("eval", "Evaluate rules on scenarios by entailment");
  e->add_option("--rules", ev.rules, "Rules file")->required()->check(CLI::ExistingFile);
  e->add_option("--scenarios", ev.scenarios, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--out", ev.out, "Structured report file");
  auto* d = app.add_subcommand("diff", "Compare two rule sets on scenarios");
  d->add_option("--before", df.rules, "First rules file")->required()->check(CLI::ExistingFile);
  d->add_option("--after", df.after, "Second rules file")->required()->check(CLI::ExistingFile);
  d->add_option("--scenarios", df.scenarios, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  d->add_option("--out", df.out, "Structured report file");

  fs::path print_file, print_bias_file;
  auto* p = app.add_subcommand("print-rules", "Print rules in canonical form");
  p->add_option("rules", print_file, "Rules file")->required()->check(CLI::ExistingFile);
  p->add_option("--bias", print_bias_file, "Flag rules outside this bias")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kInvalid;
  }

  if (jobs > 0) omp_set_num_threads(jobs);
  learn_args.config.parallel = check_args.config.parallel = jobs != 1;

  try {
    if (*g) return run_gen(gen);
    if (*c) return run_check(check_args);
    if (*l) return run_learn(learn_args);
    if (*e) return run_eval(ev);
    if (*d) return run_diff(df);
    if (*p) return run_print(print_file, print_bias_file);
  } catch (const ingest::IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIo;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalid;
  } catch (const InvariantError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
