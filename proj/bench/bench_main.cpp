// Serial vs OpenMP kernels: refinement search, Level-2 checks, held-out eval.
// Arg 0 is the serial path, 1 the parallel one.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "rulesmith/eval.hpp"
#include "rulesmith/pipeline.hpp"
#include "rulesmith/synth.hpp"
#include "rulesmith/text_format.hpp"

using namespace rulesmith;

namespace {

std::string slurp(const char* rel) {
  std::ifstream in(std::string(RULESMITH_DATA_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const BiasSpec& bias() {
  static const BiasSpec b = parse_bias(slurp("bias/vocabulary.bias"));
  return b;
}

const Program& rules() {
  static const Program r = parse_rules(slurp("rules/planted.rules"));
  return r;
}

std::vector<pipeline::SubsetInstance> instances(std::size_t n, double corruption) {
  const auto c = synth::generate_corpus({rules(), bias(), n, corruption, 17});
  std::vector<pipeline::SubsetInstance> out;
  for (const auto& s : c.subsets) {
    pipeline::SubsetSource src;
    src.id = s.id;
    src.timestamp = s.records.violation.timestamp;
    src.attempt = [bk = s.background_text, ex = s.examples_text](int) { return ingest::RawBundle{bk, ex, {}}; };
    if (auto v = pipeline::validate_bundle(src, bias(), 1); v.instance) out.push_back(std::move(*v.instance));
  }
  return out;
}

void BM_PrunedSearch(benchmark::State& state) {
  // Merged training set of several clean subsets: all three rules needed.
  SolverRequest req;
  req.bias = bias();
  const auto subsets = instances(12, 0.0);
  for (const auto& s : subsets) {
    for (const auto& c : s.background) req.background.add(c);
    for (const auto& a : s.examples.positives()) req.examples.add_positive(a);
    for (const auto& a : s.examples.negatives()) req.examples.add_negative(a);
  }
  const ReferenceSolver solver({SearchMode::pruned, state.range(0) != 0});
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(req));
}
BENCHMARK(BM_PrunedSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CheckSubsets(benchmark::State& state) {
  const auto subsets = instances(40, 0.2);
  pipeline::PipelineConfig cfg;
  cfg.parallel = state.range(0) != 0;
  const ReferenceSolver solver({SearchMode::pruned, false});
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::check_subsets(subsets, bias(), cfg, solver));
}
BENCHMARK(BM_CheckSubsets)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto scenarios = synth::generate_scenarios(rules(), bias(), 400, 3);
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate(rules(), scenarios, state.range(0) != 0));
}
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
