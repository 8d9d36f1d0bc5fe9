#pragma once

// Human-readable and line-delimited JSON renderings of pipeline and
// evaluation reports. The JSON form carries a schema version on every
// record and no wall-clock data, so identical runs give identical bytes.

#include <string>

#include "rulesmith/eval.hpp"
#include "rulesmith/pipeline.hpp"

namespace rulesmith::report {

inline constexpr int kSchemaVersion = 1;

std::string pipeline_text(const pipeline::PipelineReport& r, const pipeline::PipelineConfig& config);
std::string pipeline_jsonl(const pipeline::PipelineReport& r, const pipeline::PipelineConfig& config);

/// Level 1 and 2 only, for `check`.
std::string check_text(const pipeline::PipelineReport& r);
std::string check_jsonl(const pipeline::PipelineReport& r);

std::string eval_text(const eval::EvalReport& r);
std::string eval_jsonl(const eval::EvalReport& r);

std::string diff_text(const eval::HypothesisDiff& d);
std::string diff_jsonl(const eval::HypothesisDiff& d);

}  // namespace rulesmith::report
