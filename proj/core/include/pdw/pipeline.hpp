// Copyright 2026 The pdw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "pdw/config.hpp"
#include "pdw/embedding.hpp"
#include "pdw/evaluate.hpp"
#include "pdw/training.hpp"

namespace pdw {

using ProgressFn = std::function<void(const std::string&)>;

// Seeds of the pipeline's independent random streams, all derived from
// RunConfig::seed.
struct PipelineSeeds {
  std::uint64_t eval_corpus;
  std::uint64_t train_corpus;
  std::uint64_t augment;
  std::uint64_t model;
  std::uint64_t shuffle;
  std::uint64_t embedding;

  static PipelineSeeds from(std::uint64_t seed);
};

FineTuneConfig fine_tune_config(const RunConfig& config);

struct PipelineResult {
  std::filesystem::path final_checkpoint;
  EvalReport report;
};

// corpus -> augment -> train -> evaluate -> report, under config.output_dir:
//   config.ini, corpus/{eval,train_clean,train_noisy}/, embedding.bin,
//   train/epoch_NNN.ckpt, eval/{report.csv,utterances.jsonl,wer_table.tsv,
//   improvement.tsv}
// The evaluated defenses are "none", "specsub" and "denoiser" (the final
// checkpoint).
PipelineResult run_pipeline(const RunConfig& config, const ProgressFn& progress = {});

}  // namespace pdw
