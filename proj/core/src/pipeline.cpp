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

#include "pdw/pipeline.hpp"

#include <fstream>

#include "pdw/corpus.hpp"
#include "pdw/error.hpp"
#include "pdw/format.hpp"
#include "pdw/rng.hpp"

namespace pdw {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

void report_failures(const std::vector<BatchFailure>& failures, const std::string& stage) {
  if (failures.empty()) return;
  throw Error(stage + ": " + std::to_string(failures.size()) + " file(s) failed, first '" +
              failures.front().id + "': " + failures.front().reason);
}

}  // namespace

PipelineSeeds PipelineSeeds::from(std::uint64_t seed) {
  return {derive_seed(seed, "eval-corpus"), derive_seed(seed, "train-corpus"),
          derive_seed(seed, "augment"),     derive_seed(seed, "model"),
          derive_seed(seed, "shuffle"),     derive_seed(seed, "embedding")};
}

FineTuneConfig fine_tune_config(const RunConfig& config) {
  FineTuneConfig ft;
  ft.epochs = config.epochs;
  ft.batch_size = config.batch_size;
  ft.learning_rate = config.learning_rate;
  ft.phase1_epochs = config.phase1_epochs;
  ft.phase1_learning_rate = config.phase1_learning_rate;
  ft.segment_length = config.segment_length;
  ft.seed = PipelineSeeds::from(config.seed).shuffle;
  ft.step.weights = config.weights;
  ft.step.resolutions = config.resolutions;
  ft.step.clip_norm = config.clip_norm;
  ft.step.jobs = config.jobs;
  return ft;
}

PipelineResult run_pipeline(const RunConfig& config, const ProgressFn& progress) {
  config.validate();
  auto log = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  const std::filesystem::path root = config.output_dir;
  const PipelineSeeds seeds = PipelineSeeds::from(config.seed);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
  write_text(root / "config.ini", serialize_run_config(config));

  log("corpus: generating " + std::to_string(config.corpus_size) + " evaluation utterances");
  const Manifest eval_corpus = generate_synthetic_corpus(config.corpus_size, seeds.eval_corpus,
                                                         root / "corpus" / "eval", config.jobs);
  log("corpus: generating " + std::to_string(config.train_size) + " training utterances");
  const Manifest train_clean = generate_synthetic_corpus(
      config.train_size, seeds.train_corpus, root / "corpus" / "train_clean", config.jobs);
  const AugmentResult noisy = augment_with_noise(train_clean, seeds.augment,
                                                 root / "corpus" / "train_noisy", config.jobs);
  report_failures(noisy.failures, "augment");

  const PerceptualEmbedding embedding = PerceptualEmbedding::from_seed(seeds.embedding);
  embedding.save(root / "embedding.bin");

  FineTuneConfig ft = fine_tune_config(config);
  ft.checkpoint_dir = root / "train";
  const std::vector<TrainingPair> pairs = load_training_pairs(noisy.manifest, train_clean);
  log("train: " + std::to_string(config.epochs) + " epochs over " + std::to_string(pairs.size()) +
      " pairs");
  Checkpoint ckpt = initial_checkpoint(seeds.model, DenoiserArch::standard(), ft);
  ckpt = fine_tune(std::move(ckpt), pairs, ft, embedding, [&](const EpochReport& r) {
    log("train: epoch " + std::to_string(r.epoch) + " phase " + std::to_string(r.phase) +
        " mean_loss " + format_double(r.mean_loss));
  });
  PipelineResult result;
  if (config.epochs == 0) {
    std::filesystem::create_directories(ft.checkpoint_dir);
    save_checkpoint(ckpt, epoch_checkpoint_path(ft.checkpoint_dir, 0));
  }
  result.final_checkpoint = epoch_checkpoint_path(ft.checkpoint_dir, ckpt.epoch);

  std::vector<Defense> defenses{parse_defense("none"), parse_defense("specsub")};
  Defense denoiser;
  denoiser.name = "denoiser";
  denoiser.stages.push_back(std::make_shared<DenoiserStage>(ckpt.model));
  defenses.push_back(std::move(denoiser));

  std::vector<Condition> conditions;
  if (config.benign) conditions.push_back(Condition::benign());
  for (double s : config.attack_snrs) conditions.push_back(Condition::attack(s));

  const auto transcriber = make_transcriber(config.transcriber, &eval_corpus);
  log("eval: " + std::to_string(defenses.size()) + " defenses x " +
      std::to_string(conditions.size()) + " conditions x " +
      std::to_string(eval_corpus.size()) + " utterances");
  result.report = evaluate(eval_corpus, *transcriber, defenses, conditions, config.jobs);
  write_report(result.report, root / "eval");
  write_text(root / "eval" / "improvement.tsv", format_improvement_table(result.report.rows, "none"));
  for (const auto& row : result.report.rows) {
    log("eval: " + row.defense + " @ " + row.condition + " WER " + format_double(row.wer_pct()) + "%");
  }
  return result;
}

}  // namespace pdw
