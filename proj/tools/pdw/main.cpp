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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdw/attack.hpp"
#include "pdw/checkpoint.hpp"
#include "pdw/config.hpp"
#include "pdw/corpus.hpp"
#include "pdw/error.hpp"
#include "pdw/evaluate.hpp"
#include "pdw/format.hpp"
#include "pdw/gradcheck.hpp"
#include "pdw/manifest.hpp"
#include "pdw/parallel.hpp"
#include "pdw/pipeline.hpp"
#include "pdw/training.hpp"
#include "pdw/wav.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Globals {
  int jobs = 1;
  std::string config_path;
};

void progress(const std::string& msg) { std::cerr << "pdw: " << msg << "\n"; }

std::string require(const std::optional<std::string>& value, const std::string& flag) {
  if (!value || value->empty()) throw pdw::ConfigError(flag, "required flag is missing");
  return *value;
}

long long int_flag(const std::string& value, const std::string& flag) {
  try {
    return pdw::parse_int(value, flag);
  } catch (const pdw::FormatError&) {
    throw pdw::ConfigError(flag, "expected an integer, got '" + value + "'");
  }
}

double real_flag(const std::string& value, const std::string& flag) {
  try {
    return pdw::parse_double(value, flag);
  } catch (const pdw::FormatError&) {
    throw pdw::ConfigError(flag, "expected a number, got '" + value + "'");
  }
}

fs::path require_file(const std::optional<std::string>& value, const std::string& flag) {
  const fs::path p = require(value, flag);
  if (!fs::is_regular_file(p)) throw pdw::ConfigError(flag, "no such file: " + p.string());
  return p;
}

// --out if given, else $PDW_OUTPUT_ROOT/<command>, else ./pdw-out/<command>.
fs::path output_dir(const std::optional<std::string>& out, const std::string& command) {
  if (out && !out->empty()) return *out;
  const char* root = std::getenv("PDW_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "pdw-out") / command;
}

pdw::Manifest read_manifest_flag(const std::optional<std::string>& value, const std::string& flag) {
  return pdw::read_manifest(require_file(value, flag));
}

int report_failures(const std::vector<pdw::BatchFailure>& failures) {
  for (const auto& f : failures) progress("failed " + f.id + ": " + f.reason);
  if (failures.empty()) return 0;
  std::cerr << "pdw: error kind=runtime reason=\"" << failures.size() << " item(s) failed\"\n";
  return kExitRuntime;
}

// Loads --config (if any) and applies "section.key" overrides from flags.
pdw::RunConfig resolve_config(const Globals& g,
                              const std::vector<std::pair<std::string, std::optional<std::string>>>& overrides) {
  pdw::RunConfig config = g.config_path.empty() ? pdw::RunConfig{} : pdw::load_run_config(g.config_path);
  config.jobs = g.jobs;
  for (const auto& [key, value] : overrides) {
    if (value) pdw::set_config_value(config, key, *value);
  }
  config.validate();
  return config;
}

// ---- corpus --------------------------------------------------------------

struct CorpusGenArgs {
  std::optional<std::string> n, seed, out;
};

int cmd_corpus_gen(const Globals& g, const CorpusGenArgs& a) {
  const long long n = int_flag(require(a.n, "--n"), "--n");
  if (n < 0) throw pdw::ConfigError("--n", "must be >= 0");
  const long long seed = int_flag(require(a.seed, "--seed"), "--seed");
  const fs::path out = output_dir(a.out, "corpus");
  const pdw::Manifest m =
      pdw::generate_synthetic_corpus(static_cast<std::size_t>(n), static_cast<std::uint64_t>(seed), out, g.jobs);
  progress("corpus: wrote " + std::to_string(m.size()) + " utterances to " + (out / "manifest.tsv").string());
  return 0;
}

struct CorpusAugmentArgs {
  std::optional<std::string> seed, in, out;
};

int cmd_corpus_augment(const Globals& g, const CorpusAugmentArgs& a) {
  const long long seed = int_flag(require(a.seed, "--seed"), "--seed");
  const pdw::Manifest in = read_manifest_flag(a.in, "--in");
  const fs::path out = output_dir(a.out, "augment");
  const pdw::AugmentResult r = pdw::augment_with_noise(in, static_cast<std::uint64_t>(seed), out, g.jobs);
  progress("augment: wrote " + std::to_string(r.manifest.size()) + " utterances to " +
           (out / "manifest.tsv").string());
  return report_failures(r.failures);
}

// ---- attack --------------------------------------------------------------

struct AttackArgs {
  std::optional<std::string> snr, in, out;
};

int cmd_attack(const Globals& g, const AttackArgs& a) {
  pdw::KenansvilleParams params;
  params.target_snr_db = real_flag(require(a.snr, "--snr"), "--snr");
  try {
    params.validate();
  } catch (const pdw::InvalidArgument& e) {
    throw pdw::ConfigError("--snr", e.what());
  }
  const pdw::Manifest in = read_manifest_flag(a.in, "--in");
  const fs::path out = output_dir(a.out, "attack");
  const pdw::AttackBatchResult r = pdw::attack_corpus(in, params, out, g.jobs);
  progress("attack: wrote " + std::to_string(r.manifest.size()) + " utterances to " +
           (out / "manifest.tsv").string());
  return report_failures(r.failures);
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::optional<std::string> noisy, clean, out, resume, embedding;
  std::optional<std::string> seed, epochs, batch, lr, alpha, beta, gamma, phase1_epochs, phase1_lr,
      segment, clip;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const pdw::RunConfig config = resolve_config(
      g, {{"run.seed", a.seed},
          {"train.epochs", a.epochs},
          {"train.batch", a.batch},
          {"train.learning_rate", a.lr},
          {"loss.alpha", a.alpha},
          {"loss.beta", a.beta},
          {"loss.gamma", a.gamma},
          {"train.phase1_epochs", a.phase1_epochs},
          {"train.phase1_learning_rate", a.phase1_lr},
          {"train.segment_length", a.segment},
          {"train.clip_norm", a.clip}});
  const pdw::Manifest noisy = read_manifest_flag(a.noisy, "--noisy");
  const pdw::Manifest clean = read_manifest_flag(a.clean, "--clean");
  const fs::path out = output_dir(a.out, "train");
  const pdw::PipelineSeeds seeds = pdw::PipelineSeeds::from(config.seed);

  pdw::PerceptualEmbedding embedding;
  if (a.embedding) {
    embedding = pdw::PerceptualEmbedding::load(require_file(a.embedding, "--embedding"));
  } else {
    embedding = pdw::PerceptualEmbedding::from_seed(seeds.embedding);
  }

  pdw::FineTuneConfig ft = pdw::fine_tune_config(config);
  ft.checkpoint_dir = out;
  pdw::Checkpoint start;
  if (a.resume) {
    start = pdw::load_checkpoint(require_file(a.resume, "--resume"));
  } else {
    start = pdw::initial_checkpoint(seeds.model, pdw::DenoiserArch::standard(), ft);
  }
  const std::vector<pdw::TrainingPair> pairs = pdw::load_training_pairs(noisy, clean);
  progress("train: " + std::to_string(pairs.size()) + " pairs, epochs " +
           std::to_string(start.epoch) + " -> " + std::to_string(config.epochs));
  const pdw::Checkpoint final_ckpt =
      pdw::fine_tune(std::move(start), pairs, ft, embedding, [](const pdw::EpochReport& r) {
        progress("train: epoch " + std::to_string(r.epoch) + " phase " + std::to_string(r.phase) +
                 " mean_loss " + pdw::format_double(r.mean_loss) + " steps " + std::to_string(r.steps));
      });
  const fs::path final_path = out / "final.ckpt";
  pdw::save_checkpoint(final_ckpt, final_path);
  progress("train: wrote " + final_path.string());
  return 0;
}

// ---- denoise -------------------------------------------------------------

struct DenoiseArgs {
  std::optional<std::string> defense, in, out;
};

int cmd_denoise(const Globals& g, const DenoiseArgs& a) {
  const pdw::Defense defense = pdw::parse_defense(require(a.defense, "--defense"));
  const pdw::Manifest in = read_manifest_flag(a.in, "--in");
  const fs::path out = output_dir(a.out, "denoise");
  fs::create_directories(out);
  std::vector<std::optional<pdw::Utterance>> done(in.size());
  std::vector<std::string> errors(in.size());
  pdw::parallel_for(in.size(), g.jobs, [&](std::size_t i) {
    const pdw::Utterance& u = in.entries[i];
    try {
      const pdw::AudioBuffer audio = defense.apply(pdw::load_wav(in.resolve(u)));
      pdw::save_wav(audio, out / (u.id + ".wav"), pdw::WavFormat::kFloat32);
      pdw::Utterance o = u;
      o.path = u.id + ".wav";
      done[i] = std::move(o);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  pdw::Manifest result;
  std::vector<pdw::BatchFailure> failures;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (done[i]) {
      result.entries.push_back(std::move(*done[i]));
    } else {
      failures.push_back({in.entries[i].id, errors[i]});
    }
  }
  pdw::write_manifest(result, out / "manifest.tsv");
  progress("denoise: wrote " + std::to_string(result.size()) + " utterances to " +
           (out / "manifest.tsv").string());
  return report_failures(failures);
}

// ---- eval / report -------------------------------------------------------

struct EvalArgs {
  std::optional<std::string> manifest, transcriber, snrs, out;
  std::vector<std::string> defenses;
  bool benign = false;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  const pdw::RunConfig config =
      resolve_config(g, {{"eval.transcriber", a.transcriber}, {"attack.snrs", a.snrs}});
  const pdw::Manifest manifest = read_manifest_flag(a.manifest, "--manifest");
  std::vector<pdw::Defense> defenses;
  for (const auto& spec : a.defenses.empty() ? std::vector<std::string>{"none"} : a.defenses) {
    defenses.push_back(pdw::parse_defense(spec));
  }
  std::vector<pdw::Condition> conditions;
  if (a.benign || (!g.config_path.empty() && config.benign)) {
    conditions.push_back(pdw::Condition::benign());
  }
  for (double s : config.attack_snrs) conditions.push_back(pdw::Condition::attack(s));
  if (conditions.empty()) throw pdw::ConfigError("--snrs", "no conditions requested (give --snrs and/or --benign)");
  const auto transcriber = pdw::make_transcriber(config.transcriber, &manifest);
  const fs::path out = output_dir(a.out, "eval");
  progress("eval: " + std::to_string(defenses.size()) + " defenses x " +
           std::to_string(conditions.size()) + " conditions x " + std::to_string(manifest.size()) +
           " utterances");
  const pdw::EvalReport report = pdw::evaluate(manifest, *transcriber, defenses, conditions, g.jobs);
  pdw::write_report(report, out);
  std::cout << pdw::format_wer_table(report.rows);
  std::size_t failures = 0;
  for (const auto& row : report.rows) failures += row.failures;
  if (failures) progress("eval: " + std::to_string(failures) + " utterance evaluations failed (see utterances.jsonl)");
  return 0;
}

struct ReportArgs {
  std::optional<std::string> in, baseline, out;
};

int cmd_report(const Globals&, const ReportArgs& a) {
  const fs::path in = require(a.in, "--in");
  if (!fs::is_regular_file(in / "report.csv")) throw pdw::ConfigError("--in", "no report.csv in " + in.string());
  const pdw::EvalReport report = pdw::read_report(in);
  const std::string baseline = a.baseline.value_or("none");
  const fs::path out = a.out ? fs::path(*a.out) : in;
  fs::create_directories(out);
  const std::string table = pdw::format_wer_table(report.rows);
  const std::string improvement = pdw::format_improvement_table(report.rows, baseline);
  {
    std::ofstream f(out / "wer_table.tsv", std::ios::binary);
    f << table;
  }
  {
    std::ofstream f(out / "improvement.tsv", std::ios::binary);
    f << improvement;
    if (!f) throw pdw::IoError("cannot write " + (out / "improvement.tsv").string());
  }
  std::cout << "WER (%)\n" << table << "\nrelative improvement over " << baseline << " (%)\n" << improvement;
  return 0;
}

// ---- gradcheck -----------------------------------------------------------

struct GradcheckArgs {
  std::optional<std::string> seed, coords;
};

int cmd_gradcheck(const Globals&, const GradcheckArgs& a) {
  const long long seed = a.seed ? int_flag(*a.seed, "--seed") : 7;
  pdw::GradCheckOptions options;
  if (a.coords) options.max_coords = static_cast<std::size_t>(int_flag(*a.coords, "--coords"));
  const auto entries = pdw::run_gradcheck_suite(static_cast<std::uint64_t>(seed), options);
  bool ok = true;
  for (const auto& e : entries) {
    std::printf("%-36s rel_error %.3e checked %zu skipped %zu %s\n", e.name.c_str(), e.rel_error,
                e.checked, e.skipped, e.passed() ? "ok" : "FAIL");
    ok = ok && e.passed();
  }
  return ok ? 0 : kExitRuntime;
}

// ---- pipeline ------------------------------------------------------------

struct PipelineArgs {
  std::optional<std::string> seed, out, n, epochs, snrs, transcriber;
};

int cmd_pipeline(const Globals& g, const PipelineArgs& a) {
  const pdw::RunConfig config = resolve_config(g, {{"run.seed", a.seed},
                                                   {"run.output_dir", a.out},
                                                   {"corpus.size", a.n},
                                                   {"train.epochs", a.epochs},
                                                   {"attack.snrs", a.snrs},
                                                   {"eval.transcriber", a.transcriber}});
  const pdw::PipelineResult r = pdw::run_pipeline(config, progress);
  std::cout << pdw::format_wer_table(r.report.rows);
  return 0;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdw: adversarial robustness workbench for speech pipelines"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "Run configuration file");
  app.fallthrough();

  std::function<int()> run;

  auto* corpus = app.add_subcommand("corpus", "Synthetic corpus generation and augmentation");
  corpus->require_subcommand(1);
  CorpusGenArgs gen;
  auto* gen_cmd = corpus->add_subcommand("gen", "Generate a synthetic corpus");
  gen_cmd->add_option("--n", gen.n, "Number of utterances");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->callback([&] { run = [&] { return cmd_corpus_gen(g, gen); }; });
  CorpusAugmentArgs aug;
  auto* aug_cmd = corpus->add_subcommand("augment", "Add white/pink noise at 18-30 dB");
  aug_cmd->add_option("--seed", aug.seed, "Seed");
  aug_cmd->add_option("--in", aug.in, "Input manifest");
  aug_cmd->add_option("--out", aug.out, "Output directory");
  aug_cmd->callback([&] { run = [&] { return cmd_corpus_augment(g, aug); }; });

  AttackArgs atk;
  auto* atk_cmd = app.add_subcommand("attack", "Kenansville spectral attack at a target SNR");
  atk_cmd->add_option("--snr", atk.snr, "Target SNR (dB)");
  atk_cmd->add_option("--in", atk.in, "Input manifest");
  atk_cmd->add_option("--out", atk.out, "Output directory");
  atk_cmd->callback([&] { run = [&] { return cmd_attack(g, atk); }; });

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train the denoiser with the composite loss");
  tr_cmd->add_option("--noisy", tr.noisy, "Noisy manifest (entries name their clean source_id)");
  tr_cmd->add_option("--clean", tr.clean, "Clean manifest");
  tr_cmd->add_option("--out", tr.out, "Checkpoint directory");
  tr_cmd->add_option("--resume", tr.resume, "Resume from a checkpoint");
  tr_cmd->add_option("--embedding", tr.embedding, "Perceptual embedding file");
  tr_cmd->add_option("--seed", tr.seed, "Seed");
  tr_cmd->add_option("--epochs", tr.epochs, "Total epochs");
  tr_cmd->add_option("--batch", tr.batch, "Batch size");
  tr_cmd->add_option("--lr", tr.lr, "Learning rate");
  tr_cmd->add_option("--alpha", tr.alpha, "L1 weight");
  tr_cmd->add_option("--beta", tr.beta, "Multi-resolution STFT weight");
  tr_cmd->add_option("--gamma", tr.gamma, "Perceptual weight");
  tr_cmd->add_option("--phase1-epochs", tr.phase1_epochs, "Epochs trained with gamma = 0");
  tr_cmd->add_option("--phase1-lr", tr.phase1_lr, "Learning rate of the first phase");
  tr_cmd->add_option("--segment", tr.segment, "Random crop length in samples (0 = whole)");
  tr_cmd->add_option("--clip", tr.clip, "Gradient L2-norm clip (0 disables)");
  tr_cmd->callback([&] { run = [&] { return cmd_train(g, tr); }; });

  DenoiseArgs dn;
  auto* dn_cmd = app.add_subcommand("denoise", "Apply a defense chain to a manifest");
  dn_cmd->add_option("--defense", dn.defense, "Defense chain, e.g. denoiser:ckpt or specsub");
  dn_cmd->add_option("--in", dn.in, "Input manifest");
  dn_cmd->add_option("--out", dn.out, "Output directory");
  dn_cmd->callback([&] { run = [&] { return cmd_denoise(g, dn); }; });

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Attack, defend, transcribe and score");
  ev_cmd->add_option("--manifest", ev.manifest, "Clean manifest with transcripts");
  ev_cmd->add_option("--transcriber", ev.transcriber, "rule | lookup[:path] | cmd:<program>");
  ev_cmd->add_option("--defense", ev.defenses, "[label=]chain; repeatable");
  ev_cmd->add_option("--snrs", ev.snrs, "Comma-separated attack SNRs");
  ev_cmd->add_flag("--benign", ev.benign, "Include the unattacked condition");
  ev_cmd->add_option("--out", ev.out, "Output directory");
  ev_cmd->callback([&] { run = [&] { return cmd_eval(g, ev); }; });

  ReportArgs rp;
  auto* rp_cmd = app.add_subcommand("report", "WER and relative-improvement tables");
  rp_cmd->add_option("--in", rp.in, "Evaluation output directory");
  rp_cmd->add_option("--baseline", rp.baseline, "Baseline defense (default none)");
  rp_cmd->add_option("--out", rp.out, "Output directory (default --in)");
  rp_cmd->callback([&] { run = [&] { return cmd_report(g, rp); }; });

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gc_cmd->add_option("--seed", gc.seed, "Seed");
  gc_cmd->add_option("--coords", gc.coords, "Sampled coordinates per loss (0 = all)");
  gc_cmd->callback([&] { run = [&] { return cmd_gradcheck(g, gc); }; });

  PipelineArgs pl;
  auto* pl_cmd = app.add_subcommand("pipeline", "corpus -> attack -> train -> eval -> report");
  pl_cmd->add_option("--seed", pl.seed, "Seed");
  pl_cmd->add_option("--out", pl.out, "Output directory");
  pl_cmd->add_option("--n", pl.n, "Evaluation corpus size");
  pl_cmd->add_option("--epochs", pl.epochs, "Training epochs");
  pl_cmd->add_option("--snrs", pl.snrs, "Comma-separated attack SNRs");
  pl_cmd->add_option("--transcriber", pl.transcriber, "Transcriber spec");
  pl_cmd->callback([&] { run = [&] { return cmd_pipeline(g, pl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "pdw: error kind=config field=args reason=\"" << one_line(e.what()) << "\"\n";
    return kExitConfig;
  }

  try {
    return run ? run() : kExitConfig;
  } catch (const pdw::ConfigError& e) {
    std::cerr << "pdw: error kind=config field=" << e.field() << " reason=\"" << one_line(e.reason())
              << "\"\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "pdw: error kind=runtime reason=\"" << one_line(e.what()) << "\"\n";
    return kExitRuntime;
  }
}
