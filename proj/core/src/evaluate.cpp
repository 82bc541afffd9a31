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

#include "pdw/evaluate.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pdw/attack.hpp"
#include "pdw/checkpoint.hpp"
#include "pdw/error.hpp"
#include "pdw/format.hpp"
#include "pdw/parallel.hpp"
#include "pdw/wav.hpp"
#include "pdw/wer.hpp"

namespace pdw {
namespace {

using Json = nlohmann::json;

constexpr const char* kCsvHeader =
    "defense,condition,wer_pct,utterances,ref_words,substitutions,deletions,insertions,failures";

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  const long long v = parse_int(text, what);
  if (v < 0) throw FormatError(what + ": negative count");
  return static_cast<std::size_t>(v);
}

std::shared_ptr<const DefenseStage> parse_stage(const std::string& stage) {
  if (stage.starts_with("denoiser:")) {
    const std::string path = stage.substr(9);
    if (path.empty()) throw ConfigError("defense", "denoiser stage needs a checkpoint path");
    try {
      return std::make_shared<DenoiserStage>(load_checkpoint(path).model);
    } catch (const Error& e) {
      throw ConfigError("defense", e.what());
    }
  }
  if (stage == "specsub" || stage.starts_with("specsub:")) {
    SpectralSubtractionParams params;
    if (stage.size() > 7) {
      const long long frames = parse_int(stage.substr(8), "specsub noise frames");
      if (frames < 1) throw ConfigError("defense", "specsub needs at least one noise frame");
      params.noise_floor_frames = static_cast<std::size_t>(frames);
    }
    return std::make_shared<SpectralSubtractionStage>(params);
  }
  throw ConfigError("defense", "unknown defense stage '" + stage +
                                   "' (expected none, denoiser:<ckpt> or specsub[:frames])");
}

}  // namespace

AudioBuffer Defense::apply(const AudioBuffer& audio) const {
  AudioBuffer out = audio;
  for (const auto& s : stages) out = s->apply(out);
  return out;
}

Defense parse_defense(const std::string& spec) {
  Defense d;
  std::string chain = spec;
  const auto eq = spec.find('=');
  if (eq != std::string::npos) {
    d.name = trim(spec.substr(0, eq));
    chain = spec.substr(eq + 1);
    if (d.name.empty()) throw ConfigError("defense", "empty defense label in '" + spec + "'");
  } else {
    d.name = spec;
  }
  if (d.name.find_first_of(",\t\n\"") != std::string::npos) {
    throw ConfigError("defense", "defense label may not contain commas, tabs or quotes");
  }
  for (const std::string& raw : split(chain, '+')) {
    const std::string stage = trim(raw);
    if (stage.empty()) throw ConfigError("defense", "empty stage in '" + spec + "'");
    if (stage == "none") continue;
    try {
      d.stages.push_back(parse_stage(stage));
    } catch (const FormatError& e) {
      throw ConfigError("defense", e.what());
    }
  }
  return d;
}

std::string Condition::label() const { return snr_db ? format_double(*snr_db) : "benign"; }

Condition Condition::parse(const std::string& label) {
  if (label == "benign") return benign();
  const double db = parse_double(label, "condition");
  if (!std::isfinite(db) || db <= 0.0) throw FormatError("condition: attack SNR must be finite and > 0");
  return attack(db);
}

double ReportRow::wer_pct() const {
  if (reference_words == 0) return 0.0;
  return 100.0 * static_cast<double>(substitutions + deletions + insertions) /
         static_cast<double>(reference_words);
}

const ReportRow* EvalReport::find(const std::string& defense, const std::string& condition) const {
  for (const auto& r : rows) {
    if (r.defense == defense && r.condition == condition) return &r;
  }
  return nullptr;
}

EvalReport evaluate(const Manifest& manifest, const Transcriber& transcriber,
                    const std::vector<Defense>& defenses, const std::vector<Condition>& conditions,
                    int jobs) {
  std::set<std::string> names;
  for (const auto& d : defenses) {
    if (!names.insert(d.name).second) {
      throw ConfigError("defense", "duplicate defense name '" + d.name + "'");
    }
  }
  const std::size_t n_utt = manifest.size();
  const std::size_t n_def = defenses.size();
  const std::size_t n_cond = conditions.size();
  // records[(c * n_utt + u) * n_def + d]
  std::vector<UtteranceRecord> records(n_cond * n_utt * n_def);

  parallel_for(n_cond * n_utt, jobs, [&](std::size_t task) {
    const std::size_t c = task / n_utt;
    const std::size_t u = task % n_utt;
    const Utterance& utt = manifest.entries[u];
    const Condition& cond = conditions[c];
    UtteranceRecord base;
    base.condition = cond.label();
    base.id = utt.id;
    base.reference = utt.transcript;

    AudioBuffer input;
    std::string input_error;
    try {
      input = load_wav(manifest.resolve(utt));
      if (cond.snr_db) {
        AttackResult r = kenansville_attack(input, KenansvilleParams{*cond.snr_db});
        base.achieved_snr = r.achieved_snr;
        input = std::move(r.adversarial);
      }
    } catch (const std::exception& e) {
      input_error = e.what();
    }
    for (std::size_t d = 0; d < n_def; ++d) {
      UtteranceRecord rec = base;
      rec.defense = defenses[d].name;
      if (!input_error.empty()) {
        rec.error = input_error;
      } else {
        try {
          rec.hypothesis = transcriber.transcribe(defenses[d].apply(input), utt.id);
          const WerResult w = wer(rec.reference, rec.hypothesis);
          rec.substitutions = w.substitutions;
          rec.deletions = w.deletions;
          rec.insertions = w.insertions;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
      }
      records[(c * n_utt + u) * n_def + d] = std::move(rec);
    }
  });

  EvalReport report;
  for (std::size_t d = 0; d < n_def; ++d) {
    for (std::size_t c = 0; c < n_cond; ++c) {
      ReportRow row;
      row.defense = defenses[d].name;
      row.condition = conditions[c].label();
      for (std::size_t u = 0; u < n_utt; ++u) {
        const UtteranceRecord& rec = records[(c * n_utt + u) * n_def + d];
        if (!rec.error.empty()) {
          ++row.failures;
          continue;
        }
        ++row.utterances;
        row.reference_words += rec.reference.size();
        row.substitutions += rec.substitutions;
        row.deletions += rec.deletions;
        row.insertions += rec.insertions;
      }
      report.rows.push_back(row);
      for (std::size_t u = 0; u < n_utt; ++u) {
        report.utterances.push_back(std::move(records[(c * n_utt + u) * n_def + d]));
      }
    }
  }
  return report;
}

std::optional<double> relative_improvement(double base_wer, double target_wer) {
  if (base_wer == 0.0) return std::nullopt;
  return 100.0 * (base_wer - target_wer) / base_wer;
}

std::map<std::string, std::optional<double>> relative_improvement(const EvalReport& report,
                                                                  const std::string& baseline,
                                                                  const std::string& target) {
  std::map<std::string, std::optional<double>> out;
  for (const auto& row : report.rows) {
    if (row.defense != baseline) continue;
    const ReportRow* t = report.find(target, row.condition);
    if (!t) continue;
    out[row.condition] = relative_improvement(row.wer_pct(), t->wer_pct());
  }
  return out;
}

std::string format_report_csv(const EvalReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += r.defense + "," + r.condition + "," + format_double(r.wer_pct()) + "," +
           std::to_string(r.utterances) + "," + std::to_string(r.reference_words) + "," +
           std::to_string(r.substitutions) + "," + std::to_string(r.deletions) + "," +
           std::to_string(r.insertions) + "," + std::to_string(r.failures) + "\n";
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text, const std::string& origin) {
  std::vector<ReportRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader) throw FormatError(origin + ":1: unexpected header");
      continue;
    }
    const auto f = split(line, ',');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (f.size() != 9) throw FormatError(where + ": expected 9 fields, got " + std::to_string(f.size()));
    ReportRow r;
    r.defense = f[0];
    r.condition = f[1];
    r.utterances = parse_count(f[3], where + ": utterances");
    r.reference_words = parse_count(f[4], where + ": ref_words");
    r.substitutions = parse_count(f[5], where + ": substitutions");
    r.deletions = parse_count(f[6], where + ": deletions");
    r.insertions = parse_count(f[7], where + ": insertions");
    r.failures = parse_count(f[8], where + ": failures");
    if (parse_double(f[2], where + ": wer_pct") != r.wer_pct()) {
      throw FormatError(where + ": wer_pct does not match the stored error totals");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_utterance_log(const std::vector<UtteranceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    Json j;
    j["defense"] = r.defense;
    j["condition"] = r.condition;
    j["id"] = r.id;
    if (r.achieved_snr) {
      if (r.achieved_snr->is_infinite()) {
        j["achieved_snr_db"] = "inf";
      } else {
        j["achieved_snr_db"] = r.achieved_snr->db();
      }
    }
    j["reference"] = join_words(r.reference);
    j["hypothesis"] = join_words(r.hypothesis);
    j["substitutions"] = r.substitutions;
    j["deletions"] = r.deletions;
    j["insertions"] = r.insertions;
    if (!r.error.empty()) j["error"] = r.error;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<UtteranceRecord> parse_utterance_log(const std::string& text, const std::string& origin) {
  std::vector<UtteranceRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    try {
      const Json j = Json::parse(line);
      UtteranceRecord r;
      r.defense = j.at("defense").get<std::string>();
      r.condition = j.at("condition").get<std::string>();
      r.id = j.at("id").get<std::string>();
      if (j.contains("achieved_snr_db")) {
        const Json& s = j.at("achieved_snr_db");
        r.achieved_snr = s.is_string() ? SnrDb::parse(s.get<std::string>())
                                       : SnrDb::finite(s.get<double>());
      }
      r.reference = split_whitespace(j.at("reference").get<std::string>());
      r.hypothesis = split_whitespace(j.at("hypothesis").get<std::string>());
      r.substitutions = j.at("substitutions").get<std::size_t>();
      r.deletions = j.at("deletions").get<std::size_t>();
      r.insertions = j.at("insertions").get<std::size_t>();
      if (j.contains("error")) r.error = j.at("error").get<std::string>();
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::vector<std::string> ordered_unique(const std::vector<ReportRow>& rows, bool defenses) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    const std::string& key = defenses ? r.defense : r.condition;
    if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
  }
  return out;
}

const ReportRow* find_row(const std::vector<ReportRow>& rows, const std::string& defense,
                          const std::string& condition) {
  for (const auto& r : rows) {
    if (r.defense == defense && r.condition == condition) return &r;
  }
  return nullptr;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string format_wer_table(const std::vector<ReportRow>& rows) {
  const auto defenses = ordered_unique(rows, true);
  const auto conditions = ordered_unique(rows, false);
  std::string out = "defense";
  for (const auto& c : conditions) out += "\t" + c;
  out += "\n";
  for (const auto& d : defenses) {
    out += d;
    for (const auto& c : conditions) {
      const ReportRow* r = find_row(rows, d, c);
      out += "\t" + (r ? fixed2(r->wer_pct()) : std::string("NA"));
    }
    out += "\n";
  }
  return out;
}

std::string format_improvement_table(const std::vector<ReportRow>& rows, const std::string& baseline) {
  const auto defenses = ordered_unique(rows, true);
  const auto conditions = ordered_unique(rows, false);
  std::string out = "defense";
  for (const auto& c : conditions) out += "\t" + c;
  out += "\n";
  for (const auto& d : defenses) {
    if (d == baseline) continue;
    out += d;
    for (const auto& c : conditions) {
      const ReportRow* b = find_row(rows, baseline, c);
      const ReportRow* t = find_row(rows, d, c);
      std::optional<double> v;
      if (b && t) v = relative_improvement(b->wer_pct(), t->wer_pct());
      out += "\t" + (v ? fixed2(*v) : std::string("NA"));
    }
    out += "\n";
  }
  return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.csv", format_report_csv(report));
  write_text(dir / "utterances.jsonl", format_utterance_log(report.utterances));
  write_text(dir / "wer_table.tsv", format_wer_table(report.rows));
}

EvalReport read_report(const std::filesystem::path& dir) {
  EvalReport report;
  report.rows = parse_report_csv(read_text(dir / "report.csv"), (dir / "report.csv").string());
  const auto log = dir / "utterances.jsonl";
  if (std::filesystem::exists(log)) report.utterances = parse_utterance_log(read_text(log), log.string());
  return report;
}

}  // namespace pdw
