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

#include "pdw/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

#include "pdw/error.hpp"
#include "pdw/format.hpp"

namespace pdw {
namespace {

template <typename T>
T to_count(const std::string& key, const std::string& value) {
  unsigned long long v = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (value.empty() || ec != std::errc() || ptr != end || v > std::numeric_limits<T>::max()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  }
  return static_cast<T>(v);
}

double to_real(const std::string& key, const std::string& value) {
  try {
    return parse_double(value, key);
  } catch (const FormatError&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = to_lower(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

}  // namespace

std::string format_resolutions(const MultiResConfig& config) {
  std::string out;
  for (std::size_t i = 0; i < config.resolutions.size(); ++i) {
    const auto& r = config.resolutions[i];
    if (i) out += ", ";
    out += std::to_string(r.fft_size) + ":" + std::to_string(r.hop) + ":" +
           std::to_string(r.window_len);
  }
  return out;
}

MultiResConfig parse_resolutions(const std::string& text) {
  MultiResConfig config;
  for (const std::string& item : split(text, ',')) {
    const auto parts = split(trim(item), ':');
    if (parts.size() != 3) {
      throw ConfigError("loss.resolutions", "expected fft:hop:window triples, got '" + trim(item) + "'");
    }
    StftResolution r;
    r.fft_size = to_count<std::size_t>("loss.resolutions", trim(parts[0]));
    r.hop = to_count<std::size_t>("loss.resolutions", trim(parts[1]));
    r.window_len = to_count<std::size_t>("loss.resolutions", trim(parts[2]));
    config.resolutions.push_back(r);
  }
  return config;
}

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(to_real("attack.snrs", trim(item)));
  return out;
}

std::string format_snr_list(const std::vector<double>& snrs) {
  std::string out;
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(snrs[i]);
  }
  return out;
}

namespace {

// Checks that involve a single key only.
void check_field(const RunConfig& c, const std::string& key) {
  if (key == "run.output_dir" && c.output_dir.empty()) throw ConfigError(key, "must not be empty");
  if (key == "run.jobs" && c.jobs < 1) throw ConfigError(key, "must be >= 1");
  if (key == "corpus.size" && c.corpus_size == 0) throw ConfigError(key, "must be >= 1");
  if (key == "corpus.train_size" && c.train_size == 0) throw ConfigError(key, "must be >= 1");
  if (key == "attack.snrs") {
    for (double s : c.attack_snrs) {
      if (!std::isfinite(s) || s <= 0.0) throw ConfigError(key, "every SNR must be finite and > 0");
    }
  }
  if (key == "loss.alpha" || key == "loss.beta" || key == "loss.gamma") {
    const double w = key == "loss.alpha" ? c.weights.alpha : key == "loss.beta" ? c.weights.beta : c.weights.gamma;
    if (!std::isfinite(w) || w < 0.0) throw ConfigError(key, "must be finite and >= 0");
  }
  if (key == "loss.resolutions") {
    if (c.resolutions.resolutions.empty()) throw ConfigError(key, "need at least one resolution");
    try {
      c.resolutions.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(key, e.what());
    }
  }
  if (key == "train.batch" && c.batch_size == 0) throw ConfigError(key, "must be >= 1");
  if (key == "train.learning_rate" && (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate))) {
    throw ConfigError(key, "must be positive and finite");
  }
  if (key == "train.phase1_learning_rate" &&
      (!(c.phase1_learning_rate > 0.0) || !std::isfinite(c.phase1_learning_rate))) {
    throw ConfigError(key, "must be positive and finite");
  }
  if (key == "train.segment_length" && c.segment_length != 0 && c.segment_length < 2048) {
    throw ConfigError(key, "must be 0 (whole utterances) or >= 2048 samples");
  }
  if (key == "train.clip_norm" && (!std::isfinite(c.clip_norm) || c.clip_norm < 0.0)) {
    throw ConfigError(key, "must be finite and >= 0");
  }
  if (key == "eval.transcriber" && c.transcriber.empty()) throw ConfigError(key, "must not be empty");
}

const char* const kKeys[] = {
    "run.seed",         "run.output_dir",          "run.jobs",           "corpus.size",
    "corpus.train_size", "attack.snrs",            "loss.alpha",         "loss.beta",
    "loss.gamma",       "loss.resolutions",        "train.epochs",       "train.batch",
    "train.learning_rate", "train.phase1_epochs", "train.phase1_learning_rate", "train.segment_length",
    "train.clip_norm",  "eval.transcriber",        "eval.benign"};

}  // namespace

void RunConfig::validate() const {
  for (const char* key : kKeys) check_field(*this, key);
  try {
    weights.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("loss.weights", e.what());
  }
  if (phase1_epochs > epochs) throw ConfigError("train.phase1_epochs", "exceeds train.epochs");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "run.seed") c.seed = to_count<std::uint64_t>(key, value);
  else if (key == "run.output_dir") c.output_dir = value;
  else if (key == "run.jobs") c.jobs = to_count<int>(key, value);
  else if (key == "corpus.size") c.corpus_size = to_count<std::size_t>(key, value);
  else if (key == "corpus.train_size") c.train_size = to_count<std::size_t>(key, value);
  else if (key == "attack.snrs") c.attack_snrs = parse_snr_list(value);
  else if (key == "loss.alpha") c.weights.alpha = to_real(key, value);
  else if (key == "loss.beta") c.weights.beta = to_real(key, value);
  else if (key == "loss.gamma") c.weights.gamma = to_real(key, value);
  else if (key == "loss.resolutions") c.resolutions = parse_resolutions(value);
  else if (key == "train.epochs") c.epochs = to_count<std::size_t>(key, value);
  else if (key == "train.batch") c.batch_size = to_count<std::size_t>(key, value);
  else if (key == "train.learning_rate") c.learning_rate = to_real(key, value);
  else if (key == "train.phase1_epochs") c.phase1_epochs = to_count<std::size_t>(key, value);
  else if (key == "train.phase1_learning_rate") c.phase1_learning_rate = to_real(key, value);
  else if (key == "train.segment_length") c.segment_length = to_count<std::size_t>(key, value);
  else if (key == "train.clip_norm") c.clip_norm = to_real(key, value);
  else if (key == "eval.transcriber") c.transcriber = value;
  else if (key == "eval.benign") c.benign = to_bool(key, value);
  else throw ConfigError(key, "unknown configuration key");
  check_field(c, key);
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("config", origin + ":" + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      set_config_value(config, full, trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), origin + ":" + std::to_string(line_no) + ": " + e.reason());
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), origin + ": " + e.reason());
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.string());
}

std::string serialize_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[run]\n"
      << "seed = " << c.seed << "\n"
      << "output_dir = " << c.output_dir << "\n"
      << "jobs = " << c.jobs << "\n\n"
      << "[corpus]\n"
      << "size = " << c.corpus_size << "\n"
      << "train_size = " << c.train_size << "\n\n"
      << "[attack]\n"
      << "snrs = " << format_snr_list(c.attack_snrs) << "\n\n"
      << "[loss]\n"
      << "alpha = " << format_double(c.weights.alpha) << "\n"
      << "beta = " << format_double(c.weights.beta) << "\n"
      << "gamma = " << format_double(c.weights.gamma) << "\n"
      << "resolutions = " << format_resolutions(c.resolutions) << "\n\n"
      << "[train]\n"
      << "epochs = " << c.epochs << "\n"
      << "batch = " << c.batch_size << "\n"
      << "learning_rate = " << format_double(c.learning_rate) << "\n"
      << "phase1_epochs = " << c.phase1_epochs << "\n"
      << "phase1_learning_rate = " << format_double(c.phase1_learning_rate) << "\n"
      << "segment_length = " << c.segment_length << "\n"
      << "clip_norm = " << format_double(c.clip_norm) << "\n\n"
      << "[eval]\n"
      << "transcriber = " << c.transcriber << "\n"
      << "benign = " << (c.benign ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace pdw
