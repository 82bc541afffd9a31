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

#include "pdw/transcriber.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "pdw/corpus.hpp"
#include "pdw/fft.hpp"
#include "pdw/format.hpp"
#include "pdw/stft.hpp"
#include "pdw/wav.hpp"

extern char** environ;

namespace pdw {
namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa <= 0.0 || bb <= 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

}  // namespace

struct RuleBasedTranscriber::TemplateCache {
  std::mutex mutex;
  std::map<std::size_t, std::vector<std::vector<double>>> by_length;
};

RuleBasedTranscriber::RuleBasedTranscriber(RuleBasedParams params)
    : params_(params), cache_(std::make_shared<TemplateCache>()) {
  if (params_.frame_samples == 0 || params_.boundary_frames == 0) {
    throw InvalidArgument("rule transcriber: frame and boundary sizes must be positive");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> RuleBasedTranscriber::segment(
    const AudioBuffer& audio) const {
  const std::size_t fs = params_.frame_samples;
  const std::size_t frames = (audio.size() + fs - 1) / fs;
  std::vector<bool> silent(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t b = f * fs;
    const std::size_t e = std::min(audio.size(), b + fs);
    double sq = 0.0;
    for (std::size_t i = b; i < e; ++i) sq += audio.samples[i] * audio.samples[i];
    silent[f] = std::sqrt(sq / static_cast<double>(e - b)) < params_.silence_rms;
  }
  // Frames inside a long enough silent run are boundaries; everything
  // else belongs to a word.
  std::vector<bool> boundary(frames, false);
  for (std::size_t f = 0; f < frames;) {
    if (!silent[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < frames && silent[g]) ++g;
    if (g - f >= params_.boundary_frames) {
      for (std::size_t k = f; k < g; ++k) boundary[k] = true;
    }
    f = g;
  }
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t f = 0; f < frames;) {
    if (boundary[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < frames && !boundary[g]) ++g;
    // Trim silent edge frames that were too short to count as a boundary.
    std::size_t b = f, e = g;
    while (b < e && silent[b]) ++b;
    while (e > b && silent[e - 1]) --e;
    if (e - b >= params_.min_segment_frames) {
      spans.emplace_back(b * fs, std::min(audio.size(), e * fs));
    }
    f = g;
  }
  return spans;
}

std::vector<double> RuleBasedTranscriber::band_spectrum(std::span<const double> segment) const {
  const std::size_t n = next_pow2(std::max(params_.fft_size, segment.size()));
  const std::vector<double> w = make_window(WindowKind::kHann, segment.size());
  std::vector<Complex> buf(n);
  for (std::size_t i = 0; i < segment.size(); ++i) buf[i] = Complex(w[i] * segment[i], 0.0);
  FftPlan::get(n).forward(buf);
  const double hz_per_bin = static_cast<double>(kSampleRate) / static_cast<double>(n);
  const auto lo = static_cast<std::size_t>(std::ceil(params_.band_low_hz / hz_per_bin));
  const auto hi = static_cast<std::size_t>(std::floor(params_.band_high_hz / hz_per_bin));
  std::vector<double> mag;
  mag.reserve(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) mag.push_back(std::abs(buf[k]));
  return mag;
}

const std::vector<std::vector<double>>& RuleBasedTranscriber::templates(std::size_t length) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    const auto it = cache_->by_length.find(length);
    if (it != cache_->by_length.end()) return it->second;
  }
  const std::array<double, kHarmonics> phases{};
  const std::size_t ramp = static_cast<std::size_t>(0.015 * kSampleRate);
  std::vector<std::vector<double>> spectra;
  spectra.reserve(kCodebookSize);
  for (const auto& entry : codebook()) {
    spectra.push_back(band_spectrum(synthesize_word(entry, length, 0.4, phases, ramp)));
  }
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->by_length.emplace(length, std::move(spectra)).first->second;
}

std::pair<std::string, double> RuleBasedTranscriber::classify(std::span<const double> segment) const {
  const std::vector<double> spec = band_spectrum(segment);
  const auto& tmpl = templates(segment.size());
  std::string best = kUnknownWord;
  double best_sim = -1.0;
  for (std::size_t k = 0; k < kCodebookSize; ++k) {
    const double sim = cosine(spec, tmpl[k]);
    if (sim > best_sim) {
      best_sim = sim;
      best = codebook()[k].label;
    }
  }
  if (best_sim < params_.min_similarity) best = kUnknownWord;
  return {best, best_sim};
}

std::vector<std::string> RuleBasedTranscriber::transcribe(const AudioBuffer& audio,
                                                          const std::string&) const {
  validate(audio);
  std::vector<std::string> words;
  for (const auto& [b, e] : segment(audio)) {
    words.push_back(classify(std::span<const double>(audio.samples).subspan(b, e - b)).first);
  }
  return words;
}

LookupTranscriber::LookupTranscriber(std::map<std::string, std::vector<std::string>> table)
    : table_(std::move(table)) {}

LookupTranscriber LookupTranscriber::from_manifest(const Manifest& manifest) {
  std::map<std::string, std::vector<std::string>> table;
  for (const auto& u : manifest.entries) table[u.id] = u.transcript;
  return LookupTranscriber(std::move(table));
}

std::vector<std::string> LookupTranscriber::transcribe(const AudioBuffer&,
                                                       const std::string& id) const {
  const auto it = table_.find(id);
  if (it == table_.end()) throw TranscriptionError("lookup: no transcript for id '" + id + "'");
  return it->second;
}

ExternalCommandTranscriber::ExternalCommandTranscriber(std::vector<std::string> argv)
    : argv_(std::move(argv)) {
  if (argv_.empty()) throw InvalidArgument("external transcriber: empty command");
}

std::string ExternalCommandTranscriber::describe() const {
  std::string out = "cmd:";
  for (std::size_t i = 0; i < argv_.size(); ++i) {
    if (i) out += ' ';
    out += argv_[i];
  }
  return out;
}

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) throw TranscriptionError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_end(0);
    close_end(1);
  }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
};

}  // namespace

std::vector<std::string> ExternalCommandTranscriber::transcribe(const AudioBuffer& audio,
                                                                const std::string&) const {
  ignore_sigpipe_once();
  const std::vector<std::uint8_t> input = encode_wav(audio, WavFormat::kPcm16);
  Pipe in, out, err;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.fd[1], STDERR_FILENO);

  std::vector<char*> args;
  for (const auto& a : argv_) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw TranscriptionError("cannot start '" + argv_[0] + "': " + std::strerror(rc));
  }
  in.close_end(0);
  out.close_end(1);
  err.close_end(1);
  ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);

  std::string stdout_text, stderr_text;
  std::size_t written = 0;
  char chunk[4096];
  bool out_open = true, err_open = true;
  while (out_open || err_open) {
    pollfd fds[3];
    nfds_t count = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_open) { out_idx = static_cast<int>(count); fds[count++] = {out.fd[0], POLLIN, 0}; }
    if (err_open) { err_idx = static_cast<int>(count); fds[count++] = {err.fd[0], POLLIN, 0}; }
    if (in.fd[1] >= 0) { in_idx = static_cast<int>(count); fds[count++] = {in.fd[1], POLLOUT, 0}; }
    if (::poll(fds, count, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (in_idx >= 0 && fds[in_idx].revents) {
      const ssize_t n = ::write(in.fd[1], input.data() + written, input.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN && errno != EINTR) written = input.size();  // reader gone
      if (written >= input.size()) in.close_end(1);
    }
    auto drain = [&](int idx, int fd, std::string& into, bool& open) {
      if (idx < 0 || !fds[idx].revents) return;
      const ssize_t n = ::read(fd, chunk, sizeof(chunk));
      if (n > 0) {
        into.append(chunk, static_cast<std::size_t>(n));
      } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
        open = false;
      }
    };
    drain(out_idx, out.fd[0], stdout_text, out_open);
    drain(err_idx, err.fd[0], stderr_text, err_open);
  }
  in.close_end(1);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::string reason = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                           : "killed by signal " + std::to_string(WTERMSIG(status));
    std::string tail = trim(stderr_text.size() > 400 ? stderr_text.substr(stderr_text.size() - 400)
                                                     : stderr_text);
    for (char& c : tail) {
      if (c == '\n' || c == '\t') c = ' ';
    }
    throw TranscriptionError("'" + argv_[0] + "' failed with " + reason +
                             (tail.empty() ? "" : ": " + tail));
  }
  return split_whitespace(to_lower(stdout_text));
}

namespace {

std::map<std::string, std::vector<std::string>> read_lookup_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("transcriber", "cannot read lookup table " + path);
  std::map<std::string, std::vector<std::string>> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("transcriber", path + ":" + std::to_string(line_no) +
                                           ": expected <id><TAB><transcript>");
    }
    table[line.substr(0, tab)] = split_whitespace(line.substr(tab + 1));
  }
  return table;
}

}  // namespace

std::unique_ptr<Transcriber> make_transcriber(const std::string& spec, const Manifest* manifest) {
  if (spec == "rule") return std::make_unique<RuleBasedTranscriber>();
  if (spec == "lookup") {
    if (!manifest) throw ConfigError("transcriber", "bare 'lookup' needs a manifest");
    return std::make_unique<LookupTranscriber>(LookupTranscriber::from_manifest(*manifest));
  }
  if (spec.starts_with("lookup:")) {
    return std::make_unique<LookupTranscriber>(read_lookup_table(spec.substr(7)));
  }
  if (spec.starts_with("cmd:")) {
    std::vector<std::string> argv = split_whitespace(spec.substr(4));
    if (argv.empty()) throw ConfigError("transcriber", "'cmd:' needs a program");
    return std::make_unique<ExternalCommandTranscriber>(std::move(argv));
  }
  throw ConfigError("transcriber", "unknown transcriber '" + spec +
                                       "' (expected rule, lookup[:path] or cmd:<program>)");
}

}  // namespace pdw
