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

#include "pdw/attack.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pdw/error.hpp"
#include "pdw/format.hpp"
#include "pdw/parallel.hpp"
#include "pdw/wav.hpp"

namespace pdw {

void KenansvilleParams::validate() const {
  if (!std::isfinite(target_snr_db) || target_snr_db <= 0.0) {
    throw InvalidArgument("attack target SNR must be finite and > 0, got " +
                          format_double(target_snr_db));
  }
}

std::vector<BinGroup> conjugate_groups(const ComplexSpectrum& spectrum) {
  const std::size_t n = spectrum.bins.size();
  std::vector<BinGroup> groups;
  groups.reserve(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const std::size_t mirror = k == 0 ? 0 : n - k;
    double p = std::norm(spectrum.bins[k]);
    if (mirror != k) p += std::norm(spectrum.bins[mirror]);
    groups.push_back({k, mirror, p});
  }
  return groups;
}

RemovalPlan plan_removal(const ComplexSpectrum& spectrum, double target_snr_db) {
  RemovalPlan plan;
  for (const auto& c : spectrum.bins) plan.total_power += std::norm(c);
  if (plan.total_power == 0.0) throw InvalidArgument("kenansville_attack: zero-energy signal");

  std::vector<BinGroup> groups = conjugate_groups(spectrum);
  std::sort(groups.begin(), groups.end(), [](const BinGroup& a, const BinGroup& b) {
    return a.power != b.power ? a.power < b.power : a.bin < b.bin;
  });
  double removed = 0.0;
  for (const auto& g : groups) {
    const double next = removed + g.power;
    // Same arithmetic as the reported SNR, so achieved >= target holds exactly.
    if (next > 0.0 && 10.0 * std::log10(plan.total_power / next) < target_snr_db) break;
    removed = next;
    plan.removed_bins.push_back(g.bin);
  }
  plan.removed_power = removed;
  return plan;
}

AttackResult kenansville_attack(const AudioBuffer& signal, const KenansvilleParams& params) {
  params.validate();
  validate(signal);
  if (signal.size() < 2) throw InvalidArgument("kenansville_attack: signal length must be >= 2");
  ComplexSpectrum spectrum = dft(signal);
  AttackResult result;
  result.plan = plan_removal(spectrum, params.target_snr_db);
  if (result.plan.removed_power == 0.0) {
    result.adversarial = signal;
    result.achieved_snr = SnrDb::infinite();
    return result;
  }
  const std::size_t n = spectrum.bins.size();
  for (std::size_t k : result.plan.removed_bins) {
    spectrum.bins[k] = Complex(0.0, 0.0);
    if (k != 0) spectrum.bins[n - k] = Complex(0.0, 0.0);
  }
  result.adversarial = idft(spectrum, signal.sample_rate);
  result.achieved_snr =
      SnrDb::finite(10.0 * std::log10(result.plan.total_power / result.plan.removed_power));
  return result;
}

AttackBatchResult attack_corpus(const Manifest& manifest, const KenansvilleParams& params,
                                const std::filesystem::path& out_dir, int jobs) {
  params.validate();
  std::filesystem::create_directories(out_dir);
  const std::size_t n = manifest.entries.size();
  std::vector<std::optional<Utterance>> outputs(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const Utterance& u = manifest.entries[i];
    try {
      const AudioBuffer clean = load_wav(manifest.resolve(u));
      const AttackResult r = kenansville_attack(clean, params);
      const std::string name = u.id + ".wav";
      save_wav(r.adversarial, out_dir / name, WavFormat::kFloat32);
      Utterance out;
      out.id = u.id;
      out.path = name;
      out.transcript = u.transcript;
      out.snr_db = r.achieved_snr;
      out.noise_type = "kenansville";
      out.source_id = u.id;
      outputs[i] = std::move(out);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  AttackBatchResult result;
  result.manifest.base_dir = out_dir;
  for (std::size_t i = 0; i < n; ++i) {
    if (outputs[i]) {
      result.manifest.entries.push_back(std::move(*outputs[i]));
    } else {
      result.failures.push_back({manifest.entries[i].id, errors[i]});
    }
  }
  write_manifest(result.manifest, out_dir / "manifest.tsv");
  return result;
}

}  // namespace pdw
