// Copyright 2026 The bandext Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bandext/welltie.hpp"

#include <algorithm>
#include <cmath>

#include "bandext/rng.hpp"
#include "bandext/synth.hpp"

namespace bandext::welltie {

std::vector<double> well_synthetic(const TracePair& pair, const TieOptions& options) {
  std::vector<double> log = pair.log.samples;
  if (options.wavelet_peak_hz) {
    const double f = *options.wavelet_peak_hz;
    const auto w = dsp::ricker(f, pair.log.dt_ms, synth::wavelet_half_len(f, pair.log.dt_ms));
    log = synth::convolve_same(log, w.samples);
  }
  return dsp::bandpass_trapezoid(log, pair.log.dt_ms, options.seismic_band);
}

TieScore tie_score(const TracePair& pair, const TieOptions& options) {
  validate_trace(pair.seismic);
  validate_trace(pair.log);
  if (pair.seismic.size() != pair.log.size() || pair.seismic.dt_ms != pair.log.dt_ms)
    throw TieError("pair " + pair.well_id + " is not aligned (length or dt differ)");
  const auto synthetic = well_synthetic(pair, options);
  const auto& seismic = pair.seismic.samples;
  if (rms(seismic) == 0.0 || rms(synthetic) == 0.0)
    throw TieError("pair " + pair.well_id + " has a zero-energy trace in the tie band");

  const long max_lag = static_cast<long>(std::floor(options.max_lag_ms / pair.seismic.dt_ms + 1e-9));
  double best_abs = -1.0;
  double best_corr = 0.0;
  long best_lag = 0;
  // Scan 0, -1, +1, -2, +2, ... so ties resolve toward the smallest shift.
  for (long step = 0; step <= 2 * max_lag; ++step) {
    const long lag = (step % 2 == 0) ? step / 2 : -(step + 1) / 2;
    const auto shifted = dsp::circular_shift(synthetic, lag);
    const auto c = dsp::pearson(seismic, shifted);
    if (!c) throw TieError("pair " + pair.well_id + " has a constant trace");
    if (std::abs(*c) > best_abs) {
      best_abs = std::abs(*c);
      best_corr = *c;
      best_lag = lag;
    }
  }
  const double rms_a = rms(seismic);
  const double rms_b = rms(dsp::circular_shift(synthetic, best_lag));
  return {std::min(rms_a, rms_b) / std::max(rms_a, rms_b), best_corr,
          static_cast<double>(best_lag) * pair.seismic.dt_ms};
}

TieScore tie_score(const TracePair& pair, const dsp::TrapezoidBand& seismic_band, double max_lag_ms) {
  return tie_score(pair, TieOptions{seismic_band, max_lag_ms, std::nullopt});
}

TieClass classify_tie(const TieScore& score, const TieThresholds& thresholds) {
  if (score.character_score >= thresholds.good) return TieClass::Good;
  if (score.character_score >= thresholds.fair) return TieClass::Fair;
  return TieClass::Poor;
}

TrainingSplit select_training(const std::vector<TracePair>& pairs, const SelectionPolicy& policy) {
  if (policy.n_good + policy.n_fair + policy.n_poor == 0)
    throw SelectionError("selection policy must request at least one training pair");
  if (policy.exclude_poor && policy.n_poor > 0)
    throw SelectionError("policy requests Poor pairs while excluding them");

  std::vector<std::size_t> by_class[3];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].tie_class) throw SelectionError("pair " + pairs[i].well_id + " has no tie class");
    if (policy.exclude_wells.count(pairs[i].well_id)) continue;
    by_class[static_cast<int>(*pairs[i].tie_class)].push_back(i);
  }
  const std::size_t wanted[3] = {policy.n_good, policy.n_fair, policy.n_poor};
  std::vector<bool> chosen(pairs.size(), false);
  for (int c = 0; c < 3; ++c) {
    auto& pool = by_class[c];
    if (pool.size() < wanted[c])
      throw SelectionError("requested " + std::to_string(wanted[c]) + " " +
                           std::string(to_string(static_cast<TieClass>(c))) + " pairs, only " +
                           std::to_string(pool.size()) + " available");
    Rng rng(derive_seed(policy.seed, static_cast<std::uint64_t>(c)));
    for (std::size_t i = pool.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(pool[i - 1], pool[j]);
    }
    for (std::size_t k = 0; k < wanted[c]; ++k) chosen[pool[k]] = true;
  }
  TrainingSplit split;
  for (std::size_t i = 0; i < pairs.size(); ++i) (chosen[i] ? split.train : split.validation).push_back(pairs[i]);
  return split;
}

}  // namespace bandext::welltie
