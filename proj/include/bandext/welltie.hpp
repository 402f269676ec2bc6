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

// Seismic-to-well tie scoring on amplitude and character, and training-pair
// selection.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bandext/core.hpp"
#include "bandext/dsp.hpp"

namespace bandext::welltie {

struct TieScore {
  double amplitude_score = 0.0;  // [0, 1]
  double character_score = 0.0;  // [-1, 1], signed at the best |corr| lag
  double best_lag_ms = 0.0;      // seismic(t) ~ synthetic(t - lag)
};

struct TieOptions {
  dsp::TrapezoidBand seismic_band = dsp::bands::kSeismic;
  double max_lag_ms = 20.0;
  // When set, the log is convolved with a Ricker of this peak frequency
  // before band limiting, giving the usual well synthetic.
  std::optional<double> wavelet_peak_hz;
};

// Throws TieError on misaligned pairs or zero-energy traces.
TieScore tie_score(const TracePair& pair, const TieOptions& options);
TieScore tie_score(const TracePair& pair, const dsp::TrapezoidBand& seismic_band, double max_lag_ms);

// The band-limited log the seismic is compared against.
std::vector<double> well_synthetic(const TracePair& pair, const TieOptions& options);

struct TieThresholds {
  double good = 0.70;
  double fair = 0.40;
};

TieClass classify_tie(const TieScore& score, const TieThresholds& thresholds = {});

struct SelectionPolicy {
  std::size_t n_good = 3;
  std::size_t n_fair = 1;
  // Poor pairs only enter training when requested explicitly and
  // exclude_poor is off.
  std::size_t n_poor = 0;
  bool exclude_poor = true;
  std::uint64_t seed = 0;
  // Wells that must stay out of the training set.
  std::set<std::string> exclude_wells;
};

struct TrainingSplit {
  std::vector<TracePair> train;
  std::vector<TracePair> validation;
};

// Seeded choice of n_good Good + n_fair Fair (+ n_poor Poor) pairs; every
// other pair is validation. Both lists keep the input order.
TrainingSplit select_training(const std::vector<TracePair>& pairs, const SelectionPolicy& policy);

}  // namespace bandext::welltie
