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

// Labelled synthetic seismic / well-log pairs from 1-D layered earth models.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bandext/core.hpp"
#include "bandext/dsp.hpp"

namespace bandext::synth {

enum class Facies { BlockySand = 0, ThinBeds = 1, Shale = 2 };
inline constexpr std::size_t kFaciesCount = 3;

std::string_view to_string(Facies facies);
Facies parse_facies(std::string_view text);

struct Layer {
  double thickness_ms = 0.0;
  double impedance = 0.0;
  friend bool operator==(const Layer&, const Layer&) = default;
};

struct EarthModel {
  std::vector<Layer> layers;
  Facies facies = Facies::BlockySand;
  std::uint64_t seed = 0;

  double total_thickness_ms() const;
  friend bool operator==(const EarthModel&, const EarthModel&) = default;
};

// Thickness range per facies, milliseconds.
struct ThicknessRange {
  double lo;
  double hi;
};
ThicknessRange thickness_range(Facies facies);

struct TieMix {
  std::size_t good = 9;
  std::size_t fair = 2;
  std::size_t poor = 1;
  std::size_t total() const { return good + fair + poor; }
};

// Parameters of the tie degradations. Fair: circular shift plus additive
// noise; Poor: polarity flip of a contiguous half plus a larger shift.
struct DegradeConfig {
  double fair_shift_min_ms = 6.0;
  double fair_shift_max_ms = 12.0;
  double fair_noise_fraction = 1.5;
  double poor_shift_min_ms = 16.0;
  double poor_shift_max_ms = 30.0;
};

struct SynthConfig {
  std::size_t n_pairs = 12;
  TieMix tie_mix{};
  // Proportions of BlockySand, ThinBeds, Shale.
  std::array<double, kFaciesCount> facies_mix{0.5, 0.25, 0.25};
  double noise_rms_fraction = 0.05;
  double wavelet_peak_hz = 25.0;
  dsp::TrapezoidBand seismic_band = dsp::bands::kSeismic;
  dsp::TrapezoidBand broadband_band = dsp::bands::kBroadband;
  std::size_t n_samples = kCanonicalTraceLength;
  double dt_ms = kCanonicalDtMs;
  DegradeConfig degrade{};
  std::uint64_t seed = 20190101;
};

// Throws ModelError on inconsistent counts, proportions or ranges.
void validate_config(const SynthConfig& cfg);

SynthConfig config_from_json(const std::string& json_text);
std::string config_to_json(const SynthConfig& cfg);

// Draws layers until they cover duration_ms. Deterministic in (facies, seed).
EarthModel gen_earth_model(Facies facies, std::uint64_t seed, double duration_ms = 1024.0);

// Normal-incidence reflection coefficients placed at the nearest sample.
Trace reflectivity_series(const EarthModel& model, double dt_ms, std::size_t n);

// Centred Ricker half-length used by forward_model.
std::size_t wavelet_half_len(double f_peak_hz, double dt_ms);

// Convolves with a centred, odd-length kernel and keeps the input span.
std::vector<double> convolve_same(const std::vector<double>& signal, const std::vector<double>& kernel);

TracePair forward_model(const Trace& reflectivity, const SynthConfig& cfg, std::uint64_t seed);

struct DegradeOutcome {
  TracePair pair;
  long shift_samples = 0;
  // Start and length of the polarity-flipped window (Poor only).
  std::size_t flip_start = 0;
  std::size_t flip_len = 0;
};

DegradeOutcome degrade_tie_detailed(const TracePair& pair, TieClass target, std::uint64_t seed,
                                    const DegradeConfig& cfg = {});
TracePair degrade_tie(const TracePair& pair, TieClass target, std::uint64_t seed,
                      const DegradeConfig& cfg = {});

struct GeneratedPair {
  TracePair pair;
  Facies facies = Facies::BlockySand;
  EarthModel model;
};

// Builds every pair in memory; gen_dataset writes them out.
std::vector<GeneratedPair> gen_pairs(const SynthConfig& cfg);

// Writes <well>_seismic.bxt, <well>_log.bxt and manifest.json into out_dir.
DatasetManifest gen_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

// Integer counts from proportions by largest remainder; sums to total.
std::vector<std::size_t> apportion(const std::vector<double>& proportions, std::size_t total);

}  // namespace bandext::synth
