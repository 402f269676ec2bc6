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

// Broadband trace generation from seismic with trained generators, ensemble
// statistics over realizations, and whole-volume processing.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bandext/cgan.hpp"
#include "bandext/core.hpp"
#include "bandext/dsp.hpp"

namespace bandext::inference {

// Maps a condition image to an output image. Implementations must be safe
// to call concurrently from several threads.
class ImageTranslator {
 public:
  ImageTranslator(dsp::SpectrogramGeometry geometry, double image_scale)
      : geometry_(geometry), image_scale_(image_scale) {}
  virtual ~ImageTranslator() = default;

  virtual std::vector<double> translate(const std::vector<double>& image, std::uint64_t z_seed) const = 0;

  const dsp::SpectrogramGeometry& geometry() const { return geometry_; }
  double image_scale() const { return image_scale_; }

 private:
  dsp::SpectrogramGeometry geometry_;
  double image_scale_;
};

// A frozen generator run in eval mode with z drawn from Rng(z_seed).
class GeneratorTranslator : public ImageTranslator {
 public:
  explicit GeneratorTranslator(const cgan::Checkpoint& ckpt);
  std::vector<double> translate(const std::vector<double>& image, std::uint64_t z_seed) const override;
  std::uint32_t epoch() const { return epoch_; }

 private:
  std::shared_ptr<cgan::Generator> generator_;
  std::uint32_t epoch_;
};

using TranslatorList = std::vector<std::shared_ptr<const ImageTranslator>>;

TranslatorList translators_from(const std::vector<cgan::Checkpoint>& checkpoints);
TranslatorList load_translators(const std::vector<std::filesystem::path>& paths);

// normalise, image, translate, invert, denormalise. Throws GeometryError
// unless the trace has the canonical length.
Trace realize_trace(const ImageTranslator& translator, const Trace& seismic, std::uint64_t z_seed);

struct RealizationSet {
  std::string trace_id;
  std::vector<std::vector<double>> realizations;  // R rows of n samples
  std::vector<std::size_t> translator_index;
  std::vector<std::uint64_t> z_seeds;
};

struct Histogram {
  std::size_t sample_index = 0;
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
};

struct EnsembleStats {
  std::vector<double> mean;
  std::vector<double> std;  // population
  std::vector<Histogram> histograms;
  std::size_t n_realizations = 0;
};

struct Ensemble {
  EnsembleStats stats;
  RealizationSet set;
};

inline constexpr std::size_t kDefaultHistogramBins = 30;

// Per-sample mean, std and histograms over the rows of a realization set.
// Histogram range is the per-sample min/max.
EnsembleStats summarize(const RealizationSet& set, const std::vector<std::size_t>& histogram_samples,
                        std::size_t bins = kDefaultHistogramBins);

// Realization r uses translator r mod K and z seed derive_seed(seed, r).
// Throws InferenceError on an empty translator list or R == 0.
Ensemble ensemble_stats(const TranslatorList& translators, const Trace& seismic, std::size_t realizations,
                        std::uint64_t seed, const std::vector<std::size_t>& histogram_samples = {},
                        std::size_t bins = kDefaultHistogramBins);

// Seed used for the trace at key inside process_volume.
std::uint64_t trace_seed(std::uint64_t seed, const TraceKey& key);

// Every trace replaced by its ensemble mean. Traces are processed in
// parallel on `workers` threads; the result does not depend on workers.
Volume process_volume(const TranslatorList& translators, const Volume& volume, std::size_t realizations,
                      std::uint64_t seed, std::size_t workers = 1);

// sample_index,mean,std
std::string stats_csv(const EnsembleStats& stats);
// sample_index,bin,lower,upper,count
std::string histograms_csv(const EnsembleStats& stats);

}  // namespace bandext::inference
