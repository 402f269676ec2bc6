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

#include "bandext/inference.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <omp.h>

#include "bandext/autodiff.hpp"
#include "bandext/rng.hpp"

namespace bandext::inference {

GeneratorTranslator::GeneratorTranslator(const cgan::Checkpoint& ckpt)
    : ImageTranslator(ckpt.config().geometry, ckpt.config().image_scale),
      generator_(std::make_shared<cgan::Generator>(cgan::restore_generator(ckpt))),
      epoch_(ckpt.epoch) {}

std::vector<double> GeneratorTranslator::translate(const std::vector<double>& image, std::uint64_t z_seed) const {
  const auto& spec = generator_->spec();
  const std::size_t s = spec.image_size;
  if (image.size() != spec.input_channels * s * s)
    throw GeometryError("image has " + std::to_string(image.size()) + " values, generator expects " +
                        std::to_string(spec.input_channels * s * s));
  ad::NoGradGuard no_grad;
  Rng rng(z_seed);
  std::vector<double> z(spec.noise_dim);
  for (double& v : z) v = rng.normal();
  const auto x = ad::Tensor::from({1, spec.input_channels, s, s}, image);
  const auto out = generator_->forward(x, ad::Tensor::from({1, spec.noise_dim}, std::move(z)), ad::Mode::Eval);
  return {out.values().begin(), out.values().end()};
}

TranslatorList translators_from(const std::vector<cgan::Checkpoint>& checkpoints) {
  TranslatorList out;
  for (const auto& c : checkpoints) out.push_back(std::make_shared<GeneratorTranslator>(c));
  return out;
}

TranslatorList load_translators(const std::vector<std::filesystem::path>& paths) {
  TranslatorList out;
  for (const auto& p : paths) out.push_back(std::make_shared<GeneratorTranslator>(cgan::load_checkpoint(p)));
  return out;
}

Trace realize_trace(const ImageTranslator& translator, const Trace& seismic, std::uint64_t z_seed) {
  validate_trace(seismic);
  if (seismic.size() != kCanonicalTraceLength)
    throw GeometryError("trace " + seismic.id + " has " + std::to_string(seismic.size()) +
                        " samples, the trained geometry needs " + std::to_string(kCanonicalTraceLength));
  Trace out{seismic.id, TraceKind::Broadband, seismic.dt_ms, seismic.t0_ms,
            std::vector<double>(seismic.size(), 0.0)};
  const double peak = peak_abs(seismic.samples);
  if (peak == 0.0) return out;
  std::vector<double> normalized = seismic.samples;
  for (double& v : normalized) v /= peak;
  const auto image = cgan::trace_to_image(normalized, seismic.dt_ms, translator.geometry(), translator.image_scale());
  const auto generated = translator.translate(image, z_seed);
  out.samples = cgan::image_to_trace(generated, seismic.size(), seismic.dt_ms, translator.geometry(),
                                     translator.image_scale());
  for (double& v : out.samples) v *= peak;
  return out;
}

EnsembleStats summarize(const RealizationSet& set, const std::vector<std::size_t>& histogram_samples,
                        std::size_t bins) {
  const auto& rows = set.realizations;
  if (rows.empty()) throw InferenceError("no realizations to summarise");
  if (bins == 0) throw InferenceError("histograms need at least one bin");
  const std::size_t n = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != n) throw InferenceError("realizations differ in length");
  const double count = static_cast<double>(rows.size());

  EnsembleStats stats;
  stats.n_realizations = rows.size();
  stats.mean.assign(n, 0.0);
  stats.std.assign(n, 0.0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < n; ++i) stats.mean[i] += r[i];
  for (double& m : stats.mean) m /= count;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < n; ++i) {
      const double d = r[i] - stats.mean[i];
      stats.std[i] += d * d;
    }
  for (double& s : stats.std) s = std::sqrt(s / count);

  for (std::size_t idx : histogram_samples) {
    if (idx >= n) throw InferenceError("histogram sample " + std::to_string(idx) + " is outside the trace");
    double lo = rows.front()[idx], hi = lo;
    for (const auto& r : rows) {
      lo = std::min(lo, r[idx]);
      hi = std::max(hi, r[idx]);
    }
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    Histogram h;
    h.sample_index = idx;
    h.counts.assign(bins, 0);
    for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * static_cast<double>(b) / bins);
    for (const auto& r : rows) {
      auto b = static_cast<std::size_t>((r[idx] - lo) / (hi - lo) * static_cast<double>(bins));
      ++h.counts[std::min(b, bins - 1)];
    }
    stats.histograms.push_back(std::move(h));
  }
  return stats;
}

Ensemble ensemble_stats(const TranslatorList& translators, const Trace& seismic, std::size_t realizations,
                        std::uint64_t seed, const std::vector<std::size_t>& histogram_samples, std::size_t bins) {
  if (translators.empty()) throw InferenceError("ensemble needs at least one checkpoint");
  if (realizations == 0) throw InferenceError("ensemble needs at least one realization");
  Ensemble result;
  result.set.trace_id = seismic.id;
  for (std::size_t r = 0; r < realizations; ++r) {
    const std::size_t k = r % translators.size();
    const std::uint64_t z_seed = derive_seed(seed, r);
    result.set.realizations.push_back(realize_trace(*translators[k], seismic, z_seed).samples);
    result.set.translator_index.push_back(k);
    result.set.z_seeds.push_back(z_seed);
  }
  result.stats = summarize(result.set, histogram_samples, bins);
  return result;
}

std::uint64_t trace_seed(std::uint64_t seed, const TraceKey& key) {
  return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(key.inline_no)),
                     static_cast<std::uint64_t>(key.xline_no));
}

Volume process_volume(const TranslatorList& translators, const Volume& volume, std::size_t realizations,
                      std::uint64_t seed, std::size_t workers) {
  if (translators.empty()) throw InferenceError("volume processing needs at least one checkpoint");
  for (const auto& [key, trace] : volume.traces)
    if (trace.size() != kCanonicalTraceLength)
      throw GeometryError("trace at (" + std::to_string(key.inline_no) + ", " + std::to_string(key.xline_no) +
                          ") has " + std::to_string(trace.size()) + " samples, expected " +
                          std::to_string(kCanonicalTraceLength));

  std::vector<TraceKey> keys;
  for (const auto& [key, trace] : volume.traces) keys.push_back(key);
  std::vector<Trace> outputs(keys.size());
  std::vector<std::string> errors(keys.size());

  const int threads = static_cast<int>(std::max<std::size_t>(workers, 1));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < keys.size(); ++i) {
    try {
      const Trace& input = volume.traces.at(keys[i]);
      auto ensemble = ensemble_stats(translators, input, realizations, trace_seed(seed, keys[i]));
      outputs[i] = Trace{input.id, TraceKind::Broadband, input.dt_ms, input.t0_ms, std::move(ensemble.stats.mean)};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (!errors[i].empty())
      throw InferenceError("trace at (" + std::to_string(keys[i].inline_no) + ", " +
                           std::to_string(keys[i].xline_no) + "): " + errors[i]);

  Volume out;
  out.dt_ms = volume.dt_ms;
  for (std::size_t i = 0; i < keys.size(); ++i) out.traces.emplace(keys[i], std::move(outputs[i]));
  return out;
}

std::string stats_csv(const EnsembleStats& stats) {
  std::ostringstream os;
  os << std::setprecision(17) << "sample_index,mean,std\n";
  for (std::size_t i = 0; i < stats.mean.size(); ++i) os << i << ',' << stats.mean[i] << ',' << stats.std[i] << '\n';
  return os.str();
}

std::string histograms_csv(const EnsembleStats& stats) {
  std::ostringstream os;
  os << std::setprecision(17) << "sample_index,bin,lower,upper,count\n";
  for (const auto& h : stats.histograms)
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << h.sample_index << ',' << b << ',' << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
  return os.str();
}

}  // namespace bandext::inference
