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

#include "bandext/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bandext/rng.hpp"
#include "json.hpp"

namespace bandext::synth {
namespace {

using nlohmann::json;

struct ImpedanceModel {
  double sand_mean, sand_sd, shale_mean, shale_sd;
};

// Impedances in arbitrary units; only contrasts matter.
ImpedanceModel impedance_model(Facies facies) {
  switch (facies) {
    case Facies::BlockySand: return {7200.0, 400.0, 5600.0, 250.0};
    case Facies::ThinBeds: return {6800.0, 350.0, 5600.0, 250.0};
    case Facies::Shale: return {5900.0, 150.0, 5600.0, 150.0};
  }
  return {6000.0, 100.0, 6000.0, 100.0};
}

void peak_normalize(std::vector<double>& v) {
  const double peak = peak_abs(v);
  if (peak > 0.0)
    for (double& s : v) s /= peak;
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(items[i - 1], items[j]);
  }
}

long draw_shift(Rng& rng, double min_ms, double max_ms, double dt_ms) {
  const auto lo = static_cast<std::int64_t>(std::ceil(min_ms / dt_ms - 1e-9));
  const auto hi = static_cast<std::int64_t>(std::floor(max_ms / dt_ms + 1e-9));
  const long magnitude = static_cast<long>(rng.uniform_int(lo, std::max(lo, hi)));
  return rng.uniform() < 0.5 ? -magnitude : magnitude;
}

std::string well_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "W%02zu", index + 1);
  return buf;
}

}  // namespace

std::string_view to_string(Facies facies) {
  switch (facies) {
    case Facies::BlockySand: return "blocky_sand";
    case Facies::ThinBeds: return "thin_beds";
    case Facies::Shale: return "shale";
  }
  return "unknown";
}

Facies parse_facies(std::string_view text) {
  if (text == "blocky_sand") return Facies::BlockySand;
  if (text == "thin_beds") return Facies::ThinBeds;
  if (text == "shale") return Facies::Shale;
  throw ModelError("unknown facies: " + std::string(text));
}

double EarthModel::total_thickness_ms() const {
  double total = 0.0;
  for (const auto& l : layers) total += l.thickness_ms;
  return total;
}

ThicknessRange thickness_range(Facies facies) {
  switch (facies) {
    case Facies::BlockySand: return {40.0, 150.0};
    case Facies::ThinBeds: return {4.0, 16.0};
    case Facies::Shale: return {20.0, 60.0};
  }
  return {20.0, 60.0};
}

void validate_config(const SynthConfig& cfg) {
  if (cfg.n_pairs == 0) throw ModelError("n_pairs must be positive");
  if (cfg.tie_mix.total() != cfg.n_pairs)
    throw ModelError("tie_mix counts sum to " + std::to_string(cfg.tie_mix.total()) + ", expected " +
                     std::to_string(cfg.n_pairs));
  double sum = 0.0;
  for (double p : cfg.facies_mix) {
    if (p < 0.0) throw ModelError("facies_mix proportions must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ModelError("facies_mix proportions must sum to 1");
  if (!(cfg.noise_rms_fraction >= 0.0 && cfg.noise_rms_fraction < 1.0))
    throw ModelError("noise_rms_fraction must lie in [0, 1)");
  if (cfg.n_samples < 2 || !(cfg.dt_ms > 0.0)) throw ModelError("trace geometry must be positive");
  const double nyquist = 500.0 / cfg.dt_ms;
  if (!(cfg.wavelet_peak_hz > 0.0 && cfg.wavelet_peak_hz < nyquist))
    throw BandError("wavelet peak must lie below Nyquist");
  dsp::validate_band(cfg.seismic_band, nyquist);
  dsp::validate_band(cfg.broadband_band, nyquist);
  const auto& d = cfg.degrade;
  if (!(d.fair_shift_min_ms >= 0 && d.fair_shift_min_ms <= d.fair_shift_max_ms && d.poor_shift_min_ms >= 0 &&
        d.poor_shift_min_ms <= d.poor_shift_max_ms && d.fair_noise_fraction >= 0))
    throw ModelError("invalid degradation ranges");
}

SynthConfig config_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid synth config JSON: ") + e.what());
  }
  SynthConfig cfg;
  try {
    cfg.n_pairs = doc.value("n_pairs", cfg.n_pairs);
    if (doc.contains("tie_mix")) {
      const auto& t = doc["tie_mix"];
      cfg.tie_mix.good = t.value("good", cfg.tie_mix.good);
      cfg.tie_mix.fair = t.value("fair", cfg.tie_mix.fair);
      cfg.tie_mix.poor = t.value("poor", cfg.tie_mix.poor);
    }
    if (doc.contains("facies_mix")) {
      const auto& f = doc["facies_mix"];
      if (f.is_array()) {
        if (f.size() != kFaciesCount) throw ModelError("facies_mix needs three proportions");
        for (std::size_t i = 0; i < kFaciesCount; ++i) cfg.facies_mix[i] = f[i].get<double>();
      } else {
        cfg.facies_mix = {f.value("blocky_sand", 0.0), f.value("thin_beds", 0.0), f.value("shale", 0.0)};
      }
    }
    cfg.noise_rms_fraction = doc.value("noise_rms_fraction", cfg.noise_rms_fraction);
    cfg.wavelet_peak_hz = doc.value("wavelet_peak_hz", cfg.wavelet_peak_hz);
    if (doc.contains("seismic_band")) cfg.seismic_band = dsp::parse_band(doc["seismic_band"].get<std::string>());
    if (doc.contains("broadband_band"))
      cfg.broadband_band = dsp::parse_band(doc["broadband_band"].get<std::string>());
    cfg.n_samples = doc.value("n_samples", cfg.n_samples);
    cfg.dt_ms = doc.value("dt_ms", cfg.dt_ms);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("degrade")) {
      const auto& d = doc["degrade"];
      cfg.degrade.fair_shift_min_ms = d.value("fair_shift_min_ms", cfg.degrade.fair_shift_min_ms);
      cfg.degrade.fair_shift_max_ms = d.value("fair_shift_max_ms", cfg.degrade.fair_shift_max_ms);
      cfg.degrade.fair_noise_fraction = d.value("fair_noise_fraction", cfg.degrade.fair_noise_fraction);
      cfg.degrade.poor_shift_min_ms = d.value("poor_shift_min_ms", cfg.degrade.poor_shift_min_ms);
      cfg.degrade.poor_shift_max_ms = d.value("poor_shift_max_ms", cfg.degrade.poor_shift_max_ms);
    }
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed synth config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const SynthConfig& cfg) {
  json doc;
  doc["n_pairs"] = cfg.n_pairs;
  doc["tie_mix"] = {{"good", cfg.tie_mix.good}, {"fair", cfg.tie_mix.fair}, {"poor", cfg.tie_mix.poor}};
  doc["facies_mix"] = {{"blocky_sand", cfg.facies_mix[0]},
                       {"thin_beds", cfg.facies_mix[1]},
                       {"shale", cfg.facies_mix[2]}};
  doc["noise_rms_fraction"] = cfg.noise_rms_fraction;
  doc["wavelet_peak_hz"] = cfg.wavelet_peak_hz;
  doc["seismic_band"] = cfg.seismic_band.to_string();
  doc["broadband_band"] = cfg.broadband_band.to_string();
  doc["n_samples"] = cfg.n_samples;
  doc["dt_ms"] = cfg.dt_ms;
  doc["seed"] = cfg.seed;
  doc["degrade"] = {{"fair_shift_min_ms", cfg.degrade.fair_shift_min_ms},
                    {"fair_shift_max_ms", cfg.degrade.fair_shift_max_ms},
                    {"fair_noise_fraction", cfg.degrade.fair_noise_fraction},
                    {"poor_shift_min_ms", cfg.degrade.poor_shift_min_ms},
                    {"poor_shift_max_ms", cfg.degrade.poor_shift_max_ms}};
  return doc.dump(2) + "\n";
}

EarthModel gen_earth_model(Facies facies, std::uint64_t seed, double duration_ms) {
  EarthModel model;
  model.facies = facies;
  model.seed = seed;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(facies)));
  const auto range = thickness_range(facies);
  const auto imp = impedance_model(facies);
  // Sand and shale alternate, starting with either.
  bool sand = rng.uniform() < 0.5;
  double total = 0.0;
  while (total < duration_ms || model.layers.size() < 2) {
    Layer layer;
    layer.thickness_ms = rng.uniform(range.lo, range.hi);
    const double mean = sand ? imp.sand_mean : imp.shale_mean;
    const double sd = sand ? imp.sand_sd : imp.shale_sd;
    layer.impedance = std::max(0.2 * mean, rng.normal(mean, sd));
    model.layers.push_back(layer);
    total += layer.thickness_ms;
    sand = !sand;
  }
  return model;
}

Trace reflectivity_series(const EarthModel& model, double dt_ms, std::size_t n) {
  if (model.layers.size() < 2) throw ModelError("earth model needs at least two layers");
  const double duration = static_cast<double>(n) * dt_ms;
  if (model.total_thickness_ms() < duration)
    throw ModelError("earth model spans " + std::to_string(model.total_thickness_ms()) + " ms, trace needs " +
                     std::to_string(duration) + " ms");
  for (const auto& l : model.layers)
    if (!(l.impedance > 0.0) || !(l.thickness_ms > 0.0)) throw ModelError("layers need positive thickness and impedance");

  Trace r;
  r.id = "reflectivity";
  r.kind = TraceKind::Log;
  r.dt_ms = dt_ms;
  r.samples.assign(n, 0.0);
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < model.layers.size(); ++i) {
    t += model.layers[i].thickness_ms;
    const auto idx = static_cast<std::size_t>(std::llround(t / dt_ms));
    if (idx >= n) break;
    const double za = model.layers[i].impedance;
    const double zb = model.layers[i + 1].impedance;
    r.samples[idx] += (zb - za) / (zb + za);
  }
  return r;
}

std::size_t wavelet_half_len(double f_peak_hz, double dt_ms) {
  // 1.5 / f covers the Ricker to below 1e-9 of its peak.
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.5 / (f_peak_hz * dt_ms * 1e-3))));
}

std::vector<double> convolve_same(const std::vector<double>& signal, const std::vector<double>& kernel) {
  const long n = static_cast<long>(signal.size());
  const long k = static_cast<long>(kernel.size());
  const long half = k / 2;
  std::vector<double> out(signal.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long j = 0; j < k; ++j) {
      const long src = i + half - j;
      if (src >= 0 && src < n) acc += kernel[static_cast<std::size_t>(j)] * signal[static_cast<std::size_t>(src)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

TracePair forward_model(const Trace& reflectivity, const SynthConfig& cfg, std::uint64_t seed) {
  validate_trace(reflectivity);
  const double nyquist = reflectivity.nyquist_hz();
  dsp::validate_band(cfg.seismic_band, nyquist);
  dsp::validate_band(cfg.broadband_band, nyquist);

  const auto wavelet =
      dsp::ricker(cfg.wavelet_peak_hz, reflectivity.dt_ms, wavelet_half_len(cfg.wavelet_peak_hz, reflectivity.dt_ms));
  auto seismic = convolve_same(reflectivity.samples, wavelet.samples);
  seismic = dsp::bandpass_trapezoid(seismic, reflectivity.dt_ms, cfg.seismic_band);
  if (cfg.noise_rms_fraction > 0.0) {
    const double sigma = cfg.noise_rms_fraction * rms(seismic);
    Rng rng(seed);
    for (double& s : seismic) s += sigma * rng.normal();
  }
  peak_normalize(seismic);

  auto log = dsp::bandpass_trapezoid(reflectivity.samples, reflectivity.dt_ms, cfg.broadband_band);
  peak_normalize(log);

  TracePair pair;
  pair.well_id = reflectivity.id;
  pair.seismic = Trace{reflectivity.id + "_seismic", TraceKind::Seismic, reflectivity.dt_ms, reflectivity.t0_ms,
                       std::move(seismic)};
  pair.log =
      Trace{reflectivity.id + "_log", TraceKind::Log, reflectivity.dt_ms, reflectivity.t0_ms, std::move(log)};
  pair.tie_class = TieClass::Good;
  return pair;
}

DegradeOutcome degrade_tie_detailed(const TracePair& pair, TieClass target, std::uint64_t seed,
                                    const DegradeConfig& cfg) {
  DegradeOutcome out{pair, 0, 0, 0};
  out.pair.tie_class = target;
  if (target == TieClass::Good) return out;

  Rng rng(seed);
  auto& s = out.pair.seismic.samples;
  const double dt = pair.seismic.dt_ms;
  const std::size_t n = s.size();
  if (target == TieClass::Fair) {
    out.shift_samples = draw_shift(rng, cfg.fair_shift_min_ms, cfg.fair_shift_max_ms, dt);
    s = dsp::circular_shift(s, out.shift_samples);
    const double sigma = cfg.fair_noise_fraction * rms(s);
    for (double& v : s) v += sigma * rng.normal();
  } else {
    out.flip_len = n / 2;
    out.flip_start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    for (std::size_t i = 0; i < out.flip_len; ++i) s[(out.flip_start + i) % n] = -s[(out.flip_start + i) % n];
    out.shift_samples = draw_shift(rng, cfg.poor_shift_min_ms, cfg.poor_shift_max_ms, dt);
    s = dsp::circular_shift(s, out.shift_samples);
  }
  peak_normalize(s);
  return out;
}

TracePair degrade_tie(const TracePair& pair, TieClass target, std::uint64_t seed, const DegradeConfig& cfg) {
  return degrade_tie_detailed(pair, target, seed, cfg).pair;
}

std::vector<std::size_t> apportion(const std::vector<double>& proportions, std::size_t total) {
  std::vector<std::size_t> counts(proportions.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < proportions.size(); ++i) {
    const double exact = proportions[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += counts[i];
    remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
  }
  // Largest remainder first; ties go to the earlier category.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

std::vector<GeneratedPair> gen_pairs(const SynthConfig& cfg) {
  validate_config(cfg);
  const auto facies_counts = apportion({cfg.facies_mix.begin(), cfg.facies_mix.end()}, cfg.n_pairs);
  std::vector<Facies> facies;
  for (std::size_t f = 0; f < kFaciesCount; ++f)
    facies.insert(facies.end(), facies_counts[f], static_cast<Facies>(f));
  std::vector<TieClass> ties;
  ties.insert(ties.end(), cfg.tie_mix.good, TieClass::Good);
  ties.insert(ties.end(), cfg.tie_mix.fair, TieClass::Fair);
  ties.insert(ties.end(), cfg.tie_mix.poor, TieClass::Poor);
  Rng facies_rng(derive_seed(cfg.seed, 1));
  Rng tie_rng(derive_seed(cfg.seed, 2));
  shuffle(facies, facies_rng);
  shuffle(ties, tie_rng);

  const double duration = static_cast<double>(cfg.n_samples) * cfg.dt_ms;
  std::vector<GeneratedPair> out(cfg.n_pairs);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < cfg.n_pairs; ++i) {
    auto& g = out[i];
    g.facies = facies[i];
    g.model = gen_earth_model(facies[i], derive_seed(cfg.seed, 100 + i), duration);
    auto r = reflectivity_series(g.model, cfg.dt_ms, cfg.n_samples);
    r.id = well_name(i);
    auto pair = forward_model(r, cfg, derive_seed(cfg.seed, 200 + i));
    g.pair = degrade_tie(pair, ties[i], derive_seed(cfg.seed, 300 + i), cfg.degrade);
  }
  return out;
}

DatasetManifest gen_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  const auto pairs = gen_pairs(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw WriteError("cannot create " + out_dir.string() + ": " + ec.message());
  DatasetManifest manifest;
  manifest.seed = cfg.seed;
  manifest.wavelet_peak_hz = cfg.wavelet_peak_hz;
  manifest.description = "synthetic seismic/log pairs: " + std::to_string(cfg.n_pairs) + " pairs, tie mix " +
                         std::to_string(cfg.tie_mix.good) + "/" + std::to_string(cfg.tie_mix.fair) + "/" +
                         std::to_string(cfg.tie_mix.poor) + ", seismic band " + cfg.seismic_band.to_string() +
                         ", broadband " + cfg.broadband_band.to_string();
  for (const auto& g : pairs) {
    const std::string seismic_file = g.pair.well_id + "_seismic.bxt";
    const std::string log_file = g.pair.well_id + "_log.bxt";
    write_trace(g.pair.seismic, out_dir / seismic_file);
    write_trace(g.pair.log, out_dir / log_file);
    manifest.pairs.push_back({g.pair.well_id, seismic_file, log_file, g.pair.tie_class, PairRole::Unassigned});
  }
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace bandext::synth
