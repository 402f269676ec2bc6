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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when a criterion fails, unless it is listed with
// --tolerate N (the line still reads FAIL).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bandext/cgan.hpp"
#include "bandext/inference.hpp"
#include "bandext/qc.hpp"
#include "bandext/synth.hpp"
#include "bandext/welltie.hpp"
#include "gradcheck_suite.hpp"
#include "test_support.hpp"

namespace {

using namespace bandext;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + fmt("%.2f", x);
  return out;
}

// Criterion 1 -------------------------------------------------------------

Verdict gradient_correctness() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_layer;
  std::size_t suites = 0;
  for (const auto& suite : testing::gradcheck::layer_suites()) {
    const auto r = testing::gradcheck::run_suite(suite, 100, 1000 + suites++);
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_layer = r.name;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-4 && elapsed <= 120.0,
          fmt("%zu layers x 100 configurations, max rel err %.2e (%s), %.1f s", suites, worst, worst_layer.c_str(),
              elapsed)};
}

// Criterion 2 -------------------------------------------------------------

Verdict dsp_exactness() {
  const auto start = Clock::now();
  bool gains_ok = true;
  const std::vector<dsp::TrapezoidBand> bands{{3, 6, 60, 80}, {0, 0, 8, 16}, {60, 80, 120, 160}, {5, 10, 40, 50}};
  for (const auto& b : bands) {
    for (double f : {b.f2, 0.5 * (b.f2 + b.f3), b.f3})
      if (b.f2 > 0.0 || f > 0.0) gains_ok &= b.gain(f) == 1.0;
    gains_ok &= b.gain(b.f4 + 1.0) == 0.0 && b.gain(b.f4 + 100.0) == 0.0;
    if (b.f1 > 0.0) gains_ok &= b.gain(0.5 * b.f1) == 0.0;
    if (b.f2 > b.f1) gains_ok &= std::abs(b.gain(0.5 * (b.f1 + b.f2)) - 0.5) <= 1e-9;
    if (b.f4 > b.f3) gains_ok &= std::abs(b.gain(0.5 * (b.f3 + b.f4)) - 0.5) <= 1e-9;
  }

  Rng rng(2);
  const dsp::SpectrogramGeometry geometry{64, 16, 64, 32};
  double worst_round_trip = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto t = testing::make_trace(testing::random_samples(rng, 512));
    const auto back = dsp::istft(dsp::stft(t, geometry));
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < 512; ++i) {
      err += (back.samples[i] - t.samples[i]) * (back.samples[i] - t.samples[i]);
      ref += t.samples[i] * t.samples[i];
    }
    worst_round_trip = std::max(worst_round_trip, std::sqrt(err / ref));
  }

  // Idempotence holds where the gain is 0 or 1: step bands, and traces
  // already confined to a band's plateau.
  double worst_idem = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto t = testing::make_trace(testing::random_samples(rng, 512));
    const auto step = dsp::bandpass_trapezoid(t, {10, 10, 50, 50});
    const auto twice = dsp::bandpass_trapezoid(step, {10, 10, 50, 50});
    const auto inner = dsp::bandpass_trapezoid(t, {10, 12, 40, 45});
    const auto outer = dsp::bandpass_trapezoid(inner, dsp::bands::kSeismic);
    const double scale = peak_abs(t.samples);
    for (std::size_t i = 0; i < 512; ++i) {
      worst_idem = std::max(worst_idem, std::abs(twice.samples[i] - step.samples[i]) / scale);
      worst_idem = std::max(worst_idem, std::abs(outer.samples[i] - inner.samples[i]) / scale);
    }
  }
  const double elapsed = seconds_since(start);
  return {gains_ok && worst_round_trip <= 1e-6 && worst_idem <= 1e-9 && elapsed <= 60.0,
          fmt("gains %s, round trip max rel err %.1e over 1000 traces, idempotence err %.1e, %.1f s",
              gains_ok ? "exact" : "WRONG", worst_round_trip, worst_idem, elapsed)};
}

// Shared end-to-end experiment ------------------------------------------

cgan::TrainConfig acceptance_config() {
  cgan::TrainConfig cfg;
  // The ensemble draws on the final five checkpoints, five epochs apart.
  cfg.epochs = 1000;
  cfg.checkpoint_every = 5;
  cfg.keep_checkpoints = 5;
  cfg.lr = 1e-3;
  cfg.lambda_l1 = 3500.0;
  return cfg;
}

struct WellResult {
  TracePair pair;
  PairRole role = PairRole::Validation;
  inference::Ensemble ensemble;
  Trace mean;
  qc::QcRow row;
};

struct Experiment {
  std::size_t good = 0, fair = 0, poor = 0;
  std::vector<std::string> train_ids;
  double train_seconds = 0.0;
  std::vector<WellResult> wells;
  std::vector<const WellResult*> by_role(PairRole role) const {
    std::vector<const WellResult*> out;
    for (const auto& w : wells)
      if (w.role == role) out.push_back(&w);
    return out;
  }
};

std::vector<TracePair> default_pairs(std::size_t& good, std::size_t& fair, std::size_t& poor) {
  synth::SynthConfig sc;
  std::vector<TracePair> pairs;
  welltie::TieOptions options;
  options.wavelet_peak_hz = sc.wavelet_peak_hz;
  for (const auto& g : synth::gen_pairs(sc)) {
    pairs.push_back(g.pair);
    pairs.back().tie_class = welltie::classify_tie(welltie::tie_score(g.pair, options));
  }
  good = fair = poor = 0;
  for (const auto& p : pairs) {
    good += *p.tie_class == TieClass::Good;
    fair += *p.tie_class == TieClass::Fair;
    poor += *p.tie_class == TieClass::Poor;
  }
  return pairs;
}

Experiment run_experiment() {
  Experiment e;
  const auto pairs = default_pairs(e.good, e.fair, e.poor);
  const auto split = welltie::select_training(pairs, welltie::SelectionPolicy{});
  for (const auto& p : split.train) e.train_ids.push_back(p.well_id);

  const auto start = Clock::now();
  const auto result = cgan::train(split.train, acceptance_config());
  e.train_seconds = seconds_since(start);

  const auto translators = inference::translators_from(result.checkpoints);
  const std::set<std::string> train_set(e.train_ids.begin(), e.train_ids.end());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    WellResult w;
    w.pair = pairs[i];
    w.role = train_set.count(w.pair.well_id) ? PairRole::Train : PairRole::Validation;
    w.ensemble = inference::ensemble_stats(translators, w.pair.seismic, 100, derive_seed(99, i));
    w.mean = Trace{w.pair.well_id, TraceKind::Broadband, w.pair.seismic.dt_ms, w.pair.seismic.t0_ms,
                   w.ensemble.stats.mean};
    w.row = qc::evaluate_well(w.pair, w.mean, w.role);
    e.wells.push_back(std::move(w));
  }
  return e;
}

// Criteria 3 to 7 ---------------------------------------------------------

Verdict end_to_end(const Experiment& e) {
  std::vector<double> blind, gain;
  for (const auto* w : e.by_role(PairRole::Validation)) {
    blind.push_back(w->row.blind_corr);
    gain.push_back(w->row.blind_corr - w->row.baseline_corr);
  }
  const bool mix_ok = e.wells.size() == 12 && e.good == 9 && e.fair == 2 && e.poor == 1;
  const bool pass = mix_ok && blind.size() == 8 && median(blind) >= 0.60 && median(gain) >= 0.10 &&
                    e.train_seconds <= 1800.0;
  return {pass, fmt("tie mix %zu/%zu/%zu, training %.0f s, blind median %.3f (need 0.60), median gain over "
                    "seismic baseline %.3f (need 0.10); blind: %s",
                    e.good, e.fair, e.poor, e.train_seconds, median(blind), median(gain), list(blind).c_str())};
}

Verdict bandwidth_extension(const Experiment& e) {
  std::vector<double> low, mid, high;
  for (const auto* w : e.by_role(PairRole::Validation)) {
    low.push_back(w->row.spectrum.low.ratio.value_or(0.0));
    mid.push_back(w->row.spectrum.mid.ratio.value_or(0.0));
    high.push_back(w->row.spectrum.high.ratio.value_or(0.0));
  }
  const double l = median(low), m = median(mid), h = median(high);
  return {l >= 2.0 && h >= 1.5 && m >= 0.5 && m <= 2.0,
          fmt("blind-well median energy ratios low %.2f (need 2.0), mid %.2f (need 0.5..2), high %.2f (need 1.5)", l,
              m, h)};
}

Verdict band_consistency(const Experiment& e) {
  std::vector<double> train, blind;
  for (const auto* w : e.by_role(PairRole::Train)) train.push_back(w->row.band_consistency);
  for (const auto* w : e.by_role(PairRole::Validation)) blind.push_back(w->row.band_consistency);
  return {median(train) >= 0.70 && median(blind) >= 0.50,
          fmt("median train %.3f (need 0.70), blind %.3f (need 0.50)", median(train), median(blind))};
}

Verdict sidelobe_reduction(const Experiment& e) {
  std::vector<double> generated, seismic;
  for (const auto& w : e.wells) {
    generated.push_back(w.row.sidelobe_generated);
    seismic.push_back(w.row.sidelobe_seismic);
  }
  return {median(generated) < median(seismic),
          fmt("median sidelobe generated %.4f vs seismic %.4f over %zu wells", median(generated), median(seismic),
              e.wells.size())};
}

Verdict ensemble_centralization(const Experiment& e) {
  std::size_t within = 0, total = 0;
  double worst_stat = 0.0;
  for (const auto& w : e.wells) {
    const auto& rows = w.ensemble.set.realizations;
    const std::size_t n = w.ensemble.stats.mean.size();
    // Two passes in reverse realization order.
    std::vector<double> mean(n, 0.0), var(n, 0.0);
    for (auto r = rows.rbegin(); r != rows.rend(); ++r)
      for (std::size_t i = 0; i < n; ++i) mean[i] += (*r)[i];
    for (double& m : mean) m /= static_cast<double>(rows.size());
    for (auto r = rows.rbegin(); r != rows.rend(); ++r)
      for (std::size_t i = 0; i < n; ++i) var[i] += ((*r)[i] - mean[i]) * ((*r)[i] - mean[i]);
    for (std::size_t i = 0; i < n; ++i) {
      const double sd = std::sqrt(var[i] / static_cast<double>(rows.size()));
      worst_stat = std::max({worst_stat, std::abs(mean[i] - w.ensemble.stats.mean[i]),
                             std::abs(sd - w.ensemble.stats.std[i])});
    }
    const double trace_rms = rms(w.ensemble.stats.mean);
    for (double sd : w.ensemble.stats.std) {
      within += sd <= 0.15 * trace_rms;
      ++total;
    }
  }
  const double fraction = static_cast<double>(within) / static_cast<double>(total);
  return {fraction >= 0.90 && worst_stat <= 1e-12,
          fmt("R=100, %.1f%% of samples with std <= 0.15 x trace RMS (need 90%%), two-pass recomputation diff %.1e",
              100.0 * fraction, worst_stat)};
}

// Criterion 8 -------------------------------------------------------------

Verdict training_sensitivity() {
  std::size_t good, fair, poor;
  const auto pairs = default_pairs(good, fair, poor);
  std::string probe;
  for (const auto& p : pairs)
    if (*p.tie_class == TieClass::Good) {
      probe = p.well_id;
      break;
    }
  welltie::SelectionPolicy first;
  first.seed = 1;
  first.exclude_wells = {probe};
  welltie::SelectionPolicy second = first;
  second.seed = 2;
  for (const auto& p : welltie::select_training(pairs, first).train) second.exclude_wells.insert(p.well_id);
  qc::StudyOptions options;
  options.realizations = 20;
  const auto report = qc::training_combination_study(pairs, {first, second}, acceptance_config(), probe, options);
  const double rms_diff = report.pairwise.at(0).rms_difference;

  std::vector<double> exclude_scores, include_scores;
  for (std::uint64_t seed : {1, 2, 3}) {
    welltie::SelectionPolicy exclude;
    exclude.seed = seed;
    welltie::SelectionPolicy include = exclude;
    include.n_poor = 1;
    include.exclude_poor = false;
    const auto included = welltie::select_training(pairs, include);
    auto cfg = acceptance_config();
    cfg.seed = seed;
    double score[2] = {0.0, 0.0};
    int slot = 0;
    for (const auto* policy : {&exclude, &include}) {
      const auto model = cgan::train(welltie::select_training(pairs, *policy).train, cfg);
      const auto translators = inference::translators_from(model.checkpoints);
      // Both policies are scored on the wells neither trained on.
      for (const auto& p : included.validation) {
        const auto e = inference::ensemble_stats(translators, p.seismic, 10, seed);
        score[slot] += qc::blind_validation(Trace{p.well_id, TraceKind::Broadband, p.seismic.dt_ms,
                                                  p.seismic.t0_ms, e.stats.mean},
                                            p.log) /
                       static_cast<double>(included.validation.size());
      }
      ++slot;
    }
    exclude_scores.push_back(score[0]);
    include_scores.push_back(score[1]);
  }
  const auto average = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double ex = average(exclude_scores), in = average(include_scores);
  const bool disjoint = [&] {
    std::set<std::string> a(report.policies[0].train_wells.begin(), report.policies[0].train_wells.end());
    for (const auto& w : report.policies[1].train_wells)
      if (a.count(w)) return false;
    return true;
  }();
  return {disjoint && rms_diff > 0.0 && ex >= in,
          fmt("disjoint policies probe RMS diff %.4g; blind score exclude-poor %.3f vs include-poor %.3f over 3 seeds "
              "(%s vs %s)",
              rms_diff, ex, in, list(exclude_scores).c_str(), list(include_scores).c_str())};
}

// Criterion 9 -------------------------------------------------------------

std::map<std::string, std::vector<unsigned char>> snapshot(const fs::path& root) {
  std::map<std::string, std::vector<unsigned char>> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = testing::read_bytes(e.path());
  return files;
}

// Dataset, checkpoints, volume inference and QC CSVs written under root.
void pipeline(const fs::path& root, std::size_t workers) {
  synth::SynthConfig sc;
  const auto manifest = synth::gen_dataset(sc, root / "data");
  auto data = load_manifest(root / "data" / "manifest.json");
  const auto split = welltie::select_training(data.pairs, welltie::SelectionPolicy{});
  auto cfg = acceptance_config();
  cfg.epochs = 10;
  cfg.checkpoint_every = 5;
  const auto model = cgan::train(split.train, cfg, {root / "model", false});
  const auto translators = inference::translators_from(model.checkpoints);

  Volume volume;
  for (int il = 0; il < 4; ++il)
    for (int xl = 0; xl < 4; ++xl) volume.traces[{il, xl}] = data.pairs[static_cast<std::size_t>(il * 4 + xl) % 12].seismic;
  write_volume(inference::process_volume(translators, volume, 8, 5, workers), root / "volume");

  std::vector<qc::QcRow> rows;
  for (const auto& p : split.validation) {
    const auto e = inference::ensemble_stats(translators, p.seismic, 8, 5);
    rows.push_back(qc::evaluate_well(p, Trace{p.well_id, TraceKind::Broadband, 2.0, 0.0, e.stats.mean},
                                     PairRole::Validation));
  }
  std::ofstream(root / "qc_report.csv") << qc::qc_report_csv(rows);
  std::ofstream(root / "spectrum_report.csv") << qc::spectrum_report_csv(rows);
}

Verdict determinism() {
  testing::TempDir a("accept_a"), b("accept_b");
  pipeline(a.path(), 1);
  pipeline(b.path(), 4);
  const auto first = snapshot(a.path());
  const auto second = snapshot(b.path());
  std::size_t checkpoints = 0, traces = 0, csvs = 0, mismatched = 0;
  for (const auto& [name, bytes] : first) {
    checkpoints += name.ends_with(".bin");
    traces += name.ends_with(".bxt");
    csvs += name.ends_with(".csv");
    if (!second.count(name) || second.at(name) != bytes) ++mismatched;
  }
  return {mismatched == 0 && first.size() == second.size() && checkpoints > 0 && traces > 0 && csvs > 0,
          fmt("%zu files (%zu checkpoints, %zu traces, %zu CSVs) compared across reruns with 1 and 4 workers, "
              "%zu differ",
              first.size(), checkpoints, traces, csvs, mismatched)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> tolerated;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--tolerate" && i + 1 < argc) tolerated.insert(std::atoi(argv[++i]));
    else if (arg == "--only" && i + 1 < argc) only.insert(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr, "usage: %s [--tolerate N]... [--only N]...\n", argv[0]);
      return 2;
    }
  }
  const auto wanted = [&](int n) { return only.empty() || only.count(n); };

  int failures = 0;
  const auto report = [&](int n, const char* name, const Verdict& v) {
    const bool excused = !v.pass && tolerated.count(n);
    std::printf("criterion %d %-28s %s  %s%s\n", n, name, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                excused ? "  [tolerated]" : "");
    std::fflush(stdout);
    if (!v.pass && !excused) ++failures;
  };

  if (wanted(1)) report(1, "gradient-correctness", gradient_correctness());
  if (wanted(2)) report(2, "dsp-exactness", dsp_exactness());
  if (wanted(3) || wanted(4) || wanted(5) || wanted(6) || wanted(7)) {
    const auto experiment = run_experiment();
    if (wanted(3)) report(3, "end-to-end", end_to_end(experiment));
    if (wanted(4)) report(4, "bandwidth-extension", bandwidth_extension(experiment));
    if (wanted(5)) report(5, "band-consistency", band_consistency(experiment));
    if (wanted(6)) report(6, "sidelobe-reduction", sidelobe_reduction(experiment));
    if (wanted(7)) report(7, "ensemble-centralization", ensemble_centralization(experiment));
  }
  if (wanted(8)) report(8, "training-sensitivity", training_sensitivity());
  if (wanted(9)) report(9, "determinism", determinism());
  return failures == 0 ? 0 : 1;
}
