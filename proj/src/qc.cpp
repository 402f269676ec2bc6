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

#include "bandext/qc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "bandext/fft.hpp"
#include "bandext/inference.hpp"

namespace bandext::qc {
namespace {

void require_aligned(const Trace& a, const Trace& b, const char* what) {
  validate_trace(a);
  validate_trace(b);
  if (a.size() != b.size() || a.dt_ms != b.dt_ms)
    throw MetricError(std::string(what) + ": traces differ in length or sample interval");
}

double correlation(const std::vector<double>& a, const std::vector<double>& b, const char* what) {
  const auto r = dsp::pearson(a, b);
  if (!r) throw MetricError(std::string(what) + ": an input has zero variance");
  return std::clamp(*r, -1.0, 1.0);
}

// Normalised two-sided autocorrelation indexed by lag 0..n-1.
double sidelobe_from_autocorrelation(const std::vector<double>& a) {
  const double zero = a.front();
  std::size_t main_lobe = a.size();
  for (std::size_t lag = 1; lag < a.size(); ++lag)
    if (a[lag] <= 0.0) {
      main_lobe = lag;
      break;
    }
  double total = 1.0, outside = 0.0;
  for (std::size_t lag = 1; lag < a.size(); ++lag) {
    const double v = a[lag] / zero;
    total += 2.0 * v * v;
    if (lag > main_lobe) outside += 2.0 * v * v;
  }
  return std::clamp(outside / total, 0.0, 1.0);
}

void require_nonzero(const Trace& trace) {
  validate_trace(trace);
  if (peak_abs(trace.samples) == 0.0) throw MetricError("sidelobe metric of an all-zero trace");
}

BandEnergy energy_pair(const std::string& label, const Trace& original, const Trace& generated,
                       const dsp::TrapezoidBand& requested) {
  BandEnergy e;
  e.label = label;
  e.requested = requested;
  e.applied = applied_band(requested, original.nyquist_hz());
  e.original = band_energy(original, e.applied);
  e.generated = band_energy(generated, e.applied);
  if (e.original > 0.0) e.ratio = e.generated / e.original;
  return e;
}

}  // namespace

dsp::TrapezoidBand applied_band(const dsp::TrapezoidBand& requested, double nyquist_hz) {
  if (requested.f4 <= nyquist_hz) return requested;
  return dsp::fit_band_to_nyquist(requested, requested.f4, nyquist_hz);
}

double band_energy(const Trace& trace, const dsp::TrapezoidBand& band) {
  const auto spectrum = dsp::amplitude_spectrum(trace);
  double energy = 0.0;
  for (std::size_t k = 0; k < spectrum.freqs.size(); ++k)
    energy += band.gain(spectrum.freqs[k]) * spectrum.amplitude[k] * spectrum.amplitude[k];
  return energy;
}

SpectrumComparison spectrum_report(const Trace& original, const Trace& generated, const dsp::TrapezoidBand& low,
                                   const dsp::TrapezoidBand& high, const dsp::TrapezoidBand& mid) {
  require_aligned(original, generated, "spectrum_report");
  return {energy_pair("low", original, generated, low), energy_pair("mid", original, generated, mid),
          energy_pair("high", original, generated, high)};
}

double sidelobe_metric(const Trace& trace) {
  require_nonzero(trace);
  const auto& x = trace.samples;
  std::vector<double> a(x.size(), 0.0);
  for (std::size_t lag = 0; lag < x.size(); ++lag)
    for (std::size_t i = 0; i + lag < x.size(); ++i) a[lag] += x[i] * x[i + lag];
  return sidelobe_from_autocorrelation(a);
}

double sidelobe_metric_spectral(const Trace& trace) {
  require_nonzero(trace);
  const std::size_t n = trace.size();
  std::vector<double> padded(trace.samples);
  padded.resize(2 * n, 0.0);
  auto bins = fft::rfft(padded);
  for (auto& b : bins) b = std::norm(b);
  auto a = fft::irfft(bins, 2 * n);
  a.resize(n);
  return sidelobe_from_autocorrelation(a);
}

double band_consistency(const Trace& generated, const Trace& original_seismic,
                        const dsp::TrapezoidBand& seismic_band) {
  require_aligned(generated, original_seismic, "band_consistency");
  const auto filtered = dsp::bandpass_trapezoid(generated, applied_band(seismic_band, generated.nyquist_hz()));
  return correlation(filtered.samples, original_seismic.samples, "band_consistency");
}

double blind_validation(const Trace& generated, const Trace& log) {
  require_aligned(generated, log, "blind_validation");
  return correlation(generated.samples, log.samples, "blind_validation");
}

QcRow evaluate_well(const TracePair& pair, const Trace& generated, PairRole role) {
  QcRow row;
  row.well_id = pair.well_id;
  row.role = role;
  row.tie_class = pair.tie_class;
  row.blind_corr = blind_validation(generated, pair.log);
  row.baseline_corr = correlation(pair.seismic.samples, pair.log.samples, "baseline");
  row.band_consistency = band_consistency(generated, pair.seismic);
  row.sidelobe_generated = sidelobe_metric(generated);
  row.sidelobe_seismic = sidelobe_metric(pair.seismic);
  row.spectrum = spectrum_report(pair.seismic, generated);
  return row;
}

std::string qc_report_csv(const std::vector<QcRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "well_id,role,tie_class,blind_corr,baseline_corr,band_consistency,sidelobe_generated,sidelobe_seismic,"
        "low_ratio,mid_ratio,high_ratio\n";
  const auto ratio = [&os](const BandEnergy& e) {
    if (e.ratio) os << *e.ratio;
  };
  for (const auto& r : rows) {
    os << r.well_id << ',' << to_string(r.role) << ',' << (r.tie_class ? to_string(*r.tie_class) : "") << ','
       << r.blind_corr << ',' << r.baseline_corr << ',' << r.band_consistency << ',' << r.sidelobe_generated << ','
       << r.sidelobe_seismic << ',';
    ratio(r.spectrum.low);
    os << ',';
    ratio(r.spectrum.mid);
    os << ',';
    ratio(r.spectrum.high);
    os << '\n';
  }
  return os.str();
}

std::string spectrum_report_csv(const std::vector<QcRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "well_id,band,requested,applied,original_energy,generated_energy,ratio\n";
  for (const auto& r : rows)
    for (const auto* e : {&r.spectrum.low, &r.spectrum.mid, &r.spectrum.high}) {
      os << r.well_id << ',' << e->label << ',' << e->requested.to_string() << ',' << e->applied.to_string() << ','
         << e->original << ',' << e->generated << ',';
      if (e->ratio) os << *e->ratio;
      os << '\n';
    }
  return os.str();
}

StudyReport training_combination_study(const std::vector<TracePair>& pairs,
                                       const std::vector<welltie::SelectionPolicy>& policies,
                                       const cgan::TrainConfig& cfg, const std::string& probe_well,
                                       const StudyOptions& options) {
  if (policies.empty()) throw StudyError("study needs at least one policy");
  const auto probe = std::find_if(pairs.begin(), pairs.end(), [&](const auto& p) { return p.well_id == probe_well; });
  if (probe == pairs.end()) throw StudyError("probe well " + probe_well + " is not in the dataset");

  std::vector<welltie::TrainingSplit> splits;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    splits.push_back(welltie::select_training(pairs, policies[i]));
    for (const auto& p : splits.back().train)
      if (p.well_id == probe_well)
        throw StudyError("probe well " + probe_well + " is in the training set of policy " + std::to_string(i));
  }

  StudyReport report;
  report.probe_well = probe_well;
  for (const auto& split : splits) {
    const auto result = cgan::train(split.train, cfg, {std::nullopt, options.verbose});
    const auto translators = inference::translators_from(result.checkpoints);
    auto ensemble = inference::ensemble_stats(translators, probe->seismic, options.realizations, options.seed);
    PolicyOutcome outcome;
    for (const auto& p : split.train) outcome.train_wells.push_back(p.well_id);
    outcome.probe_output = Trace{probe_well, TraceKind::Broadband, probe->seismic.dt_ms, probe->seismic.t0_ms,
                                 std::move(ensemble.stats.mean)};
    outcome.blind_score = blind_validation(outcome.probe_output, probe->log);
    report.policies.push_back(std::move(outcome));
  }
  for (std::size_t i = 0; i < report.policies.size(); ++i)
    for (std::size_t j = i + 1; j < report.policies.size(); ++j) {
      const auto& a = report.policies[i].probe_output.samples;
      const auto& b = report.policies[j].probe_output.samples;
      double ss = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) ss += (a[k] - b[k]) * (a[k] - b[k]);
      report.pairwise.push_back({i, j, std::sqrt(ss / static_cast<double>(a.size()))});
    }
  return report;
}

std::string study_report_csv(const StudyReport& report) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "record,policy_a,policy_b,value,train_wells\n";
  for (std::size_t i = 0; i < report.policies.size(); ++i) {
    std::string wells;
    for (const auto& w : report.policies[i].train_wells) wells += (wells.empty() ? "" : ";") + w;
    os << "blind_validation," << i << ",," << report.policies[i].blind_score << ',' << wells << '\n';
  }
  for (const auto& d : report.pairwise) os << "rms_difference," << d.first << ',' << d.second << ',' << d.rms_difference << ",\n";
  return os.str();
}

}  // namespace bandext::qc
