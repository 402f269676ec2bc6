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

// Validation metrics for generated broadband traces and the
// training-combination study.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bandext/cgan.hpp"
#include "bandext/core.hpp"
#include "bandext/dsp.hpp"
#include "bandext/welltie.hpp"

namespace bandext::qc {

struct BandEnergy {
  std::string label;
  dsp::TrapezoidBand requested;
  dsp::TrapezoidBand applied;  // requested, rescaled when it exceeds Nyquist
  double original = 0.0;
  double generated = 0.0;
  // generated / original; absent when the original carries no energy.
  std::optional<double> ratio;
};

struct SpectrumComparison {
  BandEnergy low;
  BandEnergy mid;
  BandEnergy high;
};

// Band to use for a trace with the given Nyquist. Bands reaching past it
// are rescaled so their upper corner lands on Nyquist.
dsp::TrapezoidBand applied_band(const dsp::TrapezoidBand& requested, double nyquist_hz);

// Sum over rfft bins of gain(f) * |X(f)|^2.
double band_energy(const Trace& trace, const dsp::TrapezoidBand& band);

SpectrumComparison spectrum_report(const Trace& original, const Trace& generated,
                                   const dsp::TrapezoidBand& low = dsp::bands::kLowFrequency,
                                   const dsp::TrapezoidBand& high = dsp::bands::kHighFrequency,
                                   const dsp::TrapezoidBand& mid = dsp::bands::kSeismic);

// Fraction of normalised autocorrelation energy outside the main lobe,
// which ends at the first lag where the autocorrelation reaches zero.
// Throws MetricError for an all-zero trace.
double sidelobe_metric(const Trace& trace);
// Same quantity with the autocorrelation taken through the power spectrum.
double sidelobe_metric_spectral(const Trace& trace);

// corr(bandpass(generated, band), original_seismic).
double band_consistency(const Trace& generated, const Trace& original_seismic,
                        const dsp::TrapezoidBand& seismic_band = dsp::bands::kSeismic);

// corr(generated, log).
double blind_validation(const Trace& generated, const Trace& log);

struct QcRow {
  std::string well_id;
  PairRole role = PairRole::Unassigned;
  std::optional<TieClass> tie_class;
  double blind_corr = 0.0;
  double baseline_corr = 0.0;
  double band_consistency = 0.0;
  double sidelobe_generated = 0.0;
  double sidelobe_seismic = 0.0;
  SpectrumComparison spectrum;
};

QcRow evaluate_well(const TracePair& pair, const Trace& generated, PairRole role);

std::string qc_report_csv(const std::vector<QcRow>& rows);
std::string spectrum_report_csv(const std::vector<QcRow>& rows);

struct StudyOptions {
  std::size_t realizations = 20;
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct PolicyOutcome {
  std::vector<std::string> train_wells;
  Trace probe_output;
  double blind_score = 0.0;
};

struct PairwiseDifference {
  std::size_t first = 0;
  std::size_t second = 0;
  double rms_difference = 0.0;
};

struct StudyReport {
  std::string probe_well;
  std::vector<PolicyOutcome> policies;
  std::vector<PairwiseDifference> pairwise;
};

// One model per policy, all trained with cfg, each scored on the probe
// well. Throws StudyError when the probe well is unknown or ends up in a
// training set.
StudyReport training_combination_study(const std::vector<TracePair>& pairs,
                                       const std::vector<welltie::SelectionPolicy>& policies,
                                       const cgan::TrainConfig& cfg, const std::string& probe_well,
                                       const StudyOptions& options = {});

std::string study_report_csv(const StudyReport& report);

}  // namespace bandext::qc
