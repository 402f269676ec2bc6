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

#include "bandext/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "bandext/cgan.hpp"
#include "bandext/core.hpp"
#include "bandext/dsp.hpp"
#include "bandext/inference.hpp"
#include "bandext/qc.hpp"
#include "bandext/synth.hpp"
#include "bandext/welltie.hpp"
#include "json.hpp"

namespace bandext::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  bool verbose = false;
};

// Flag value first, then BANDEXT_SEED, then the supplied default.
std::uint64_t resolve_seed(const Common& c, std::uint64_t fallback) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("BANDEXT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw DataError(std::string("BANDEXT_SEED is not an unsigned integer: ") + env);
  }
  return fallback;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw WriteError("cannot write " + path.string());
  out << text;
  if (!out) throw WriteError("failed writing " + path.string());
}

// Stages a new output directory beside the target and renames it into place
// on commit, so a failed run leaves no half-written directory. An existing
// directory is written in place.
class OutputDir {
 public:
  explicit OutputDir(const std::string& target) : target_(target) {
    if (target_.empty()) throw DataError("--out is required");
    if (fs::exists(target_)) {
      if (!fs::is_directory(target_)) throw WriteError(target_.string() + " exists and is not a directory");
      staging_ = target_;
    } else {
      if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
      staging_ = target_;
      staging_ += ".partial-" + std::to_string(::getpid());
      fs::remove_all(staging_);
      fs::create_directories(staging_);
    }
  }
  ~OutputDir() {
    if (!committed_ && staging_ != target_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  const fs::path& path() const { return staging_; }
  fs::path operator/(const std::string& name) const { return staging_ / name; }
  const fs::path& target() const { return target_; }

  void commit() {
    if (staging_ != target_) fs::rename(staging_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path staging_;
  bool committed_ = false;
};

void write_run_json(const OutputDir& out, const std::string& subcommand, json config) {
  json doc;
  doc["subcommand"] = subcommand;
  doc["config"] = std::move(config);
  write_text(out / "run.json", doc.dump(2) + "\n");
}


dsp::TrapezoidBand band_or(const std::string& text, const dsp::TrapezoidBand& fallback) {
  return text.empty() ? fallback : dsp::parse_band(text);
}

bool is_volume(const fs::path& p) { return fs::is_directory(p) && fs::exists(p / "index.json"); }

std::vector<fs::path> checkpoint_paths(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".bin" && e.path().filename().string().rfind("ckpt_", 0) == 0)
          found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      out.push_back(p);
    } else {
      throw CheckpointError("checkpoint path " + p.string() + " does not exist");
    }
  }
  if (out.empty()) throw InferenceError("no checkpoints found");
  return out;
}

json paths_json(const std::vector<fs::path>& paths) {
  json arr = json::array();
  for (const auto& p : paths) arr.push_back(p.string());
  return arr;
}

LoadedDataset load_dataset(const std::string& manifest) {
  if (manifest.empty()) throw ManifestError("--manifest is required");
  return load_manifest(manifest);
}

welltie::TieOptions tie_options(const DatasetManifest& m, const std::string& band, double max_lag) {
  welltie::TieOptions o;
  o.seismic_band = band_or(band, dsp::bands::kSeismic);
  o.max_lag_ms = max_lag;
  o.wavelet_peak_hz = m.wavelet_peak_hz;
  return o;
}

// Fills missing tie classes from the well-tie classifier.
void ensure_tie_classes(LoadedDataset& data) {
  welltie::TieOptions o;
  o.wavelet_peak_hz = data.manifest.wavelet_peak_hz;
  for (auto& p : data.pairs)
    if (!p.tie_class) p.tie_class = welltie::classify_tie(welltie::tie_score(p, o));
}

cgan::TrainConfig train_config(const std::string& config_path) {
  return config_path.empty() ? cgan::TrainConfig{} : cgan::config_from_json(read_text(config_path));
}

// ---------------------------------------------------------------------------
// Subcommands

struct SynthArgs {
  std::string config;
};

void cmd_synth(const Common& c, const SynthArgs& a) {
  auto cfg = a.config.empty() ? synth::SynthConfig{} : synth::config_from_json(read_text(a.config));
  cfg.seed = resolve_seed(c, cfg.seed);
  synth::validate_config(cfg);
  OutputDir out(c.out);
  synth::gen_dataset(cfg, out.path());
  write_run_json(out, "synth", json::parse(synth::config_to_json(cfg)));
  out.commit();
}

struct TieArgs {
  std::string manifest;
  std::string band;
  double max_lag_ms = 20.0;
};

void cmd_tie(const Common& c, const TieArgs& a) {
  const auto data = load_dataset(a.manifest);
  const auto options = tie_options(data.manifest, a.band, a.max_lag_ms);
  OutputDir out(c.out);
  std::ostringstream csv;
  csv << std::setprecision(10) << "well_id,amplitude_score,character_score,best_lag_ms,class\n";
  for (const auto& p : data.pairs) {
    const auto s = welltie::tie_score(p, options);
    csv << p.well_id << ',' << s.amplitude_score << ',' << s.character_score << ',' << s.best_lag_ms << ','
        << to_string(welltie::classify_tie(s)) << '\n';
  }
  write_text(out / "tie_scores.csv", csv.str());
  write_run_json(out, "tie",
                 {{"manifest", a.manifest},
                  {"band", options.seismic_band.to_string()},
                  {"max_lag_ms", a.max_lag_ms},
                  {"wavelet_peak_hz", options.wavelet_peak_hz ? json(*options.wavelet_peak_hz) : json(nullptr)}});
  out.commit();
}

struct SelectArgs {
  std::string manifest;
  std::size_t n_good = 3;
  std::size_t n_fair = 1;
  std::size_t n_poor = 0;
  std::vector<std::string> exclude;
};

void cmd_select(const Common& c, const SelectArgs& a) {
  auto data = load_dataset(a.manifest);
  ensure_tie_classes(data);
  welltie::SelectionPolicy policy;
  policy.n_good = a.n_good;
  policy.n_fair = a.n_fair;
  policy.n_poor = a.n_poor;
  policy.exclude_poor = a.n_poor == 0;
  policy.seed = resolve_seed(c, 0);
  policy.exclude_wells = {a.exclude.begin(), a.exclude.end()};
  const auto split = welltie::select_training(data.pairs, policy);

  OutputDir out(c.out);
  std::set<std::string> train_ids;
  for (const auto& p : split.train) train_ids.insert(p.well_id);
  auto manifest = data.manifest;
  const fs::path source_dir = fs::absolute(a.manifest).parent_path();
  const fs::path target_dir = fs::absolute(out.target());
  for (std::size_t i = 0; i < manifest.pairs.size(); ++i) {
    auto& e = manifest.pairs[i];
    e.tie_class = data.pairs[i].tie_class;
    e.role = train_ids.count(e.well_id) ? PairRole::Train : PairRole::Validation;
    for (auto* path : {&e.seismic_path, &e.log_path}) {
      const fs::path resolved = fs::path(*path).is_absolute() ? fs::path(*path) : source_dir / *path;
      *path = fs::relative(fs::weakly_canonical(resolved), fs::weakly_canonical(target_dir)).generic_string();
    }
  }
  write_manifest(manifest, out / "manifest.json");
  write_run_json(out, "select",
                 {{"manifest", a.manifest},
                  {"n_good", a.n_good},
                  {"n_fair", a.n_fair},
                  {"n_poor", a.n_poor},
                  {"seed", policy.seed},
                  {"exclude_wells", a.exclude}});
  out.commit();
}

struct TrainArgs {
  std::string manifest;
  std::string config;
  std::optional<std::size_t> epochs;
  std::optional<double> lambda_l1;
  std::optional<std::size_t> checkpoint_every;
  std::optional<std::size_t> keep_checkpoints;
};

void cmd_train(const Common& c, const TrainArgs& a) {
  auto data = load_dataset(a.manifest);
  auto cfg = train_config(a.config);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lambda_l1) cfg.lambda_l1 = *a.lambda_l1;
  if (a.checkpoint_every) cfg.checkpoint_every = *a.checkpoint_every;
  if (a.keep_checkpoints) cfg.keep_checkpoints = *a.keep_checkpoints;
  cfg.seed = resolve_seed(c, cfg.seed);
  cgan::validate_config(cfg);

  std::vector<TracePair> train;
  for (std::size_t i = 0; i < data.pairs.size(); ++i)
    if (data.manifest.pairs[i].role == PairRole::Train) train.push_back(data.pairs[i]);
  if (train.empty()) {
    // No roles assigned yet: apply the default selection policy.
    ensure_tie_classes(data);
    welltie::SelectionPolicy policy;
    policy.seed = cfg.seed;
    train = welltie::select_training(data.pairs, policy).train;
  }
  OutputDir out(c.out);
  cgan::train(train, cfg, {out.path(), c.verbose});
  json run = json::parse(cgan::config_to_json(cfg));
  json wells = json::array();
  for (const auto& p : train) wells.push_back(p.well_id);
  write_run_json(out, "train", {{"manifest", a.manifest}, {"train_wells", wells}, {"train", run}});
  out.commit();
}

struct InferArgs {
  std::vector<std::string> checkpoints;
  std::string input;
  std::size_t realizations = 100;
  std::size_t workers = 1;
};

void cmd_infer(const Common& c, const InferArgs& a) {
  const auto paths = checkpoint_paths(a.checkpoints);
  const auto translators = inference::load_translators(paths);
  const std::uint64_t seed = resolve_seed(c, 0);
  OutputDir out(c.out);
  if (is_volume(a.input)) {
    const auto volume = read_volume(a.input);
    write_volume(inference::process_volume(translators, volume, a.realizations, seed, a.workers), out / "volume");
  } else {
    const auto trace = read_trace(a.input);
    const auto ensemble = inference::ensemble_stats(translators, trace, a.realizations, seed);
    write_trace(Trace{trace.id, TraceKind::Broadband, trace.dt_ms, trace.t0_ms, ensemble.stats.mean},
                out / (trace.id + ".bxt"));
  }
  write_run_json(out, "infer",
                 {{"checkpoints", paths_json(paths)},
                  {"input", a.input},
                  {"realizations", a.realizations},
                  {"seed", seed},
                  {"workers", a.workers}});
  out.commit();
}

struct StatsArgs {
  std::vector<std::string> checkpoints;
  std::string input;
  std::size_t realizations = 100;
  std::vector<std::size_t> samples;
  std::size_t bins = inference::kDefaultHistogramBins;
};

void cmd_stats(const Common& c, const StatsArgs& a) {
  const auto paths = checkpoint_paths(a.checkpoints);
  const auto translators = inference::load_translators(paths);
  const std::uint64_t seed = resolve_seed(c, 0);
  const auto trace = read_trace(a.input);
  const auto ensemble = inference::ensemble_stats(translators, trace, a.realizations, seed, a.samples, a.bins);
  OutputDir out(c.out);
  write_text(out / "stats.csv", inference::stats_csv(ensemble.stats));
  write_text(out / "histograms.csv", inference::histograms_csv(ensemble.stats));
  write_trace(Trace{trace.id, TraceKind::Broadband, trace.dt_ms, trace.t0_ms, ensemble.stats.mean},
              out / (trace.id + ".bxt"));
  write_run_json(out, "stats",
                 {{"checkpoints", paths_json(paths)},
                  {"input", a.input},
                  {"realizations", a.realizations},
                  {"seed", seed},
                  {"histogram_samples", a.samples},
                  {"bins", a.bins}});
  out.commit();
}

struct FilterArgs {
  std::string input;
  std::string band;
};

void cmd_filter(const Common& c, const FilterArgs& a) {
  if (a.band.empty()) throw BandError("--band is required");
  const auto band = dsp::parse_band(a.band);
  OutputDir out(c.out);
  if (is_volume(a.input)) {
    auto volume = read_volume(a.input);
    for (auto& [key, trace] : volume.traces) trace = dsp::bandpass_trapezoid(trace, band);
    write_volume(volume, out / "volume");
  } else {
    const auto trace = read_trace(a.input);
    write_trace(dsp::bandpass_trapezoid(trace, band), out / (trace.id + ".bxt"));
  }
  write_run_json(out, "filter", {{"input", a.input}, {"band", band.to_string()}});
  out.commit();
}

struct SpectrumArgs {
  std::string original;
  std::string generated;
  std::string low;
  std::string high;
};

void cmd_spectrum(const Common& c, const SpectrumArgs& a) {
  const auto original = read_trace(a.original);
  const auto generated = read_trace(a.generated);
  const auto low = band_or(a.low, dsp::bands::kLowFrequency);
  const auto high = band_or(a.high, dsp::bands::kHighFrequency);
  qc::QcRow row;
  row.well_id = original.id;
  row.spectrum = qc::spectrum_report(original, generated, low, high);
  OutputDir out(c.out);
  write_text(out / "spectrum_report.csv", qc::spectrum_report_csv({row}));
  write_run_json(out, "spectrum",
                 {{"original", a.original},
                  {"generated", a.generated},
                  {"low", low.to_string()},
                  {"high", high.to_string()}});
  out.commit();
}

struct QcArgs {
  std::string manifest;
  std::vector<std::string> checkpoints;
  std::size_t realizations = 100;
  std::size_t workers = 1;
};

void cmd_qc(const Common& c, const QcArgs& a) {
  auto data = load_dataset(a.manifest);
  ensure_tie_classes(data);
  const auto paths = checkpoint_paths(a.checkpoints);
  const auto translators = inference::load_translators(paths);
  const std::uint64_t seed = resolve_seed(c, 0);

  std::vector<Trace> generated(data.pairs.size());
  std::vector<std::string> errors(data.pairs.size());
  const int threads = static_cast<int>(std::max<std::size_t>(a.workers, 1));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    try {
      const auto& s = data.pairs[i].seismic;
      auto e = inference::ensemble_stats(translators, s, a.realizations, derive_seed(seed, i));
      generated[i] = Trace{data.pairs[i].well_id, TraceKind::Broadband, s.dt_ms, s.t0_ms, std::move(e.stats.mean)};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw InferenceError(data.pairs[i].well_id + ": " + errors[i]);

  std::vector<qc::QcRow> rows;
  for (std::size_t i = 0; i < data.pairs.size(); ++i)
    rows.push_back(qc::evaluate_well(data.pairs[i], generated[i], data.manifest.pairs[i].role));

  OutputDir out(c.out);
  fs::create_directories(out / "generated");
  for (const auto& g : generated) write_trace(g, out / "generated" / (g.id + ".bxt"));
  write_text(out / "qc_report.csv", qc::qc_report_csv(rows));
  write_text(out / "spectrum_report.csv", qc::spectrum_report_csv(rows));
  write_run_json(out, "qc",
                 {{"manifest", a.manifest},
                  {"checkpoints", paths_json(paths)},
                  {"realizations", a.realizations},
                  {"seed", seed},
                  {"workers", a.workers}});
  out.commit();
}

struct StudyArgs {
  std::string manifest;
  std::string config;
  std::string probe;
  std::vector<std::string> policies;
  std::optional<std::size_t> epochs;
  std::optional<double> lambda_l1;
  std::optional<std::size_t> checkpoint_every;
  std::optional<std::size_t> keep_checkpoints;
  std::size_t realizations = 20;
};

// "good:fair:poor:seed"
welltie::SelectionPolicy parse_policy(const std::string& text) {
  std::vector<std::uint64_t> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw StudyError("policy '" + text + "' is not of the form good:fair:poor:seed");
    }
  }
  if (v.size() != 4) throw StudyError("policy '" + text + "' is not of the form good:fair:poor:seed");
  welltie::SelectionPolicy p;
  p.n_good = v[0];
  p.n_fair = v[1];
  p.n_poor = v[2];
  p.exclude_poor = v[2] == 0;
  p.seed = v[3];
  return p;
}

void cmd_study(const Common& c, const StudyArgs& a) {
  auto data = load_dataset(a.manifest);
  ensure_tie_classes(data);
  if (a.probe.empty()) throw StudyError("--probe is required");
  auto cfg = train_config(a.config);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lambda_l1) cfg.lambda_l1 = *a.lambda_l1;
  if (a.checkpoint_every) cfg.checkpoint_every = *a.checkpoint_every;
  if (a.keep_checkpoints) cfg.keep_checkpoints = *a.keep_checkpoints;
  cfg.seed = resolve_seed(c, cfg.seed);
  cgan::validate_config(cfg);

  std::vector<std::string> policy_text = a.policies;
  if (policy_text.empty()) policy_text = {"3:1:0:1", "3:1:0:2"};
  std::vector<welltie::SelectionPolicy> policies;
  for (const auto& t : policy_text) policies.push_back(parse_policy(t));

  const auto report =
      qc::training_combination_study(data.pairs, policies, cfg, a.probe, {a.realizations, cfg.seed, c.verbose});
  OutputDir out(c.out);
  write_text(out / "study_report.csv", qc::study_report_csv(report));
  write_run_json(out, "study",
                 {{"manifest", a.manifest},
                  {"probe", a.probe},
                  {"policies", policy_text},
                  {"realizations", a.realizations},
                  {"train", json::parse(cgan::config_to_json(cfg))}});
  out.commit();
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Global seed (falls back to BANDEXT_SEED)");
  sub->add_option("--out", c.out, "Output directory")->required();
  sub->add_flag("-v,--verbose", c.verbose, "Progress on standard error");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Seismic bandwidth extension with a spectrogram-conditioned GAN", "bandext"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Common common;
  SynthArgs synth_args;
  TieArgs tie_args;
  SelectArgs select_args;
  TrainArgs train_args;
  InferArgs infer_args;
  StatsArgs stats_args;
  FilterArgs filter_args;
  SpectrumArgs spectrum_args;
  QcArgs qc_args;
  StudyArgs study_args;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic seismic/log dataset");
  add_common(synth, common);
  synth->add_option("--config", synth_args.config, "Synthesis config JSON");

  auto* tie = app.add_subcommand("tie", "Score seismic-well ties");
  add_common(tie, common);
  tie->add_option("--manifest", tie_args.manifest, "Dataset manifest")->required();
  tie->add_option("--band", tie_args.band, "Seismic band f1-f2-f3-f4");
  tie->add_option("--max-lag", tie_args.max_lag_ms, "Lag search half-width in ms");

  auto* select = app.add_subcommand("select", "Choose training pairs and write a manifest with roles");
  add_common(select, common);
  select->add_option("--manifest", select_args.manifest, "Dataset manifest")->required();
  select->add_option("--n-good", select_args.n_good, "Good pairs to train on");
  select->add_option("--n-fair", select_args.n_fair, "Fair pairs to train on");
  select->add_option("--n-poor", select_args.n_poor, "Poor pairs to train on (0 excludes Poor)");
  select->add_option("--exclude", select_args.exclude, "Wells kept out of training");

  auto* train = app.add_subcommand("train", "Train the GAN on the manifest's training pairs");
  add_common(train, common);
  train->add_option("--manifest", train_args.manifest, "Dataset manifest")->required();
  train->add_option("--config", train_args.config, "Training config JSON");
  train->add_option("--epochs", train_args.epochs, "Training epochs");
  train->add_option("--lambda-l1", train_args.lambda_l1, "Weight of the L1 term");
  train->add_option("--checkpoint-every", train_args.checkpoint_every, "Checkpoint interval in epochs");
  train->add_option("--keep-checkpoints", train_args.keep_checkpoints, "Keep only the last N checkpoints");

  auto* infer = app.add_subcommand("infer", "Generate broadband output for a trace or volume");
  add_common(infer, common);
  infer->add_option("--checkpoints", infer_args.checkpoints, "Checkpoint files or directories")->required();
  infer->add_option("--input", infer_args.input, "BXT1 trace or volume directory")->required();
  infer->add_option("--realizations", infer_args.realizations, "Realizations per trace");
  infer->add_option("--workers", infer_args.workers, "Worker threads");

  auto* stats = app.add_subcommand("stats", "Ensemble statistics for one trace");
  add_common(stats, common);
  stats->add_option("--checkpoints", stats_args.checkpoints, "Checkpoint files or directories")->required();
  stats->add_option("--input", stats_args.input, "BXT1 trace")->required();
  stats->add_option("--realizations", stats_args.realizations, "Realizations");
  stats->add_option("--samples", stats_args.samples, "Sample indices to histogram")->delimiter(',');
  stats->add_option("--bins", stats_args.bins, "Histogram bins");

  auto* filter = app.add_subcommand("filter", "Trapezoid band-pass a trace or volume");
  add_common(filter, common);
  filter->add_option("--input", filter_args.input, "BXT1 trace or volume directory")->required();
  filter->add_option("--band", filter_args.band, "Band f1-f2-f3-f4")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Band energy comparison of two traces");
  add_common(spectrum, common);
  spectrum->add_option("--original", spectrum_args.original, "Original trace")->required();
  spectrum->add_option("--generated", spectrum_args.generated, "Generated trace")->required();
  spectrum->add_option("--low", spectrum_args.low, "Low band f1-f2-f3-f4");
  spectrum->add_option("--high", spectrum_args.high, "High band f1-f2-f3-f4");

  auto* qc = app.add_subcommand("qc", "Per-well validation report");
  add_common(qc, common);
  qc->add_option("--manifest", qc_args.manifest, "Manifest with roles")->required();
  qc->add_option("--checkpoints", qc_args.checkpoints, "Checkpoint files or directories")->required();
  qc->add_option("--realizations", qc_args.realizations, "Realizations per well");
  qc->add_option("--workers", qc_args.workers, "Worker threads");

  auto* study = app.add_subcommand("study", "Compare models trained on different pair selections");
  add_common(study, common);
  study->add_option("--manifest", study_args.manifest, "Dataset manifest")->required();
  study->add_option("--probe", study_args.probe, "Held-out probe well")->required();
  study->add_option("--policy", study_args.policies, "Selection policy good:fair:poor:seed (repeatable)");
  study->add_option("--config", study_args.config, "Training config JSON");
  study->add_option("--epochs", study_args.epochs, "Training epochs");
  study->add_option("--lambda-l1", study_args.lambda_l1, "Weight of the L1 term");
  study->add_option("--checkpoint-every", study_args.checkpoint_every, "Checkpoint interval in epochs");
  study->add_option("--keep-checkpoints", study_args.keep_checkpoints, "Keep only the last N checkpoints");
  study->add_option("--realizations", study_args.realizations, "Realizations for the probe ensemble");

  if (args.empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) cmd_synth(common, synth_args);
    else if (tie->parsed()) cmd_tie(common, tie_args);
    else if (select->parsed()) cmd_select(common, select_args);
    else if (train->parsed()) cmd_train(common, train_args);
    else if (infer->parsed()) cmd_infer(common, infer_args);
    else if (stats->parsed()) cmd_stats(common, stats_args);
    else if (filter->parsed()) cmd_filter(common, filter_args);
    else if (spectrum->parsed()) cmd_spectrum(common, spectrum_args);
    else if (qc->parsed()) cmd_qc(common, qc_args);
    else if (study->parsed()) cmd_study(common, study_args);
  } catch (const std::exception& e) {
    std::cerr << "bandext: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace bandext::cli
