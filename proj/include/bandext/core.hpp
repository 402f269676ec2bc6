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

// Trace, pair and volume types plus the BXT1 binary container and the
// JSON dataset manifest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bandext/errors.hpp"

namespace bandext {

inline constexpr std::size_t kCanonicalTraceLength = 512;
inline constexpr double kCanonicalDtMs = 2.0;

enum class TraceKind : std::uint8_t { Seismic = 0, Log = 1, Broadband = 2 };
enum class TieClass { Good, Fair, Poor };
enum class PairRole { Train, Validation, Unassigned };

std::string_view to_string(TraceKind kind);
std::string_view to_string(TieClass tie);
std::string_view to_string(PairRole role);
TieClass parse_tie_class(std::string_view text);
PairRole parse_pair_role(std::string_view text);

struct Trace {
  std::string id;
  TraceKind kind = TraceKind::Seismic;
  double dt_ms = kCanonicalDtMs;
  double t0_ms = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  // Nyquist frequency in Hz.
  double nyquist_hz() const { return 500.0 / dt_ms; }

  friend bool operator==(const Trace&, const Trace&) = default;
};

// Throws DataError when the trace is empty, has a non-positive interval or
// holds non-finite samples.
void validate_trace(const Trace& trace);

struct TracePair {
  std::string well_id;
  Trace seismic;
  Trace log;
  std::optional<TieClass> tie_class;
};

struct ManifestEntry {
  std::string well_id;
  std::string seismic_path;
  std::string log_path;
  std::optional<TieClass> tie_class;
  PairRole role = PairRole::Unassigned;
};

struct DatasetManifest {
  std::vector<ManifestEntry> pairs;
  std::uint64_t seed = 0;
  std::string description;
  // Peak frequency of the wavelet used to build the seismic, when known.
  // Well ties convolve the log with a Ricker of this frequency.
  std::optional<double> wavelet_peak_hz;
};

struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<TracePair> pairs;  // same order as manifest.pairs
};

// Grid position of a trace inside a volume.
struct TraceKey {
  int inline_no = 0;
  int xline_no = 0;
  auto operator<=>(const TraceKey&) const = default;
};

struct Volume {
  std::map<TraceKey, Trace> traces;
  double dt_ms = kCanonicalDtMs;
};

// Throws GeometryError naming the first trace whose dt or length disagrees.
void validate_volume(const Volume& volume);

// BXT1 container: "BXT1", u32 version=1, u32 n, f32 dt_ms, f32 t0_ms,
// u8 kind, 3 zero bytes, n x f32 samples; all little-endian.
inline constexpr std::size_t kBxtHeaderSize = 24;

std::vector<std::uint8_t> encode_trace(const Trace& trace);
Trace decode_trace(const std::vector<std::uint8_t>& bytes, std::string id = {});

void write_trace(const Trace& trace, const std::filesystem::path& path);
// The trace id is taken from the file stem.
Trace read_trace(const std::filesystem::path& path);

DatasetManifest parse_manifest(const std::string& json_text);
std::string manifest_to_json(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Loads the manifest and every referenced pair. Relative trace paths are
// resolved against the manifest's directory. Logs whose interval or length
// differ from the seismic are resampled onto the seismic grid.
LoadedDataset load_manifest(const std::filesystem::path& path);

// Volume directory layout: index.json plus one BXT1 file per trace.
void write_volume(const Volume& volume, const std::filesystem::path& dir);
Volume read_volume(const std::filesystem::path& dir);

double peak_abs(const std::vector<double>& samples);
double rms(const std::vector<double>& samples);

}  // namespace bandext
