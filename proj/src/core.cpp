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

#include "bandext/core.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "bandext/dsp.hpp"
#include "json.hpp"

namespace bandext {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "BXT1 encoding assumes a little-endian host");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open trace file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Seismic: return "seismic";
    case TraceKind::Log: return "log";
    case TraceKind::Broadband: return "broadband";
  }
  return "unknown";
}

std::string_view to_string(TieClass tie) {
  switch (tie) {
    case TieClass::Good: return "good";
    case TieClass::Fair: return "fair";
    case TieClass::Poor: return "poor";
  }
  return "unknown";
}

std::string_view to_string(PairRole role) {
  switch (role) {
    case PairRole::Train: return "train";
    case PairRole::Validation: return "validation";
    case PairRole::Unassigned: return "unassigned";
  }
  return "unknown";
}

TieClass parse_tie_class(std::string_view text) {
  if (text == "good" || text == "Good") return TieClass::Good;
  if (text == "fair" || text == "Fair") return TieClass::Fair;
  if (text == "poor" || text == "Poor") return TieClass::Poor;
  throw ManifestError("unknown tie_class: " + std::string(text));
}

PairRole parse_pair_role(std::string_view text) {
  if (text == "train" || text == "Train") return PairRole::Train;
  if (text == "validation" || text == "Validation") return PairRole::Validation;
  if (text == "unassigned" || text == "Unassigned" || text.empty()) return PairRole::Unassigned;
  throw ManifestError("unknown role: " + std::string(text));
}

void validate_trace(const Trace& trace) {
  if (trace.samples.empty()) throw DataError("trace '" + trace.id + "' has no samples");
  if (!(trace.dt_ms > 0.0) || !std::isfinite(trace.dt_ms))
    throw DataError("trace '" + trace.id + "' has non-positive sample interval");
  if (!std::isfinite(trace.t0_ms)) throw DataError("trace '" + trace.id + "' has non-finite t0");
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (!std::isfinite(trace.samples[i]))
      throw DataError("trace '" + trace.id + "' has a non-finite sample at index " + std::to_string(i));
  }
}

void validate_volume(const Volume& volume) {
  std::optional<std::size_t> length;
  for (const auto& [key, trace] : volume.traces) {
    const std::string where =
        "(" + std::to_string(key.inline_no) + ", " + std::to_string(key.xline_no) + ")";
    if (trace.dt_ms != volume.dt_ms) throw GeometryError("trace at " + where + " has a different dt");
    if (length && trace.size() != *length)
      throw GeometryError("trace at " + where + " has a different length");
    length = trace.size();
  }
}

std::vector<std::uint8_t> encode_trace(const Trace& trace) {
  validate_trace(trace);
  std::vector<std::uint8_t> out;
  out.reserve(kBxtHeaderSize + 4 * trace.size());
  out.insert(out.end(), {'B', 'X', 'T', '1'});
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(trace.size()));
  put_f32(out, static_cast<float>(trace.dt_ms));
  put_f32(out, static_cast<float>(trace.t0_ms));
  out.push_back(static_cast<std::uint8_t>(trace.kind));
  out.insert(out.end(), {0, 0, 0});
  for (double s : trace.samples) put_f32(out, static_cast<float>(s));
  return out;
}

Trace decode_trace(const std::vector<std::uint8_t>& bytes, std::string id) {
  if (bytes.size() < kBxtHeaderSize) throw FormatError("truncated BXT1 header");
  if (std::memcmp(bytes.data(), "BXT1", 4) != 0) throw FormatError("bad magic, expected BXT1");
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != 1) throw FormatError("unsupported BXT1 version " + std::to_string(version));
  const std::uint32_t n = get_u32(bytes.data() + 8);
  const std::uint8_t kind = bytes[20];
  if (kind > 2) throw FormatError("unknown trace kind " + std::to_string(kind));
  const std::size_t expected = kBxtHeaderSize + 4 * static_cast<std::size_t>(n);
  if (bytes.size() < expected)
    throw FormatError("truncated payload: header declares " + std::to_string(n) + " samples");
  if (bytes.size() > expected) throw FormatError("trailing bytes after BXT1 payload");

  Trace trace;
  trace.id = std::move(id);
  trace.kind = static_cast<TraceKind>(kind);
  trace.dt_ms = get_f32(bytes.data() + 12);
  trace.t0_ms = get_f32(bytes.data() + 16);
  trace.samples.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) trace.samples[i] = get_f32(bytes.data() + kBxtHeaderSize + 4 * i);
  validate_trace(trace);
  return trace;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  const auto bytes = encode_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WriteError("write failed: " + path.string());
}

Trace read_trace(const std::filesystem::path& path) {
  try {
    return decode_trace(slurp(path), path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

DatasetManifest parse_manifest(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ManifestError(std::string("invalid manifest JSON: ") + e.what());
  }
  if (!doc.contains("pairs") || !doc["pairs"].is_array()) throw ManifestError("manifest lacks a pairs[] array");
  DatasetManifest manifest;
  manifest.seed = doc.value("seed", std::uint64_t{0});
  manifest.description = doc.value("description", std::string{});
  if (doc.contains("wavelet_peak_hz") && doc["wavelet_peak_hz"].is_number())
    manifest.wavelet_peak_hz = doc["wavelet_peak_hz"].get<double>();
  std::set<std::string> seen;
  for (const auto& p : doc["pairs"]) {
    ManifestEntry entry;
    try {
      entry.well_id = p.at("well_id").get<std::string>();
      entry.seismic_path = p.at("seismic").get<std::string>();
      entry.log_path = p.at("log").get<std::string>();
    } catch (const json::exception& e) {
      throw ManifestError(std::string("malformed pair entry: ") + e.what());
    }
    if (entry.well_id.empty()) throw ManifestError("empty well_id");
    if (p.contains("tie_class") && p["tie_class"].is_string())
      entry.tie_class = parse_tie_class(p["tie_class"].get<std::string>());
    if (p.contains("role") && p["role"].is_string()) entry.role = parse_pair_role(p["role"].get<std::string>());
    if (!seen.insert(entry.well_id).second) throw ManifestError("duplicate well_id: " + entry.well_id);
    manifest.pairs.push_back(std::move(entry));
  }
  if (manifest.pairs.empty()) throw ManifestError("manifest has no pairs");
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json doc;
  doc["description"] = manifest.description;
  doc["seed"] = manifest.seed;
  if (manifest.wavelet_peak_hz) doc["wavelet_peak_hz"] = *manifest.wavelet_peak_hz;
  doc["pairs"] = json::array();
  for (const auto& e : manifest.pairs) {
    json p;
    p["well_id"] = e.well_id;
    p["seismic"] = e.seismic_path;
    p["log"] = e.log_path;
    p["tie_class"] = e.tie_class ? json(std::string(to_string(*e.tie_class))) : json(nullptr);
    p["role"] = std::string(to_string(e.role));
    doc["pairs"].push_back(std::move(p));
  }
  return doc.dump(2) + "\n";
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw WriteError("cannot open for writing: " + path.string());
  out << manifest_to_json(manifest);
  if (!out) throw WriteError("write failed: " + path.string());
}

LoadedDataset load_manifest(const std::filesystem::path& path) {
  LoadedDataset out;
  out.manifest = parse_manifest(read_text(path));
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  for (const auto& entry : out.manifest.pairs) {
    const auto seismic_path = resolve(entry.seismic_path);
    const auto log_path = resolve(entry.log_path);
    if (!std::filesystem::exists(seismic_path))
      throw ManifestError("missing trace file for " + entry.well_id + ": " + seismic_path.string());
    if (!std::filesystem::exists(log_path))
      throw ManifestError("missing trace file for " + entry.well_id + ": " + log_path.string());
    TracePair pair;
    pair.well_id = entry.well_id;
    pair.seismic = read_trace(seismic_path);
    pair.log = read_trace(log_path);
    pair.seismic.kind = TraceKind::Seismic;
    pair.log.kind = TraceKind::Log;
    pair.tie_class = entry.tie_class;
    if (pair.log.dt_ms != pair.seismic.dt_ms || pair.log.size() != pair.seismic.size()) {
      try {
        pair.log = dsp::resample_log(pair.log, pair.seismic.dt_ms, pair.seismic.size());
      } catch (const ResampleError& e) {
        throw ManifestError("cannot align log of " + entry.well_id + ": " + e.what());
      }
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

void write_volume(const Volume& volume, const std::filesystem::path& dir) {
  validate_volume(volume);
  std::filesystem::create_directories(dir);
  json index;
  index["dt_ms"] = volume.dt_ms;
  index["traces"] = json::array();
  for (const auto& [key, trace] : volume.traces) {
    const std::string file =
        "il" + std::to_string(key.inline_no) + "_xl" + std::to_string(key.xline_no) + ".bxt";
    write_trace(trace, dir / file);
    index["traces"].push_back({{"inline", key.inline_no}, {"xline", key.xline_no}, {"file", file}});
  }
  std::ofstream out(dir / "index.json", std::ios::trunc);
  if (!out) throw WriteError("cannot write volume index in " + dir.string());
  out << index.dump(2) << "\n";
}

Volume read_volume(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) throw FormatError("missing volume index: " + (dir / "index.json").string());
  json index;
  try {
    index = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid volume index: ") + e.what());
  }
  Volume volume;
  volume.dt_ms = index.value("dt_ms", kCanonicalDtMs);
  for (const auto& t : index.at("traces")) {
    TraceKey key{t.at("inline").get<int>(), t.at("xline").get<int>()};
    volume.traces.emplace(key, read_trace(dir / t.at("file").get<std::string>()));
  }
  validate_volume(volume);
  return volume;
}

double peak_abs(const std::vector<double>& samples) {
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  return peak;
}

double rms(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

}  // namespace bandext
