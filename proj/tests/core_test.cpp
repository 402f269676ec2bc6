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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "bandext/core.hpp"
#include "test_support.hpp"

namespace bandext {
namespace {

using testing::TempDir;
using testing::float_exact_samples;
using testing::make_trace;
using testing::read_bytes;

TEST(TraceFormat, HeaderMatchesHandAssembledBytes) {
  const auto bytes = encode_trace(make_trace(std::vector<double>(512, 0.0)));
  const std::vector<std::uint8_t> expected = {
      0x42, 0x58, 0x54, 0x31,  // "BXT1"
      0x01, 0x00, 0x00, 0x00,  // version
      0x00, 0x02, 0x00, 0x00,  // 512 samples
      0x00, 0x00, 0x00, 0x40,  // 2.0f
      0x00, 0x00, 0x00, 0x00,  // 0.0f
      0x00, 0x00, 0x00, 0x00,  // kind + reserved
  };
  ASSERT_EQ(bytes.size(), kBxtHeaderSize + 512 * 4);
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), bytes.begin()));
}

TEST(TraceFormat, SampleBytesAreLittleEndianFloat) {
  const auto bytes = encode_trace(make_trace({1.0, -2.5}, TraceKind::Log));
  EXPECT_EQ(bytes[20], 1);
  const std::vector<std::uint8_t> samples(bytes.begin() + kBxtHeaderSize, bytes.end());
  EXPECT_EQ(samples, (std::vector<std::uint8_t>{0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x20, 0xc0}));
}

TEST(TraceFormat, FileRoundTripIsExact) {
  TempDir dir("core");
  Rng rng(11);
  for (auto kind : {TraceKind::Seismic, TraceKind::Log, TraceKind::Broadband}) {
    Trace t = make_trace(float_exact_samples(rng, 300), kind, "w7");
    t.dt_ms = 4.0;
    t.t0_ms = 12.5;
    write_trace(t, dir / "w7.bxt");
    EXPECT_EQ(read_trace(dir / "w7.bxt"), t);
    const auto bytes = read_bytes(dir / "w7.bxt");
    EXPECT_EQ(bytes, encode_trace(read_trace(dir / "w7.bxt")));
  }
}

TEST(TraceFormat, RejectsInvalidTracesBeforeWriting) {
  TempDir dir("core");
  EXPECT_THROW(write_trace(make_trace({}), dir / "e.bxt"), DataError);
  EXPECT_FALSE(std::filesystem::exists(dir / "e.bxt"));
  EXPECT_THROW(encode_trace(make_trace({1.0, std::nan("")})), DataError);
  Trace t = make_trace({1.0});
  t.dt_ms = 0.0;
  EXPECT_THROW(encode_trace(t), DataError);
}

TEST(TraceFormat, DecodeErrors) {
  auto bytes = encode_trace(make_trace(std::vector<double>(512, 0.25)));
  auto bad_magic = bytes;
  std::copy_n("XXXX", 4, bad_magic.begin());
  EXPECT_THROW(decode_trace(bad_magic), FormatError);

  auto truncated = bytes;
  truncated.resize(kBxtHeaderSize + 100 * 4);
  EXPECT_THROW(decode_trace(truncated), FormatError);
  EXPECT_THROW(decode_trace(std::vector<std::uint8_t>(10, 0)), FormatError);

  auto non_finite = bytes;
  const float inf = std::numeric_limits<float>::infinity();
  std::memcpy(non_finite.data() + kBxtHeaderSize, &inf, 4);
  EXPECT_THROW(decode_trace(non_finite), DataError);
}

TEST(TraceFormat, ReadMissingFileIsFormatError) {
  TempDir dir("core");
  EXPECT_THROW(read_trace(dir / "absent.bxt"), FormatError);
}

TEST(Enums, RoundTripThroughText) {
  for (auto t : {TieClass::Good, TieClass::Fair, TieClass::Poor}) EXPECT_EQ(parse_tie_class(to_string(t)), t);
  for (auto r : {PairRole::Train, PairRole::Validation, PairRole::Unassigned})
    EXPECT_EQ(parse_pair_role(to_string(r)), r);
  EXPECT_THROW(parse_tie_class("great"), ManifestError);
}

class ManifestTest : public ::testing::Test {
 protected:
  // 9 Good, 2 Fair, 1 Poor written under dir_.
  DatasetManifest write_pairs(std::size_t n = 12) {
    DatasetManifest m;
    m.seed = 3;
    m.description = "test";
    Rng rng(5);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "W" + std::to_string(i);
      write_trace(make_trace(float_exact_samples(rng, 64), TraceKind::Seismic, id), dir_ / (id + "_s.bxt"));
      write_trace(make_trace(float_exact_samples(rng, 64), TraceKind::Log, id), dir_ / (id + "_l.bxt"));
      ManifestEntry e;
      e.well_id = id;
      e.seismic_path = id + "_s.bxt";
      e.log_path = id + "_l.bxt";
      e.tie_class = i < 9 ? TieClass::Good : (i < 11 ? TieClass::Fair : TieClass::Poor);
      e.role = i % 2 ? PairRole::Train : PairRole::Validation;
      m.pairs.push_back(e);
    }
    return m;
  }
  TempDir dir_{"manifest"};
};

TEST_F(ManifestTest, LoadsTwelvePairsWithClassCounts) {
  auto m = write_pairs();
  write_manifest(m, dir_ / "manifest.json");
  const auto data = load_manifest(dir_ / "manifest.json");
  ASSERT_EQ(data.pairs.size(), 12u);
  std::map<TieClass, int> counts;
  for (const auto& p : data.pairs) {
    ++counts[*p.tie_class];
    EXPECT_EQ(p.seismic.size(), p.log.size());
    EXPECT_EQ(p.seismic.dt_ms, p.log.dt_ms);
  }
  EXPECT_EQ(counts[TieClass::Good], 9);
  EXPECT_EQ(counts[TieClass::Fair], 2);
  EXPECT_EQ(counts[TieClass::Poor], 1);
  for (std::size_t i = 0; i < m.pairs.size(); ++i) EXPECT_EQ(data.manifest.pairs[i].role, m.pairs[i].role);
}

TEST_F(ManifestTest, JsonRoundTrip) {
  auto m = write_pairs(3);
  m.wavelet_peak_hz = 25.0;
  const auto back = parse_manifest(manifest_to_json(m));
  EXPECT_EQ(manifest_to_json(back), manifest_to_json(m));
  EXPECT_EQ(back.wavelet_peak_hz, 25.0);
}

TEST_F(ManifestTest, Errors) {
  EXPECT_THROW(parse_manifest(R"({"pairs": []})"), ManifestError);
  EXPECT_THROW(parse_manifest("not json"), ManifestError);
  EXPECT_THROW(parse_manifest(R"({"pairs": [{"well_id":"A","seismic":"a","log":"b"},
                                             {"well_id":"A","seismic":"c","log":"d"}]})"),
               ManifestError);
  auto m = write_pairs(2);
  m.pairs[1].log_path = "nowhere.bxt";
  write_manifest(m, dir_ / "manifest.json");
  EXPECT_THROW(load_manifest(dir_ / "manifest.json"), ManifestError);
  EXPECT_THROW(load_manifest(dir_ / "missing.json"), ManifestError);
}

TEST_F(ManifestTest, LoadingIsOrderIndependent) {
  auto m = write_pairs(6);
  write_manifest(m, dir_ / "a.json");
  std::reverse(m.pairs.begin(), m.pairs.end());
  write_manifest(m, dir_ / "b.json");
  auto key = [](const LoadedDataset& d) {
    std::set<std::pair<std::string, std::vector<double>>> s;
    for (const auto& p : d.pairs) s.emplace(p.well_id, p.seismic.samples);
    return s;
  };
  EXPECT_EQ(key(load_manifest(dir_ / "a.json")), key(load_manifest(dir_ / "b.json")));
}

TEST_F(ManifestTest, CoarserLogIsResampledOntoSeismicGrid) {
  auto m = write_pairs(1);
  Trace log = make_trace(std::vector<double>(128, 0.5), TraceKind::Log);
  log.dt_ms = 1.0;
  write_trace(log, dir_ / "W0_l.bxt");
  write_manifest(m, dir_ / "manifest.json");
  const auto data = load_manifest(dir_ / "manifest.json");
  EXPECT_EQ(data.pairs[0].log.size(), 64u);
  EXPECT_EQ(data.pairs[0].log.dt_ms, 2.0);
  for (double v : data.pairs[0].log.samples) EXPECT_NEAR(v, 0.5, 1e-9);
}

TEST(VolumeIo, RoundTripAndValidation) {
  TempDir dir("volume");
  Rng rng(2);
  Volume v;
  for (int il = 0; il < 2; ++il)
    for (int xl = 0; xl < 3; ++xl)
      v.traces[{il, xl}] = make_trace(float_exact_samples(rng, 32), TraceKind::Seismic,
                                      "il" + std::to_string(il) + "_xl" + std::to_string(xl));
  write_volume(v, dir / "vol");
  const auto back = read_volume(dir / "vol");
  ASSERT_EQ(back.traces.size(), 6u);
  for (const auto& [k, t] : v.traces) EXPECT_EQ(back.traces.at(k).samples, t.samples);

  v.traces[{5, 5}] = make_trace(std::vector<double>(10, 1.0));
  EXPECT_THROW(validate_volume(v), GeometryError);
}

TEST(Stats, PeakAndRms) {
  EXPECT_EQ(peak_abs({1.0, -3.0, 2.0}), 3.0);
  EXPECT_DOUBLE_EQ(rms({3.0, 4.0}), std::sqrt(12.5));
  EXPECT_EQ(rms({}), 0.0);
}

}  // namespace
}  // namespace bandext
