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

#include <cstring>
#include <fstream>
#include <iterator>

#include "bandext/cgan.hpp"

namespace bandext::cgan {
namespace {

constexpr char kMagic[4] = {'B', 'X', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(T value) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    bytes.insert(bytes.end(), raw, raw + sizeof(T));
  }
  void put_string32(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint is truncated at byte " + std::to_string(pos_));
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void put_arrays(Writer& w, const std::string& prefix, const std::vector<NamedArray>& arrays) {
  for (const auto& a : arrays) {
    const std::string name = prefix + a.name;
    w.put(static_cast<std::uint16_t>(name.size()));
    w.bytes.insert(w.bytes.end(), name.begin(), name.end());
    w.put(static_cast<std::uint8_t>(a.shape.size()));
    for (auto d : a.shape) w.put(static_cast<std::uint32_t>(d));
    for (double v : a.data) w.put(v);
  }
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes.insert(w.bytes.end(), std::begin(kMagic), std::end(kMagic));
  w.put(kVersion);
  w.put(ckpt.epoch);
  w.put_string32(ckpt.config_json);
  w.put_string32(ckpt.rng_state);
  w.put(static_cast<std::uint32_t>(ckpt.generator.size() + ckpt.discriminator.size()));
  put_arrays(w, "G.", ckpt.generator);
  put_arrays(w, "D.", ckpt.discriminator);
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.get_string(4) != std::string(kMagic, 4)) throw CheckpointError("not a checkpoint (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.epoch = r.get<std::uint32_t>();
  ckpt.config_json = r.get_string(r.get<std::uint32_t>());
  ckpt.rng_state = r.get_string(r.get<std::uint32_t>());
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.get_string(r.get<std::uint16_t>());
    NamedArray a;
    const auto dims = r.get<std::uint8_t>();
    for (std::uint8_t d = 0; d < dims; ++d) a.shape.push_back(r.get<std::uint32_t>());
    a.data.resize(ad::numel(a.shape));
    for (double& v : a.data) v = r.get<double>();
    if (name.rfind("G.", 0) == 0) {
      a.name = name.substr(2);
      ckpt.generator.push_back(std::move(a));
    } else if (name.rfind("D.", 0) == 0) {
      a.name = name.substr(2);
      ckpt.discriminator.push_back(std::move(a));
    } else {
      throw CheckpointError("checkpoint block '" + name + "' belongs to no network");
    }
  }
  if (!r.done()) throw CheckpointError("checkpoint has trailing bytes");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WriteError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace bandext::cgan
