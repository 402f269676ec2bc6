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

// Spectrogram-conditioned GAN: generator G(x, z), discriminator D(x, y),
// adversarial + L1 objectives, the alternating training loop and
// checkpoints.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bandext/autodiff.hpp"
#include "bandext/core.hpp"
#include "bandext/dsp.hpp"
#include "bandext/rng.hpp"

namespace bandext::cgan {

struct NamedArray {
  std::string name;
  ad::Shape shape;
  std::vector<double> data;
  friend bool operator==(const NamedArray&, const NamedArray&) = default;
};

// Holds named parameters and batch-norm running statistics.
class Network {
 public:
  virtual ~Network() = default;

  const std::vector<ad::Parameter>& parameters() const { return params_; }
  // Parameters followed by running statistics, in a fixed order.
  std::vector<NamedArray> state() const;
  // Throws CheckpointError naming the first missing or mis-shaped entry.
  void load_state(const std::vector<NamedArray>& state);
  std::size_t parameter_count() const;

 protected:
  ad::Tensor add_param(const std::string& name, ad::Shape shape, double init_std, Rng& rng);
  ad::Tensor add_constant_param(const std::string& name, ad::Shape shape, double value);
  ad::RunningStats& add_running_stats(const std::string& name, std::size_t channels);
  ad::Tensor param(const std::string& name) const;
  ad::RunningStats& stats(const std::string& name);

 private:
  std::vector<ad::Parameter> params_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, ad::RunningStats>> stats_;
};

struct GeneratorSpec {
  std::size_t input_channels = 2;
  std::size_t output_channels = 2;
  std::size_t noise_dim = 8;
  std::size_t image_size = 32;
  std::vector<std::size_t> encoder{16, 32, 64, 128};
  std::vector<std::size_t> decoder{64, 32, 16, 16};
  // U-Net style: each decoder stage also sees the matching encoder output,
  // and the output head sees the condition image.
  bool skip_connections = true;
  // Adds a learned per-frequency-row linear map of the condition image to
  // the head's pre-activation.
  bool row_skip = true;
  // Odd kernel size of the linear output head.
  std::size_t head_kernel = 1;
  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct DiscriminatorSpec {
  std::size_t input_channels = 4;
  std::size_t image_size = 32;
  std::vector<std::size_t> conv{16, 32, 64};
  double leaky_alpha = 0.2;
  friend bool operator==(const DiscriminatorSpec&, const DiscriminatorSpec&) = default;
};

// Throws SpecError when the ladders do not fit the image size.
void validate_spec(const GeneratorSpec& spec);
void validate_spec(const DiscriminatorSpec& spec);

class Generator : public Network {
 public:
  Generator(const GeneratorSpec& spec, std::uint64_t seed);
  // x: (N, input_channels, S, S), z: (N, noise_dim) -> (N, output_channels, S, S)
  ad::Tensor forward(const ad::Tensor& x, const ad::Tensor& z, ad::Mode mode);
  const GeneratorSpec& spec() const { return spec_; }

 private:
  GeneratorSpec spec_;
};

class Discriminator : public Network {
 public:
  Discriminator(const DiscriminatorSpec& spec, std::uint64_t seed);
  // condition and candidate: (N, C, S, S) with C_x + C_y == input_channels.
  // Returns (N, 1) probabilities.
  ad::Tensor forward(const ad::Tensor& condition, const ad::Tensor& candidate, ad::Mode mode);
  const DiscriminatorSpec& spec() const { return spec_; }

 private:
  DiscriminatorSpec spec_;
};

Generator build_generator(const GeneratorSpec& spec, std::uint64_t seed);
Discriminator build_discriminator(const DiscriminatorSpec& spec, std::uint64_t seed);

// bce(d_real, real) + bce(d_fake, fake): the negated discriminator objective.
ad::Tensor discriminator_loss(const ad::Tensor& d_real, const ad::Tensor& d_fake);

struct GeneratorLoss {
  ad::Tensor total;
  ad::Tensor adversarial;
  ad::Tensor l1;
};

// Non-saturating adversarial term bce(d_fake, real) plus lambda * L1.
GeneratorLoss generator_loss(const ad::Tensor& d_fake, const ad::Tensor& fake, const ad::Tensor& real,
                             double lambda_l1);

struct TrainConfig {
  double lambda_l1 = 100.0;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t epochs = 400;
  std::size_t batch_size = 4;
  std::uint64_t seed = 7;
  std::size_t checkpoint_every = 40;
  // Only the last this-many checkpoints are emitted; 0 keeps all of them.
  std::size_t keep_checkpoints = 0;
  dsp::SpectrogramGeometry geometry{64, 16, 64, 32};
  // Spectrogram values are multiplied by this before entering the networks.
  double image_scale = 0.1;
  // Random circular time shift and polarity flip applied identically to
  // both traces of a pair, drawn per pair per epoch.
  bool augment = true;
  // Logs are rescaled so their RMS inside this band equals the seismic RMS;
  // unset keeps the peak-normalised log.
  std::optional<dsp::TrapezoidBand> log_match_band = dsp::bands::kSeismic;
  GeneratorSpec generator{};
  DiscriminatorSpec discriminator{};
};

void validate_config(const TrainConfig& cfg);
std::string config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const std::string& json_text);

struct Checkpoint {
  std::uint32_t epoch = 0;
  std::vector<NamedArray> generator;
  std::vector<NamedArray> discriminator;
  std::string config_json;
  std::string rng_state;

  TrainConfig config() const { return config_from_json(config_json); }
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Rebuilds the generator stored in a checkpoint.
Generator restore_generator(const Checkpoint& ckpt);

struct LossRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double d_loss = 0.0;
  double g_adv = 0.0;
  double g_l1 = 0.0;
  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

struct CheckpointSet {
  std::vector<Checkpoint> checkpoints;
  std::vector<LossRecord> history;
};

std::string loss_history_csv(const std::vector<LossRecord>& history);

// Peak-normalised trace to a (channels=2, S, S) image: the real and
// imaginary STFT planes without the Nyquist row, times image_scale.
// Throws GeometryError if the geometry does not give an S x S image.
std::vector<double> trace_to_image(const std::vector<double>& samples, double dt_ms,
                                   const dsp::SpectrogramGeometry& geometry, double image_scale);

// Inverse of trace_to_image (Nyquist row set to zero).
std::vector<double> image_to_trace(const std::vector<double>& image, std::size_t n_samples, double dt_ms,
                                   const dsp::SpectrogramGeometry& geometry, double image_scale);

// Image side length for a geometry: n_fft / 2 rows by n_frames columns.
std::size_t image_size(const dsp::SpectrogramGeometry& geometry, std::size_t n_samples);

struct TrainOptions {
  // When set, checkpoints (ckpt_epoch_NNNN.bin) and losses.csv go here.
  std::optional<std::filesystem::path> out_dir;
  bool verbose = false;
};

// Alternating D / G updates per batch. Throws TrainError on an empty or
// misaligned set and DivergenceError on a non-finite loss.
CheckpointSet train(const std::vector<TracePair>& pairs, const TrainConfig& cfg, const TrainOptions& options = {});

}  // namespace bandext::cgan
