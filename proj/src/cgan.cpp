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

#include "bandext/cgan.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace bandext::cgan {
namespace {

using ad::Mode;
using ad::Tensor;
using nlohmann::json;

constexpr std::size_t kKernel = 4;
constexpr std::size_t kStride = 2;
constexpr std::size_t kPadding = 1;
// Small head so the untrained generator starts near a zero image.
constexpr double kHeadInitStd = 0.01;

std::string stage(const char* prefix, std::size_t i) { return std::string(prefix) + std::to_string(i); }

Tensor conv_bn(const Tensor& x, const Tensor& w, const Tensor& gamma, const Tensor& beta, ad::RunningStats& rs,
               Mode mode) {
  return ad::batch_norm2d(ad::conv2d(x, w, Tensor{}, kStride, kPadding), gamma, beta, mode, rs);
}

// Moves the phase reference of frequency row f from the frame start to the
// window centre, so an event at the centre has the same phase in every row.
std::complex<double> centre_phase(const dsp::SpectrogramGeometry& g, std::size_t f) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(f) * static_cast<double>(g.window_len / 2) /
                       static_cast<double>(g.n_fft);
  return std::polar(1.0, angle);
}

}  // namespace

// ---------------------------------------------------------------------------
// Network

Tensor Network::add_param(const std::string& name, ad::Shape shape, double init_std, Rng& rng) {
  std::vector<double> values(ad::numel(shape));
  for (double& v : values) v = init_std * rng.normal();
  index_[name] = params_.size();
  params_.push_back({name, Tensor::from(std::move(shape), std::move(values), true)});
  return params_.back().tensor;
}

Tensor Network::add_constant_param(const std::string& name, ad::Shape shape, double value) {
  index_[name] = params_.size();
  params_.push_back({name, Tensor::full(std::move(shape), value, true)});
  return params_.back().tensor;
}

ad::RunningStats& Network::add_running_stats(const std::string& name, std::size_t channels) {
  stats_.emplace_back(name, ad::RunningStats(channels));
  return stats_.back().second;
}

Tensor Network::param(const std::string& name) const { return params_.at(index_.at(name)).tensor; }

ad::RunningStats& Network::stats(const std::string& name) {
  for (auto& [n, s] : stats_)
    if (n == name) return s;
  throw SpecError("no running statistics named " + name);
}

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.tensor.size();
  return total;
}

std::vector<NamedArray> Network::state() const {
  std::vector<NamedArray> out;
  for (const auto& p : params_)
    out.push_back({p.name, p.tensor.shape(), {p.tensor.values().begin(), p.tensor.values().end()}});
  for (const auto& [name, s] : stats_) {
    out.push_back({name + ".running_mean", {s.mean.size()}, s.mean});
    out.push_back({name + ".running_var", {s.var.size()}, s.var});
  }
  return out;
}

void Network::load_state(const std::vector<NamedArray>& state) {
  std::map<std::string, const NamedArray*> by_name;
  for (const auto& a : state) by_name[a.name] = &a;
  auto fetch = [&](const std::string& name, const ad::Shape& shape) -> const NamedArray& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw CheckpointError("checkpoint lacks parameter '" + name + "'");
    if (it->second->shape != shape)
      throw CheckpointError("parameter '" + name + "' has shape " + ad::shape_string(it->second->shape) +
                            ", model expects " + ad::shape_string(shape));
    return *it->second;
  };
  if (state.size() != params_.size() + 2 * stats_.size())
    throw CheckpointError("checkpoint holds " + std::to_string(state.size()) + " arrays, model expects " +
                          std::to_string(params_.size() + 2 * stats_.size()));
  // Validate everything before mutating.
  for (const auto& p : params_) fetch(p.name, p.tensor.shape());
  for (const auto& [name, s] : stats_) {
    fetch(name + ".running_mean", {s.mean.size()});
    fetch(name + ".running_var", {s.var.size()});
  }
  for (auto& p : params_) {
    const auto& a = fetch(p.name, p.tensor.shape());
    auto dst = p.tensor.mutable_values();
    std::copy(a.data.begin(), a.data.end(), dst.begin());
  }
  for (auto& [name, s] : stats_) {
    s.mean = fetch(name + ".running_mean", {s.mean.size()}).data;
    s.var = fetch(name + ".running_var", {s.var.size()}).data;
  }
}

// ---------------------------------------------------------------------------
// Specs and networks

void validate_spec(const GeneratorSpec& spec) {
  const std::size_t depth = spec.encoder.size();
  if (depth == 0 || spec.decoder.size() != depth)
    throw SpecError("generator needs matching, non-empty encoder and decoder ladders");
  if (spec.input_channels == 0 || spec.output_channels == 0 || spec.noise_dim == 0)
    throw SpecError("generator channel counts and noise_dim must be positive");
  for (auto c : spec.encoder)
    if (c == 0) throw SpecError("encoder channels must be positive");
  for (auto c : spec.decoder)
    if (c == 0) throw SpecError("decoder channels must be positive");
  if (spec.head_kernel % 2 == 0) throw SpecError("head kernel must be odd");
  const std::size_t factor = std::size_t{1} << depth;
  if (spec.image_size < factor || spec.image_size % factor != 0)
    throw SpecError("image size " + std::to_string(spec.image_size) + " underflows after " + std::to_string(depth) +
                    " stride-2 stages");
}

void validate_spec(const DiscriminatorSpec& spec) {
  if (spec.conv.empty() || spec.input_channels == 0) throw SpecError("discriminator needs a conv ladder");
  for (auto c : spec.conv)
    if (c == 0) throw SpecError("discriminator channels must be positive");
  const std::size_t factor = std::size_t{1} << spec.conv.size();
  if (spec.image_size < factor || spec.image_size % factor != 0)
    throw SpecError("image size " + std::to_string(spec.image_size) + " underflows after " +
                    std::to_string(spec.conv.size()) + " stride-2 stages");
}

Generator::Generator(const GeneratorSpec& spec, std::uint64_t seed) : spec_(spec) {
  validate_spec(spec);
  Rng rng(seed);
  const std::size_t depth = spec.encoder.size();
  std::size_t in = spec.input_channels;
  for (std::size_t i = 0; i < depth; ++i) {
    const std::size_t out = spec.encoder[i];
    add_param(stage("enc", i) + ".weight", {out, in, kKernel, kKernel},
              std::sqrt(2.0 / static_cast<double>(in * kKernel * kKernel)), rng);
    add_constant_param(stage("enc", i) + ".gamma", {out}, 1.0);
    add_constant_param(stage("enc", i) + ".beta", {out}, 0.0);
    add_running_stats(stage("enc", i) + ".bn", out);
    in = out;
  }
  const std::size_t bottleneck = spec.image_size >> depth;
  add_param("noise.weight", {spec.noise_dim, bottleneck * bottleneck},
            std::sqrt(1.0 / static_cast<double>(spec.noise_dim)), rng);
  add_constant_param("noise.bias", {bottleneck * bottleneck}, 0.0);
  in += 1;
  for (std::size_t i = 0; i < depth; ++i) {
    const std::size_t out = spec.decoder[i];
    // A stride-2 transposed conv spreads each input over k*k/s^2 outputs.
    add_param(stage("dec", i) + ".weight", {in, out, kKernel, kKernel},
              std::sqrt(2.0 / static_cast<double>(in * kKernel * kKernel / (kStride * kStride))), rng);
    add_constant_param(stage("dec", i) + ".gamma", {out}, 1.0);
    add_constant_param(stage("dec", i) + ".beta", {out}, 0.0);
    add_running_stats(stage("dec", i) + ".bn", out);
    in = out;
    if (spec.skip_connections) in += (i + 1 < depth) ? spec.encoder[depth - 2 - i] : spec.input_channels;
  }
  add_param("head.weight", {spec.output_channels, in, spec.head_kernel, spec.head_kernel}, kHeadInitStd, rng);
  add_constant_param("head.bias", {spec.output_channels}, 0.0);
  if (spec.row_skip)
    add_constant_param("row_skip.weight", {spec.output_channels, spec.input_channels, spec.image_size}, 0.0);
}

Tensor Generator::forward(const Tensor& x, const Tensor& z, Mode mode) {
  const std::size_t s = spec_.image_size;
  if (x.rank() != 4 || x.dim(1) != spec_.input_channels || x.dim(2) != s || x.dim(3) != s)
    throw ShapeError("generator input must be (N, " + std::to_string(spec_.input_channels) + ", " +
                     std::to_string(s) + ", " + std::to_string(s) + "), got " + ad::shape_string(x.shape()));
  if (z.rank() != 2 || z.dim(0) != x.dim(0) || z.dim(1) != spec_.noise_dim)
    throw ShapeError("noise must be (N, " + std::to_string(spec_.noise_dim) + "), got " + ad::shape_string(z.shape()));
  const std::size_t depth = spec_.encoder.size();
  std::vector<Tensor> skips;
  Tensor h = x;
  for (std::size_t i = 0; i < depth; ++i) {
    const std::string name = stage("enc", i);
    h = ad::relu(conv_bn(h, param(name + ".weight"), param(name + ".gamma"), param(name + ".beta"),
                         stats(name + ".bn"), mode));
    skips.push_back(h);
  }
  const std::size_t b = s >> depth;
  Tensor noise_plane = ad::reshape(ad::dense(z, param("noise.weight"), param("noise.bias")), {x.dim(0), 1, b, b});
  h = ad::concat_channels(h, noise_plane);
  for (std::size_t i = 0; i < depth; ++i) {
    const std::string name = stage("dec", i);
    h = ad::conv_transpose2d(h, param(name + ".weight"), Tensor{}, kStride, kPadding);
    h = ad::relu(ad::batch_norm2d(h, param(name + ".gamma"), param(name + ".beta"), mode, stats(name + ".bn")));
    if (spec_.skip_connections) h = ad::concat_channels(h, (i + 1 < depth) ? skips[depth - 2 - i] : x);
  }
  Tensor pre = ad::conv2d(h, param("head.weight"), param("head.bias"), 1, spec_.head_kernel / 2);
  if (spec_.row_skip) pre = ad::add(pre, ad::row_linear(x, param("row_skip.weight")));
  return ad::tanh(pre);
}

Discriminator::Discriminator(const DiscriminatorSpec& spec, std::uint64_t seed) : spec_(spec) {
  validate_spec(spec);
  Rng rng(seed);
  std::size_t in = spec.input_channels;
  for (std::size_t i = 0; i < spec.conv.size(); ++i) {
    const std::size_t out = spec.conv[i];
    add_param(stage("conv", i) + ".weight", {out, in, kKernel, kKernel},
              std::sqrt(2.0 / static_cast<double>(in * kKernel * kKernel)), rng);
    add_constant_param(stage("conv", i) + ".gamma", {out}, 1.0);
    add_constant_param(stage("conv", i) + ".beta", {out}, 0.0);
    add_running_stats(stage("conv", i) + ".bn", out);
    in = out;
  }
  const std::size_t side = spec.image_size >> spec.conv.size();
  const std::size_t features = in * side * side;
  add_param("head.weight", {features, 1}, std::sqrt(1.0 / static_cast<double>(features)), rng);
  add_constant_param("head.bias", {1}, 0.0);
}

Tensor Discriminator::forward(const Tensor& condition, const Tensor& candidate, Mode mode) {
  Tensor h = ad::concat_channels(condition, candidate);
  const std::size_t s = spec_.image_size;
  if (h.dim(1) != spec_.input_channels || h.dim(2) != s || h.dim(3) != s)
    throw ShapeError("discriminator input must be (N, " + std::to_string(spec_.input_channels) + ", " +
                     std::to_string(s) + ", " + std::to_string(s) + "), got " + ad::shape_string(h.shape()));
  for (std::size_t i = 0; i < spec_.conv.size(); ++i) {
    const std::string name = stage("conv", i);
    h = ad::leaky_relu(conv_bn(h, param(name + ".weight"), param(name + ".gamma"), param(name + ".beta"),
                               stats(name + ".bn"), mode),
                       spec_.leaky_alpha);
  }
  const std::size_t n = h.dim(0);
  h = ad::reshape(h, {n, h.size() / n});
  return ad::sigmoid(ad::dense(h, param("head.weight"), param("head.bias")));
}

Generator build_generator(const GeneratorSpec& spec, std::uint64_t seed) { return Generator(spec, seed); }

Discriminator build_discriminator(const DiscriminatorSpec& spec, std::uint64_t seed) {
  return Discriminator(spec, seed);
}

Tensor discriminator_loss(const Tensor& d_real, const Tensor& d_fake) {
  return ad::add(ad::bce_loss(d_real, true), ad::bce_loss(d_fake, false));
}

GeneratorLoss generator_loss(const Tensor& d_fake, const Tensor& fake, const Tensor& real, double lambda_l1) {
  GeneratorLoss loss;
  loss.adversarial = ad::bce_loss(d_fake, true);
  loss.l1 = ad::l1_loss(real, fake);
  loss.total = ad::add(loss.adversarial, ad::scale(loss.l1, lambda_l1));
  return loss;
}

// ---------------------------------------------------------------------------
// Configuration

void validate_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw TrainError("epochs must be at least 1");
  if (cfg.checkpoint_every < 1) throw TrainError("checkpoint_every must be at least 1");
  if (cfg.batch_size < 1) throw TrainError("batch_size must be at least 1");
  if (!(cfg.lambda_l1 >= 0.0)) throw TrainError("lambda_l1 must be non-negative");
  if (!(cfg.lr > 0.0)) throw TrainError("learning rate must be positive");
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 && cfg.beta2 < 1.0))
    throw TrainError("Adam betas must lie in (0, 1)");
  if (!(cfg.image_scale > 0.0)) throw TrainError("image_scale must be positive");
  validate_spec(cfg.generator);
  validate_spec(cfg.discriminator);
  if (cfg.discriminator.input_channels != cfg.generator.input_channels + cfg.generator.output_channels)
    throw SpecError("discriminator channels must equal condition + candidate channels");
  if (cfg.discriminator.image_size != cfg.generator.image_size)
    throw SpecError("generator and discriminator image sizes differ");
}

std::string config_to_json(const TrainConfig& cfg) {
  json doc;
  doc["lambda_l1"] = cfg.lambda_l1;
  doc["lr"] = cfg.lr;
  doc["beta1"] = cfg.beta1;
  doc["beta2"] = cfg.beta2;
  doc["epochs"] = cfg.epochs;
  doc["batch_size"] = cfg.batch_size;
  doc["seed"] = cfg.seed;
  doc["checkpoint_every"] = cfg.checkpoint_every;
  doc["keep_checkpoints"] = cfg.keep_checkpoints;
  doc["geometry"] = {{"window_len", cfg.geometry.window_len},
                     {"hop", cfg.geometry.hop},
                     {"n_fft", cfg.geometry.n_fft},
                     {"n_frames", cfg.geometry.n_frames}};
  doc["image_scale"] = cfg.image_scale;
  doc["augment"] = cfg.augment;
  doc["log_match_band"] = cfg.log_match_band ? json(cfg.log_match_band->to_string()) : json(nullptr);
  doc["generator"] = {{"input_channels", cfg.generator.input_channels},
                      {"output_channels", cfg.generator.output_channels},
                      {"noise_dim", cfg.generator.noise_dim},
                      {"image_size", cfg.generator.image_size},
                      {"encoder", cfg.generator.encoder},
                      {"decoder", cfg.generator.decoder},
                      {"skip_connections", cfg.generator.skip_connections},
                      {"row_skip", cfg.generator.row_skip},
                      {"head_kernel", cfg.generator.head_kernel}};
  doc["discriminator"] = {{"input_channels", cfg.discriminator.input_channels},
                          {"image_size", cfg.discriminator.image_size},
                          {"conv", cfg.discriminator.conv},
                          {"leaky_alpha", cfg.discriminator.leaky_alpha}};
  return doc.dump(2);
}

TrainConfig config_from_json(const std::string& json_text) {
  TrainConfig cfg;
  try {
    const json doc = json::parse(json_text);
    cfg.lambda_l1 = doc.value("lambda_l1", cfg.lambda_l1);
    cfg.lr = doc.value("lr", cfg.lr);
    cfg.beta1 = doc.value("beta1", cfg.beta1);
    cfg.beta2 = doc.value("beta2", cfg.beta2);
    cfg.epochs = doc.value("epochs", cfg.epochs);
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.checkpoint_every = doc.value("checkpoint_every", cfg.checkpoint_every);
    cfg.keep_checkpoints = doc.value("keep_checkpoints", cfg.keep_checkpoints);
    if (doc.contains("geometry")) {
      const auto& g = doc["geometry"];
      cfg.geometry.window_len = g.value("window_len", cfg.geometry.window_len);
      cfg.geometry.hop = g.value("hop", cfg.geometry.hop);
      cfg.geometry.n_fft = g.value("n_fft", cfg.geometry.n_fft);
      cfg.geometry.n_frames = g.value("n_frames", cfg.geometry.n_frames);
    }
    cfg.image_scale = doc.value("image_scale", cfg.image_scale);
    cfg.augment = doc.value("augment", cfg.augment);
    if (doc.contains("log_match_band")) {
      const auto& b = doc["log_match_band"];
      cfg.log_match_band = b.is_null() ? std::nullopt : std::optional(dsp::parse_band(b.get<std::string>()));
    }
    if (doc.contains("generator")) {
      const auto& g = doc["generator"];
      cfg.generator.input_channels = g.value("input_channels", cfg.generator.input_channels);
      cfg.generator.output_channels = g.value("output_channels", cfg.generator.output_channels);
      cfg.generator.noise_dim = g.value("noise_dim", cfg.generator.noise_dim);
      cfg.generator.image_size = g.value("image_size", cfg.generator.image_size);
      cfg.generator.encoder = g.value("encoder", cfg.generator.encoder);
      cfg.generator.decoder = g.value("decoder", cfg.generator.decoder);
      cfg.generator.skip_connections = g.value("skip_connections", cfg.generator.skip_connections);
      cfg.generator.row_skip = g.value("row_skip", cfg.generator.row_skip);
      cfg.generator.head_kernel = g.value("head_kernel", cfg.generator.head_kernel);
    }
    if (doc.contains("discriminator")) {
      const auto& d = doc["discriminator"];
      cfg.discriminator.input_channels = d.value("input_channels", cfg.discriminator.input_channels);
      cfg.discriminator.image_size = d.value("image_size", cfg.discriminator.image_size);
      cfg.discriminator.conv = d.value("conv", cfg.discriminator.conv);
      cfg.discriminator.leaky_alpha = d.value("leaky_alpha", cfg.discriminator.leaky_alpha);
    }
  } catch (const json::exception& e) {
    throw TrainError(std::string("invalid training config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Spectrogram images

std::size_t image_size(const dsp::SpectrogramGeometry& g, std::size_t n_samples) {
  const std::size_t frames = g.n_frames ? g.n_frames : (n_samples + g.hop - 1) / g.hop;
  if (g.n_fft / 2 != frames)
    throw GeometryError("spectrogram geometry gives " + std::to_string(g.n_fft / 2) + " x " + std::to_string(frames) +
                        " images; a square image is required");
  return frames;
}

std::vector<double> trace_to_image(const std::vector<double>& samples, double dt_ms,
                                   const dsp::SpectrogramGeometry& geometry, double image_scale) {
  const std::size_t s = image_size(geometry, samples.size());
  Trace t{"image", TraceKind::Seismic, dt_ms, 0.0, samples};
  const auto spec = dsp::stft(t, geometry);
  std::vector<double> image(2 * s * s);
  for (std::size_t f = 0; f < s; ++f)
    for (std::size_t k = 0; k < s; ++k) {
      const auto v = std::complex<double>(spec.re(f, k), spec.im(f, k)) * centre_phase(geometry, f) * image_scale;
      image[f * s + k] = v.real();
      image[s * s + f * s + k] = v.imag();
    }
  return image;
}

std::vector<double> image_to_trace(const std::vector<double>& image, std::size_t n_samples, double dt_ms,
                                   const dsp::SpectrogramGeometry& geometry, double image_scale) {
  const std::size_t s = image_size(geometry, n_samples);
  if (image.size() != 2 * s * s) throw GeometryError("image does not match the spectrogram geometry");
  dsp::Spectrogram spec;
  spec.window_len = geometry.window_len;
  spec.hop = geometry.hop;
  spec.n_fft = geometry.n_fft;
  spec.n_freq = geometry.n_freq();
  spec.n_frames = s;
  spec.original_len = n_samples;
  const std::size_t padded = (s - 1) * geometry.hop + geometry.window_len;
  if (padded < n_samples) throw GeometryError("frames do not cover the trace");
  spec.pad_left = (padded - n_samples) / 2;
  spec.dt_ms = dt_ms;
  spec.real_plane.assign(spec.n_freq * s, 0.0);
  spec.imag_plane.assign(spec.n_freq * s, 0.0);
  for (std::size_t f = 0; f < s; ++f)
    for (std::size_t k = 0; k < s; ++k) {
      const auto v = std::complex<double>(image[f * s + k], image[s * s + f * s + k]) *
                     std::conj(centre_phase(geometry, f)) / image_scale;
      spec.re(f, k) = v.real();
      spec.im(f, k) = v.imag();
    }
  return dsp::istft(spec).samples;
}

// ---------------------------------------------------------------------------
// Checkpoints

std::string loss_history_csv(const std::vector<LossRecord>& history) {
  std::ostringstream os;
  os << "epoch,batch,d_loss,g_adv,g_l1\n";
  os << std::setprecision(17);
  for (const auto& r : history) os << r.epoch << ',' << r.batch << ',' << r.d_loss << ',' << r.g_adv << ',' << r.g_l1 << '\n';
  return os.str();
}

Generator restore_generator(const Checkpoint& ckpt) {
  const auto cfg = ckpt.config();
  Generator gen(cfg.generator, 0);
  gen.load_state(ckpt.generator);
  return gen;
}

CheckpointSet train(const std::vector<TracePair>& pairs, const TrainConfig& cfg, const TrainOptions& options) {
  validate_config(cfg);
  if (pairs.empty()) throw TrainError("training set is empty");
  const std::size_t n = pairs.front().seismic.size();
  const double dt = pairs.front().seismic.dt_ms;
  const std::size_t s = image_size(cfg.geometry, n);
  if (s != cfg.generator.image_size)
    throw SpecError("spectrogram image is " + std::to_string(s) + " wide, generator expects " +
                    std::to_string(cfg.generator.image_size));

  struct Normalized {
    std::vector<double> seismic;
    std::vector<double> log;
  };
  std::vector<Normalized> data;
  for (const auto& p : pairs) {
    validate_trace(p.seismic);
    validate_trace(p.log);
    if (p.seismic.size() != n || p.log.size() != n || p.seismic.dt_ms != dt || p.log.dt_ms != dt)
      throw TrainError("pair " + p.well_id + " does not share the training geometry");
    Normalized d{p.seismic.samples, p.log.samples};
    for (auto* v : {&d.seismic, &d.log}) {
      const double peak = peak_abs(*v);
      if (peak == 0.0) throw TrainError("pair " + p.well_id + " has an all-zero trace");
      for (double& x : *v) x /= peak;
    }
    if (cfg.log_match_band) {
      const double in_band = rms(dsp::bandpass_trapezoid(d.log, dt, *cfg.log_match_band));
      if (in_band == 0.0) throw TrainError("pair " + p.well_id + " has no log energy in the matching band");
      const double factor = rms(d.seismic) / in_band;
      for (double& x : d.log) x *= factor;
    }
    data.push_back(std::move(d));
  }

  Generator gen(cfg.generator, derive_seed(cfg.seed, 1));
  Discriminator disc(cfg.discriminator, derive_seed(cfg.seed, 2));
  auto g_state = ad::make_adam(gen.parameters(), cfg.lr, cfg.beta1, cfg.beta2);
  auto d_state = ad::make_adam(disc.parameters(), cfg.lr, cfg.beta1, cfg.beta2);
  Rng rng(derive_seed(cfg.seed, 3));
  const std::string config_json = config_to_json(cfg);
  const std::size_t plane = 2 * s * s;

  CheckpointSet result;
  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);

    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      std::vector<double> x_values(b * plane), y_values(b * plane), z_values(b * cfg.generator.noise_dim);
      for (std::size_t j = 0; j < b; ++j) {
        const auto& d = data[order[start + j]];
        std::vector<double> seismic = d.seismic;
        std::vector<double> log = d.log;
        if (cfg.augment) {
          const long shift = static_cast<long>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
          const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
          seismic = dsp::circular_shift(seismic, shift);
          log = dsp::circular_shift(log, shift);
          for (double& v : seismic) v *= sign;
          for (double& v : log) v *= sign;
        }
        const auto xi = trace_to_image(seismic, dt, cfg.geometry, cfg.image_scale);
        const auto yi = trace_to_image(log, dt, cfg.geometry, cfg.image_scale);
        std::copy(xi.begin(), xi.end(), x_values.begin() + static_cast<long>(j * plane));
        std::copy(yi.begin(), yi.end(), y_values.begin() + static_cast<long>(j * plane));
      }
      for (double& v : z_values) v = rng.normal();
      const Tensor x = Tensor::from({b, 2, s, s}, std::move(x_values));
      const Tensor y = Tensor::from({b, 2, s, s}, std::move(y_values));
      const Tensor z = Tensor::from({b, cfg.generator.noise_dim}, std::move(z_values));

      const Tensor fake = gen.forward(x, z, Mode::Train);

      // Discriminator step on (x, y) versus (x, G(x, z)) with G detached.
      const Tensor d_loss =
          discriminator_loss(disc.forward(x, y, Mode::Train), disc.forward(x, fake.detach(), Mode::Train));
      if (!std::isfinite(d_loss.item()))
        throw DivergenceError("discriminator loss is not finite at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_index));
      ad::backward(d_loss);
      ad::adam_step(disc.parameters(), d_state);

      // Generator step against the updated discriminator.
      const auto g_loss = generator_loss(disc.forward(x, fake, Mode::Train), fake, y, cfg.lambda_l1);
      if (!std::isfinite(g_loss.total.item()))
        throw DivergenceError("generator loss is not finite at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_index));
      ad::backward(g_loss.total);
      ad::adam_step(gen.parameters(), g_state);
      ad::zero_grads(disc.parameters());

      result.history.push_back({epoch, batch_index, d_loss.item(), g_loss.adversarial.item(), g_loss.l1.item()});
    }

    if (options.verbose && (epoch % 10 == 0 || epoch == cfg.epochs)) {
      const auto& last = result.history.back();
      std::fprintf(stderr, "epoch %zu d_loss %.4f g_adv %.4f g_l1 %.5f\n", epoch, last.d_loss, last.g_adv, last.g_l1);
    }
    const bool retained =
        cfg.keep_checkpoints == 0 || epoch + cfg.keep_checkpoints * cfg.checkpoint_every > cfg.epochs;
    if (epoch % cfg.checkpoint_every == 0 && retained) {
      Checkpoint ckpt;
      ckpt.epoch = static_cast<std::uint32_t>(epoch);
      ckpt.generator = gen.state();
      ckpt.discriminator = disc.state();
      ckpt.config_json = config_json;
      ckpt.rng_state = rng.serialize();
      result.checkpoints.push_back(std::move(ckpt));
    }
  }

  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    for (const auto& ckpt : result.checkpoints) {
      char name[32];
      std::snprintf(name, sizeof(name), "ckpt_epoch_%04u.bin", ckpt.epoch);
      save_checkpoint(ckpt, *options.out_dir / name);
    }
    std::ofstream csv(*options.out_dir / "losses.csv", std::ios::trunc);
    if (!csv) throw WriteError("cannot write losses.csv in " + options.out_dir->string());
    csv << loss_history_csv(result.history);
  }
  return result;
}

}  // namespace bandext::cgan
