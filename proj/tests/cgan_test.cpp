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

#include <cmath>
#include <fstream>
#include <numbers>

#include "bandext/cgan.hpp"
#include "bandext/synth.hpp"
#include "bandext/welltie.hpp"
#include "gradcheck_suite.hpp"
#include "test_support.hpp"

namespace bandext::cgan {
namespace {

using ad::Mode;
using ad::Tensor;
using bandext::testing::TempDir;
using bandext::testing::read_bytes;
namespace gc = bandext::testing::gradcheck;

GeneratorSpec small_generator() {
  GeneratorSpec s;
  s.image_size = 8;
  s.encoder = {3, 4};
  s.decoder = {4, 3};
  s.noise_dim = 2;
  return s;
}

DiscriminatorSpec small_discriminator() {
  DiscriminatorSpec s;
  s.image_size = 8;
  s.conv = {3, 4};
  return s;
}

std::vector<TracePair> default_training_pairs() {
  synth::SynthConfig sc;
  auto generated = synth::gen_pairs(sc);
  std::vector<TracePair> pairs;
  for (auto& g : generated) pairs.push_back(g.pair);
  welltie::SelectionPolicy policy;
  return welltie::select_training(pairs, policy).train;
}

TrainConfig quick_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.checkpoint_every = 1;
  cfg.generator.encoder = {4, 8, 8, 8};
  cfg.generator.decoder = {8, 8, 4, 4};
  cfg.discriminator.conv = {4, 8, 8};
  return cfg;
}

std::vector<double> values(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

TEST(Generator, ShapeNoiseAndSeedContracts) {
  Generator g(GeneratorSpec{}, 1);
  Rng rng(2);
  const auto x = gc::random_tensor(rng, {1, 2, 32, 32});
  const auto z1 = gc::random_tensor(rng, {1, 8});
  const auto z2 = gc::random_tensor(rng, {1, 8});
  const auto y1 = g.forward(x, z1, Mode::Eval);
  EXPECT_EQ(y1.shape(), (ad::Shape{1, 2, 32, 32}));
  const auto y2 = g.forward(x, z2, Mode::Eval);
  double diff = 0;
  for (std::size_t i = 0; i < y1.size(); ++i) diff = std::max(diff, std::abs(y1.at(i) - y2.at(i)));
  EXPECT_GT(diff, 0.0);
  for (double v : y1.values()) EXPECT_LT(std::abs(v), 1.0);

  EXPECT_EQ(Generator(GeneratorSpec{}, 1).state(), g.state());
  EXPECT_NE(Generator(GeneratorSpec{}, 2).state(), g.state());
}

TEST(Generator, NamesAreUnique) {
  Generator g(GeneratorSpec{}, 1);
  std::set<std::string> names;
  for (const auto& a : g.state()) EXPECT_TRUE(names.insert(a.name).second) << a.name;
  EXPECT_GT(g.parameter_count(), 0u);
}

TEST(Spec, RejectsSpatialUnderflow) {
  GeneratorSpec g;
  g.encoder = {4, 4, 4, 4, 4, 4};
  g.decoder = {4, 4, 4, 4, 4, 4};
  EXPECT_THROW(validate_spec(g), SpecError);
  EXPECT_THROW(Generator(g, 1), SpecError);
  g = GeneratorSpec{};
  g.head_kernel = 2;
  EXPECT_THROW(validate_spec(g), SpecError);
  DiscriminatorSpec d;
  d.conv = {4, 4, 4, 4, 4, 4};
  EXPECT_THROW(Discriminator(d, 1), SpecError);
}

TEST(Discriminator, ProbabilityAndSensitivity) {
  Discriminator d(DiscriminatorSpec{}, 3);
  Rng rng(4);
  const auto x = gc::random_tensor(rng, {1, 2, 32, 32});
  const auto y = gc::random_tensor(rng, {1, 2, 32, 32});
  const auto y2 = gc::random_tensor(rng, {1, 2, 32, 32});
  const auto p = d.forward(x, y, Mode::Eval);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_GT(p.item(), 0.0);
  EXPECT_LT(p.item(), 1.0);
  EXPECT_NE(p.item(), d.forward(x, y2, Mode::Eval).item());
  EXPECT_EQ(Discriminator(DiscriminatorSpec{}, 3).state(), d.state());
}

TEST(Networks, FullGradientsPassFiniteDifferences) {
  Generator g(small_generator(), 3);
  Discriminator d(small_discriminator(), 4);
  Rng rng(1);
  const auto x = gc::random_tensor(rng, {2, 2, 8, 8});
  const auto y = gc::random_tensor(rng, {2, 2, 8, 8}, 0.3);
  const auto z = gc::random_tensor(rng, {2, 2});
  ad::GradCheckOptions o;
  o.step = 1e-6;
  EXPECT_TRUE(ad::grad_check([&] { return ad::l1_loss(g.forward(x, z, Mode::Train), y); }, g.parameters(), o).passed());
  EXPECT_TRUE(ad::grad_check([&] { return ad::bce_loss(d.forward(x, y, Mode::Train), true); }, d.parameters(), o).passed());
}

TEST(Losses, HandEvaluatedValues) {
  EXPECT_NEAR(discriminator_loss(Tensor::scalar(1.0), Tensor::scalar(0.0)).item(), 0.0, 1e-6);
  EXPECT_NEAR(discriminator_loss(Tensor::scalar(0.5), Tensor::scalar(0.5)).item(), 1.3862943611198906, 1e-12);

  const auto real = Tensor::from({4}, {0.2, 0.4, -0.1, 0.0});
  const auto fake = Tensor::from({4}, {0.3, 0.3, 0.0, 0.1});
  const auto loss = generator_loss(Tensor::scalar(0.5), fake, real, 100.0);
  EXPECT_NEAR(loss.total.item(), std::numbers::ln2 + 10.0, 1e-12);
  EXPECT_NEAR(generator_loss(Tensor::scalar(1.0), real, real, 100.0).total.item(), 0.0, 1e-6);
  EXPECT_DOUBLE_EQ(generator_loss(Tensor::scalar(0.3), fake, real, 0.0).total.item(),
                   ad::bce_loss(Tensor::scalar(0.3), true).item());
}

TEST(Losses, DiscriminatorLossMonotonicity) {
  auto real = Tensor::scalar(0.6, true);
  auto fake = Tensor::scalar(0.3, true);
  ad::backward(discriminator_loss(real, fake));
  EXPECT_LT(real.grad()[0], 0.0);
  EXPECT_GT(fake.grad()[0], 0.0);
}

TEST(Losses, GeneratorLossGradientThroughStubDiscriminator) {
  Rng rng(5);
  auto fake = gc::random_tensor(rng, {1, 2, 4, 4}, 0.5);
  const auto real = gc::random_tensor(rng, {1, 2, 4, 4}, 0.5);
  const auto w = gc::random_tensor(rng, {32, 1}, 0.2);
  w.node()->requires_grad = false;
  auto stub = [&](const Tensor& candidate) { return ad::sigmoid(ad::dense(ad::reshape(candidate, {1, 32}), w, Tensor())); };
  const auto report =
      ad::grad_check([&] { return generator_loss(stub(fake), fake, real, 0.0).total; }, {{"fake", fake}});
  EXPECT_TRUE(report.passed()) << report.max_rel_error();
}

TEST(Losses, L1GradientScalesLinearlyWithLambda) {
  Rng rng(6);
  auto fake = gc::away_from_zero(rng, {1, 2, 4, 4});
  const auto real = Tensor::zeros({1, 2, 4, 4});
  auto grad_at = [&](double lambda) {
    fake.zero_grad();
    ad::backward(generator_loss(ad::sigmoid(ad::mean(fake)), fake, real, lambda).total);
    return std::vector<double>(fake.grad().begin(), fake.grad().end());
  };
  const auto g0 = grad_at(0.0), g1 = grad_at(1.0), g10 = grad_at(10.0), g100 = grad_at(100.0);
  for (std::size_t i = 0; i < g0.size(); ++i) {
    const double l1 = g1[i] - g0[i];
    EXPECT_NEAR(g10[i] - g0[i], 10.0 * l1, 1e-12);
    EXPECT_NEAR(g100[i] - g0[i], 100.0 * l1, 1e-10);
  }
}

TEST(Training, AlternatingStepsTouchDisjointParameters) {
  Generator g(small_generator(), 1);
  Discriminator d(small_discriminator(), 2);
  auto gs = ad::make_adam(g.parameters(), 1e-2, 0.5, 0.999);
  auto ds = ad::make_adam(d.parameters(), 1e-2, 0.5, 0.999);
  Rng rng(3);
  const auto x = gc::random_tensor(rng, {2, 2, 8, 8});
  const auto y = gc::random_tensor(rng, {2, 2, 8, 8});
  const auto z = gc::random_tensor(rng, {2, 2});

  const auto g_before = g.state();
  const auto d_before = d.state();
  const auto fake = g.forward(x, z, Mode::Train);
  const auto g_after_forward = g.state();
  ad::backward(discriminator_loss(d.forward(x, y, Mode::Train), d.forward(x, fake.detach(), Mode::Train)));
  for (const auto& p : g.parameters()) EXPECT_FALSE(p.tensor.has_grad() && std::any_of(p.tensor.grad().begin(), p.tensor.grad().end(), [](double v) { return v != 0.0; }));
  ad::adam_step(d.parameters(), ds);
  EXPECT_EQ(g.state(), g_after_forward);
  const auto d_after = d.state();
  EXPECT_NE(d_after, d_before);

  ad::backward(generator_loss(d.forward(x, fake, Mode::Train), fake, y, 10.0).total);
  ad::zero_grads(d.parameters());
  ad::adam_step(g.parameters(), gs);
  // Only the weights change in the D step; running stats move with every train-mode forward.
  auto weights = [](const std::vector<NamedArray>& s) {
    std::vector<NamedArray> out;
    for (const auto& a : s)
      if (a.name.find("running") == std::string::npos) out.push_back(a);
    return out;
  };
  EXPECT_EQ(weights(d.state()), weights(d_after));
  EXPECT_NE(weights(g.state()), weights(g_before));
}

TEST(Config, JsonRoundTripAndValidation) {
  TrainConfig cfg;
  cfg.lambda_l1 = 250.0;
  cfg.log_match_band.reset();
  cfg.generator.head_kernel = 3;
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_EQ(back.generator, cfg.generator);
  EXPECT_FALSE(back.log_match_band.has_value());

  cfg = TrainConfig{};
  cfg.epochs = 0;
  EXPECT_THROW(validate_config(cfg), TrainError);
  cfg = TrainConfig{};
  cfg.checkpoint_every = 0;
  EXPECT_THROW(validate_config(cfg), TrainError);
  cfg = TrainConfig{};
  cfg.beta1 = 1.0;
  EXPECT_THROW(validate_config(cfg), TrainError);
  EXPECT_THROW(config_from_json("[1,2"), TrainError);
}

TEST(Images, GeometryAndRoundTrip) {
  const TrainConfig cfg;
  EXPECT_EQ(image_size(cfg.geometry, 512), 32u);
  EXPECT_THROW(image_size({64, 8, 64, 0}, 512), GeometryError);
  Rng rng(7);
  auto x = gc::random_tensor(rng, {512}).values();
  const auto band = dsp::bandpass_trapezoid(std::vector<double>(x.begin(), x.end()), 2.0, dsp::bands::kSeismic);
  const auto image = trace_to_image(band, 2.0, cfg.geometry, cfg.image_scale);
  ASSERT_EQ(image.size(), 2u * 32 * 32);
  const auto back = image_to_trace(image, 512, 2.0, cfg.geometry, cfg.image_scale);
  // Only the dropped Nyquist row is lost, and a band-limited trace barely reaches it.
  const double peak = peak_abs(band);
  for (std::size_t i = 0; i < 512; ++i) EXPECT_NEAR(back[i], band[i], 5e-3 * peak);
  EXPECT_THROW(image_to_trace(std::vector<double>(10), 512, 2.0, cfg.geometry, 0.1), GeometryError);
}

TEST(Checkpoint, RoundTripRestoresForwardBitExactly) {
  TempDir dir("ckpt");
  auto cfg = quick_config(2);
  const auto set = train(default_training_pairs(), cfg);
  ASSERT_EQ(set.checkpoints.size(), 2u);
  const auto& ckpt = set.checkpoints.back();
  save_checkpoint(ckpt, dir / "a.bin");
  const auto loaded = load_checkpoint(dir / "a.bin");
  EXPECT_EQ(loaded, ckpt);
  EXPECT_EQ(encode_checkpoint(loaded), read_bytes(dir / "a.bin"));

  auto g1 = restore_generator(ckpt);
  auto g2 = restore_generator(loaded);
  Rng rng(1);
  const auto x = gc::random_tensor(rng, {1, 2, 32, 32});
  const auto z = gc::random_tensor(rng, {1, 8});
  EXPECT_EQ(values(g1.forward(x, z, Mode::Eval)), values(g2.forward(x, z, Mode::Eval)));
}

TEST(Checkpoint, CorruptionAndMismatch) {
  auto cfg = quick_config(1);
  const auto ckpt = train(default_training_pairs(), cfg).checkpoints.back();
  auto bytes = encode_checkpoint(ckpt);
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  EXPECT_THROW(decode_checkpoint(truncated), CheckpointError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), CheckpointError);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(decode_checkpoint(bad_version), CheckpointError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_checkpoint(trailing), CheckpointError);

  Generator other(GeneratorSpec{}, 1);
  try {
    other.load_state(ckpt.generator);
    FAIL() << "mismatched spec accepted";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("enc"), std::string::npos) << e.what();
  }
}

TEST(Training, EmitsCheckpointsAndIsDeterministic) {
  TempDir a("train"), b("train");
  auto cfg = quick_config(4);
  cfg.checkpoint_every = 2;
  const auto pairs = default_training_pairs();
  ASSERT_EQ(pairs.size(), 4u);
  const auto first = train(pairs, cfg, {a.path(), false});
  const auto second = train(pairs, cfg, {b.path(), false});
  EXPECT_EQ(first.checkpoints.size(), 2u);
  EXPECT_EQ(first.history, second.history);
  EXPECT_EQ(first.history.size(), 4u);
  for (const char* name : {"ckpt_epoch_0002.bin", "ckpt_epoch_0004.bin", "losses.csv"})
    EXPECT_EQ(read_bytes(a / name), read_bytes(b / name)) << name;
  std::ifstream csv(a / "losses.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "epoch,batch,d_loss,g_adv,g_l1");
}

TEST(Training, KeepsOnlyTheLastCheckpoints) {
  auto cfg = quick_config(7);
  cfg.checkpoint_every = 2;
  cfg.keep_checkpoints = 2;
  const auto pairs = default_training_pairs();
  const auto kept = train(pairs, cfg);
  ASSERT_EQ(kept.checkpoints.size(), 2u);
  EXPECT_EQ(kept.checkpoints[0].epoch, 4u);
  EXPECT_EQ(kept.checkpoints[1].epoch, 6u);
  cfg.keep_checkpoints = 0;
  const auto all = train(pairs, cfg);
  ASSERT_EQ(all.checkpoints.size(), 3u);
  EXPECT_EQ(all.checkpoints[2].generator, kept.checkpoints[1].generator);
}

TEST(Training, LargeLambdaDrivesL1Down) {
  auto cfg = quick_config(200);
  cfg.lambda_l1 = 1e6;
  cfg.checkpoint_every = 200;
  cfg.lr = 1e-3;
  const auto pairs = default_training_pairs();
  const auto set = train({pairs.front()}, cfg);
  EXPECT_LT(set.history.back().g_l1, set.history.front().g_l1);
}

TEST(Training, Errors) {
  EXPECT_THROW(train({}, TrainConfig{}), TrainError);
  auto pairs = default_training_pairs();
  pairs[0].seismic.samples.resize(100);
  pairs[0].log.samples.resize(100);
  EXPECT_THROW(train(pairs, quick_config(1)), Error);
}

}  // namespace
}  // namespace bandext::cgan
