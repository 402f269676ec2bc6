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

// Reverse-mode automatic differentiation over dense double tensors.
//
// A Tensor is a shared handle to a graph node. Every op records its inputs
// and a backward closure when any input requires a gradient; backward()
// walks the graph in reverse topological order. Graphs are built fresh for
// each evaluation and released with the last handle.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bandext/errors.hpp"

namespace bandext::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {
struct Node;
}

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t dim(std::size_t i) const { return shape().at(i); }
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;

  std::span<const double> values() const;
  // Direct write access, for parameter updates and finite differences.
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t i) const { return values()[i]; }

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  // Shares values, drops graph history.
  Tensor detach() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents.
  std::function<void(Node&)> backward;

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

// Disables graph recording on this thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Populates grads of every reachable tensor that requires one. Leaf grads
// accumulate across calls until zeroed. Throws GraphError for non-scalars.
void backward(const Tensor& loss);

struct Parameter {
  std::string name;
  Tensor tensor;
};

// --- elementwise and structural ops ---------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

// (N, C1, H, W) + (N, C2, H, W) -> (N, C1 + C2, H, W)
Tensor concat_channels(const Tensor& a, const Tensor& b);
// Channels [begin, end) of an NCHW tensor.
Tensor slice_channels(const Tensor& a, std::size_t begin, std::size_t end);

// --- layers -----------------------------------------------------------------

// input (N, C, H, W), weight (O, C, k, k), bias (O) or undefined.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::size_t stride,
              std::size_t padding);

// Adjoint of conv2d with the same weight layout: input (N, O, h, w),
// weight (O, C, k, k), bias (C); output spatial size (h - 1) s - 2p + k.
Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::size_t stride,
                        std::size_t padding);

enum class Mode { Train, Eval };

struct RunningStats {
  std::vector<double> mean;
  std::vector<double> var;
  explicit RunningStats(std::size_t channels = 0) : mean(channels, 0.0), var(channels, 1.0) {}
};

// Per-channel standardisation with population variance. Train mode uses
// batch statistics and updates running stats by
// running = (1 - momentum) * running + momentum * batch.
Tensor batch_norm2d(const Tensor& input, const Tensor& gamma, const Tensor& beta, Mode mode,
                    RunningStats& running, double momentum = 0.1, double epsilon = 1e-5);

enum class ActivationKind { ReLU, LeakyReLU, Sigmoid, Tanh };

struct Activation {
  ActivationKind kind = ActivationKind::ReLU;
  double alpha = 0.2;  // LeakyReLU slope
};

Tensor activation(const Tensor& input, Activation act);
inline Tensor relu(const Tensor& x) { return activation(x, {ActivationKind::ReLU}); }
inline Tensor leaky_relu(const Tensor& x, double alpha = 0.2) {
  return activation(x, {ActivationKind::LeakyReLU, alpha});
}
inline Tensor sigmoid(const Tensor& x) { return activation(x, {ActivationKind::Sigmoid}); }
inline Tensor tanh(const Tensor& x) { return activation(x, {ActivationKind::Tanh}); }

// input (N, D), weight (D, M), bias (M): row vector times matrix.
Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias);

// Channel mixing with a separate matrix per row:
// out[n, o, r, t] = sum_c weight[o, c, r] * input[n, c, r, t].
Tensor row_linear(const Tensor& input, const Tensor& weight);

// --- losses ---------------------------------------------------------------

inline constexpr double kProbabilityClamp = 1e-7;

// Mean of -log(p) (target real) or -log(1 - p) (target fake), with p
// clamped to [1e-7, 1 - 1e-7].
Tensor bce_loss(const Tensor& prediction, bool target_is_real);

// Mean absolute difference; subgradient 0 at ties.
Tensor l1_loss(const Tensor& a, const Tensor& b);

// --- optimisation -----------------------------------------------------------

struct AdamState {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

AdamState make_adam(const std::vector<Parameter>& params, double lr, double beta1, double beta2,
                    double epsilon = 1e-8);

// Bias-corrected Adam update, then zeroes the grads. Throws OptimizerError if
// a parameter has no grad buffer or shapes disagree with the state.
void adam_step(const std::vector<Parameter>& params, AdamState& state);

void zero_grads(const std::vector<Parameter>& params);

// --- gradient checking ------------------------------------------------------

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;
  double max_rel_error() const;
  bool passed() const { return max_rel_error() <= tolerance; }
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |analytic - numeric| / max(|numeric|, denominator_floor).
  double denominator_floor = 1e-3;
  // 0 checks every element.
  std::size_t max_elements_per_input = 0;
};

// loss_fn rebuilds the graph from the current input values and returns a
// scalar. Compares its reverse-mode gradient against central differences.
GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, const std::vector<Parameter>& inputs,
                           const GradCheckOptions& options = {});

}  // namespace bandext::ad
