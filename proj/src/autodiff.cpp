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

#include "bandext/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "autodiff_internal.hpp"

namespace bandext::ad {
namespace {

thread_local bool g_grad_enabled = true;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
}

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

namespace detail {

Tensor make_result(Shape shape, std::vector<double> value, std::initializer_list<const Tensor*> inputs,
                   std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  if (g_grad_enabled)
    for (const Tensor* t : inputs)
      if (t && t->defined() && t->requires_grad()) needs = true;
  if (needs) {
    node->requires_grad = true;
    for (const Tensor* t : inputs) node->parents.push_back(t && t->defined() ? t->node_ptr() : nullptr);
    node->backward = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

bool wants_grad(const std::shared_ptr<Node>& n) { return n && n->requires_grad; }

}  // namespace detail

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = numel(shape);
  return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (numel(shape) != values.size())
    throw ShapeError("tensor shape " + shape_string(shape) + " does not match " + std::to_string(values.size()) +
                     " values");
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({1}, {value}, requires_grad); }

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::size() const { return node_->value.size(); }
std::span<const double> Tensor::values() const { return node_->value; }
std::span<double> Tensor::mutable_values() { return node_->value; }

double Tensor::item() const {
  if (size() != 1) throw GraphError("item() on a tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
void Tensor::set_requires_grad(bool flag) { node_->requires_grad = flag; }
bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }
std::span<const double> Tensor::grad() const { return node_->grad; }
std::span<double> Tensor::mutable_grad() { return node_->ensure_grad(); }

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::detach() const { return Tensor::from(shape(), node_->value, false); }

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1)
    throw GraphError("backward() needs a scalar loss, got " +
                     (loss.defined() ? shape_string(loss.shape()) : std::string("undefined")));
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{loss.node(), 0}};
  visited.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent && parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (auto* n : order)
    if (n->backward) n->grad.assign(n->value.size(), 0.0);
  loss.node()->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward) (*it)->backward(**it);
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return detail::make_result(a.shape(), std::move(out), {&a, &b}, [](detail::Node& self) {
    for (auto& p : self.parents) {
      if (!detail::wants_grad(p)) continue;
      auto& g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return detail::make_result(a.shape(), std::move(out), {&a, &b}, [](detail::Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      auto& p = self.parents[k];
      if (!detail::wants_grad(p)) continue;
      const double sign = k == 0 ? 1.0 : -1.0;
      auto& g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign * self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return detail::make_result(a.shape(), std::move(out), {&a, &b}, [](detail::Node& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (detail::wants_grad(pa)) {
      auto& g = pa->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb->value[i];
    }
    if (detail::wants_grad(pb)) {
      auto& g = pb->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa->value[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * factor;
  return detail::make_result(a.shape(), std::move(out), {&a}, [factor](detail::Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
  });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return detail::make_result({1}, {acc}, {&a}, [](detail::Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor reshape(const Tensor& a, Shape shape) {
  if (numel(shape) != a.size())
    throw ShapeError("reshape " + shape_string(a.shape()) + " to " + shape_string(shape));
  std::vector<double> out(a.values().begin(), a.values().end());
  return detail::make_result(std::move(shape), std::move(out), {&a}, [](detail::Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.rank() != 4 || b.rank() != 4 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
    throw ShapeError("concat_channels: incompatible " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()));
  const std::size_t n = a.dim(0), ca = a.dim(1), cb = b.dim(1), hw = a.dim(2) * a.dim(3);
  std::vector<double> out(n * (ca + cb) * hw);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(a.values().data() + i * ca * hw, ca * hw, out.data() + i * (ca + cb) * hw);
    std::copy_n(b.values().data() + i * cb * hw, cb * hw, out.data() + (i * (ca + cb) + ca) * hw);
  }
  return detail::make_result({n, ca + cb, a.dim(2), a.dim(3)}, std::move(out), {&a, &b},
                             [n, ca, cb, hw](detail::Node& self) {
                               auto& pa = self.parents[0];
                               auto& pb = self.parents[1];
                               for (std::size_t i = 0; i < n; ++i) {
                                 const double* src = self.grad.data() + i * (ca + cb) * hw;
                                 if (detail::wants_grad(pa)) {
                                   auto& g = pa->ensure_grad();
                                   for (std::size_t j = 0; j < ca * hw; ++j) g[i * ca * hw + j] += src[j];
                                 }
                                 if (detail::wants_grad(pb)) {
                                   auto& g = pb->ensure_grad();
                                   for (std::size_t j = 0; j < cb * hw; ++j) g[i * cb * hw + j] += src[ca * hw + j];
                                 }
                               }
                             });
}

Tensor slice_channels(const Tensor& a, std::size_t begin, std::size_t end) {
  if (a.rank() != 4 || begin >= end || end > a.dim(1))
    throw ShapeError("slice_channels: bad range on " + shape_string(a.shape()));
  const std::size_t n = a.dim(0), c = a.dim(1), hw = a.dim(2) * a.dim(3), cs = end - begin;
  std::vector<double> out(n * cs * hw);
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(a.values().data() + (i * c + begin) * hw, cs * hw, out.data() + i * cs * hw);
  return detail::make_result({n, cs, a.dim(2), a.dim(3)}, std::move(out), {&a},
                             [n, c, hw, cs, begin](detail::Node& self) {
                               auto& g = self.parents[0]->ensure_grad();
                               for (std::size_t i = 0; i < n; ++i)
                                 for (std::size_t j = 0; j < cs * hw; ++j)
                                   g[(i * c + begin) * hw + j] += self.grad[i * cs * hw + j];
                             });
}

AdamState make_adam(const std::vector<Parameter>& params, double lr, double beta1, double beta2,
                    double epsilon) {
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
    throw OptimizerError("Adam betas must lie in (0, 1)");
  AdamState state;
  state.lr = lr;
  state.beta1 = beta1;
  state.beta2 = beta2;
  state.epsilon = epsilon;
  for (const auto& p : params) {
    state.m.emplace_back(p.tensor.size(), 0.0);
    state.v.emplace_back(p.tensor.size(), 0.0);
  }
  return state;
}

void adam_step(const std::vector<Parameter>& params, AdamState& state) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw OptimizerError("Adam state does not match the parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].tensor.has_grad()) throw OptimizerError("parameter '" + params[i].name + "' has no gradient");
    if (state.m[i].size() != params[i].tensor.size())
      throw OptimizerError("Adam moment shape mismatch for '" + params[i].name + "'");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor p = params[i].tensor;
    auto values = p.mutable_values();
    auto grad = p.mutable_grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grad[j];
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      values[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
      grad[j] = 0.0;
    }
  }
}

void zero_grads(const std::vector<Parameter>& params) {
  for (const auto& p : params) {
    Tensor t = p.tensor;
    t.zero_grad();
  }
}

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.max_rel_error);
  return worst;
}

GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, const std::vector<Parameter>& inputs,
                           const GradCheckOptions& options) {
  GradCheckReport report;
  report.tolerance = options.tolerance;
  zero_grads(inputs);
  backward(loss_fn());
  for (const auto& input : inputs) {
    Tensor t = input.tensor;
    GradCheckEntry entry;
    entry.name = input.name;
    const std::vector<double> analytic = t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                                                       : std::vector<double>(t.size(), 0.0);
    std::size_t count = t.size();
    std::size_t stride = 1;
    if (options.max_elements_per_input && count > options.max_elements_per_input) {
      stride = (count + options.max_elements_per_input - 1) / options.max_elements_per_input;
    }
    auto values = t.mutable_values();
    for (std::size_t i = 0; i < count; i += stride) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const double up = loss_fn().item();
      values[i] = saved - options.step;
      const double down = loss_fn().item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double abs_err = std::abs(analytic[i] - numeric);
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
      entry.max_rel_error =
          std::max(entry.max_rel_error, abs_err / std::max(std::abs(numeric), options.denominator_floor));
      ++entry.checked;
    }
    report.entries.push_back(entry);
  }
  zero_grads(inputs);
  return report;
}

}  // namespace bandext::ad
