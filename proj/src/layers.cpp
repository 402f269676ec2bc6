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

#include <algorithm>
#include <cmath>

#include "autodiff_internal.hpp"
#include "bandext/autodiff.hpp"
#include "bandext/kernels.hpp"

namespace bandext::ad {
namespace {

using detail::Node;
using detail::wants_grad;

void add_into(std::vector<double>& dst, const std::vector<double>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

std::span<const double> bias_span(const Tensor& bias) {
  return bias.defined() ? bias.values() : std::span<const double>{};
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::size_t stride,
              std::size_t padding) {
  if (input.rank() != 4 || weight.rank() != 4 || weight.dim(1) != input.dim(1) || weight.dim(2) != weight.dim(3))
    throw ShapeError("conv2d: input " + shape_string(input.shape()) + " incompatible with weight " +
                     shape_string(weight.shape()));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(0)))
    throw ShapeError("conv2d: bias " + shape_string(bias.shape()) + " does not match " +
                     std::to_string(weight.dim(0)) + " output channels");
  if (stride == 0) throw ShapeError("conv2d: stride must be positive");
  const kernels::ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3),
                                weight.dim(0), weight.dim(2), stride,       padding};
  if (g.out_h() == 0 || g.out_w() == 0)
    throw ShapeError("conv2d: kernel " + std::to_string(g.kernel) + " does not fit input " +
                     shape_string(input.shape()));
  std::vector<double> out(g.output_size());
  kernels::conv2d_forward(g, input.values(), weight.values(), bias_span(bias), out);
  return detail::make_result({g.batch, g.out_channels, g.out_h(), g.out_w()}, std::move(out),
                             {&input, &weight, &bias}, [g](Node& self) {
                               auto& in = self.parents[0];
                               auto& w = self.parents[1];
                               auto& b = self.parents[2];
                               if (wants_grad(in)) {
                                 std::vector<double> gi(g.input_size());
                                 kernels::conv2d_backward_input(g, self.grad, w->value, gi);
                                 add_into(in->ensure_grad(), gi);
                               }
                               if (wants_grad(w) || wants_grad(b)) {
                                 std::vector<double> scratch_w;
                                 std::vector<double> scratch_b;
                                 std::span<double> gw, gb;
                                 if (wants_grad(w)) {
                                   gw = w->ensure_grad();
                                 } else {
                                   scratch_w.assign(g.weight_size(), 0.0);
                                   gw = scratch_w;
                                 }
                                 if (wants_grad(b)) gb = b->ensure_grad();
                                 kernels::conv2d_backward_weight(g, in->value, self.grad, gw, gb);
                               }
                             });
}

Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::size_t stride,
                        std::size_t padding) {
  if (input.rank() != 4 || weight.rank() != 4 || weight.dim(0) != input.dim(1) || weight.dim(2) != weight.dim(3))
    throw ShapeError("conv_transpose2d: input " + shape_string(input.shape()) + " incompatible with weight " +
                     shape_string(weight.shape()));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(1)))
    throw ShapeError("conv_transpose2d: bias " + shape_string(bias.shape()) + " does not match " +
                     std::to_string(weight.dim(1)) + " output channels");
  if (stride == 0) throw ShapeError("conv_transpose2d: stride must be positive");
  const std::size_t k = weight.dim(2);
  const long out_h = static_cast<long>((input.dim(2) - 1) * stride + k) - 2 * static_cast<long>(padding);
  const long out_w = static_cast<long>((input.dim(3) - 1) * stride + k) - 2 * static_cast<long>(padding);
  if (out_h <= 0 || out_w <= 0) throw ShapeError("conv_transpose2d: output would be empty");
  // Geometry of the forward convolution this op is the adjoint of.
  const kernels::ConvGeometry g{input.dim(0),
                                weight.dim(1),
                                static_cast<std::size_t>(out_h),
                                static_cast<std::size_t>(out_w),
                                weight.dim(0),
                                k,
                                stride,
                                padding};
  if (g.out_h() != input.dim(2) || g.out_w() != input.dim(3))
    throw ShapeError("conv_transpose2d: geometry does not invert for input " + shape_string(input.shape()));

  std::vector<double> out(g.input_size());
  kernels::conv2d_backward_input(g, input.values(), weight.values(), out);
  if (bias.defined()) {
    const std::size_t hw = g.in_h * g.in_w;
    for (std::size_t n = 0; n < g.batch; ++n)
      for (std::size_t c = 0; c < g.in_channels; ++c) {
        double* plane = out.data() + (n * g.in_channels + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) plane[i] += bias.at(c);
      }
  }
  return detail::make_result({g.batch, g.in_channels, g.in_h, g.in_w}, std::move(out), {&input, &weight, &bias},
                             [g](Node& self) {
                               auto& in = self.parents[0];
                               auto& w = self.parents[1];
                               auto& b = self.parents[2];
                               if (wants_grad(in)) {
                                 std::vector<double> gi(g.output_size());
                                 kernels::conv2d_forward(g, self.grad, w->value, {}, gi);
                                 add_into(in->ensure_grad(), gi);
                               }
                               if (wants_grad(w))
                                 kernels::conv2d_backward_weight(g, self.grad, in->value, w->ensure_grad(), {});
                               if (wants_grad(b)) {
                                 auto& gb = b->ensure_grad();
                                 const std::size_t hw = g.in_h * g.in_w;
                                 for (std::size_t c = 0; c < g.in_channels; ++c) {
                                   double acc = 0.0;
                                   for (std::size_t n = 0; n < g.batch; ++n) {
                                     const double* plane = self.grad.data() + (n * g.in_channels + c) * hw;
                                     for (std::size_t i = 0; i < hw; ++i) acc += plane[i];
                                   }
                                   gb[c] += acc;
                                 }
                               }
                             });
}

Tensor batch_norm2d(const Tensor& input, const Tensor& gamma, const Tensor& beta, Mode mode,
                    RunningStats& running, double momentum, double epsilon) {
  if (input.rank() != 4) throw ShapeError("batch_norm2d: expected NCHW input, got " + shape_string(input.shape()));
  const std::size_t n = input.dim(0), c = input.dim(1), hw = input.dim(2) * input.dim(3);
  if (gamma.size() != c || beta.size() != c || running.mean.size() != c || running.var.size() != c)
    throw ShapeError("batch_norm2d: affine or running stats do not match " + std::to_string(c) + " channels");
  const std::size_t count = n * hw;
  if (mode == Mode::Train && count < 2)
    throw StatError("batch_norm2d: training needs at least two values per channel");

  std::vector<double> mu(c), inv_std(c);
  const auto x = input.values();
  if (mode == Mode::Train) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < hw; ++j) s += x[(i * c + ch) * hw + j];
      const double m = s / static_cast<double>(count);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < hw; ++j) {
          const double d = x[(i * c + ch) * hw + j] - m;
          v += d * d;
        }
      v /= static_cast<double>(count);
      mu[ch] = m;
      inv_std[ch] = 1.0 / std::sqrt(v + epsilon);
      running.mean[ch] = (1.0 - momentum) * running.mean[ch] + momentum * m;
      running.var[ch] = (1.0 - momentum) * running.var[ch] + momentum * v;
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      mu[ch] = running.mean[ch];
      inv_std[ch] = 1.0 / std::sqrt(running.var[ch] + epsilon);
    }
  }

  std::vector<double> x_hat(input.size());
  std::vector<double> out(input.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t j = 0; j < hw; ++j) {
        const std::size_t idx = (i * c + ch) * hw + j;
        x_hat[idx] = (x[idx] - mu[ch]) * inv_std[ch];
        out[idx] = gamma.at(ch) * x_hat[idx] + beta.at(ch);
      }

  const bool train = mode == Mode::Train;
  return detail::make_result(
      input.shape(), std::move(out), {&input, &gamma, &beta},
      [n, c, hw, count, train, inv_std = std::move(inv_std), x_hat = std::move(x_hat)](Node& self) {
        auto& in = self.parents[0];
        auto& gm = self.parents[1];
        auto& bt = self.parents[2];
        const auto& dy = self.grad;
        std::vector<double> sum_dy(c, 0.0), sum_dy_xhat(c, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t j = 0; j < hw; ++j) {
              const std::size_t idx = (i * c + ch) * hw + j;
              sum_dy[ch] += dy[idx];
              sum_dy_xhat[ch] += dy[idx] * x_hat[idx];
            }
        if (wants_grad(gm)) {
          auto& g = gm->ensure_grad();
          for (std::size_t ch = 0; ch < c; ++ch) g[ch] += sum_dy_xhat[ch];
        }
        if (wants_grad(bt)) {
          auto& g = bt->ensure_grad();
          for (std::size_t ch = 0; ch < c; ++ch) g[ch] += sum_dy[ch];
        }
        if (wants_grad(in)) {
          auto& g = in->ensure_grad();
          const double m = static_cast<double>(count);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t ch = 0; ch < c; ++ch) {
              const double gam = gm->value[ch];
              for (std::size_t j = 0; j < hw; ++j) {
                const std::size_t idx = (i * c + ch) * hw + j;
                if (train) {
                  g[idx] += gam * inv_std[ch] / m *
                            (m * dy[idx] - sum_dy[ch] - x_hat[idx] * sum_dy_xhat[ch]);
                } else {
                  g[idx] += gam * inv_std[ch] * dy[idx];
                }
              }
            }
        }
      });
}

Tensor activation(const Tensor& input, Activation act) {
  const auto x = input.values();
  std::vector<double> out(x.size());
  switch (act.kind) {
    case ActivationKind::ReLU:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
      break;
    case ActivationKind::LeakyReLU:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : act.alpha * x[i];
      break;
    case ActivationKind::Sigmoid:
      for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-x[i])) : std::exp(x[i]) / (1.0 + std::exp(x[i]));
      }
      break;
    case ActivationKind::Tanh:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
      break;
  }
  return detail::make_result(input.shape(), std::move(out), {&input}, [act](Node& self) {
    auto& p = self.parents[0];
    auto& g = p->ensure_grad();
    const auto& xv = p->value;
    const auto& y = self.value;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double d = 0.0;
      switch (act.kind) {
        case ActivationKind::ReLU: d = xv[i] > 0.0 ? 1.0 : 0.0; break;
        case ActivationKind::LeakyReLU: d = xv[i] > 0.0 ? 1.0 : act.alpha; break;
        case ActivationKind::Sigmoid: d = y[i] * (1.0 - y[i]); break;
        case ActivationKind::Tanh: d = 1.0 - y[i] * y[i]; break;
      }
      g[i] += d * self.grad[i];
    }
  });
}

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (input.rank() != 2 || weight.rank() != 2 || weight.dim(0) != input.dim(1))
    throw ShapeError("dense: input " + shape_string(input.shape()) + " incompatible with weight " +
                     shape_string(weight.shape()));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(1)))
    throw ShapeError("dense: bias " + shape_string(bias.shape()) + " does not match weight " +
                     shape_string(weight.shape()));
  const std::size_t n = input.dim(0), d = input.dim(1), m = weight.dim(1);
  std::vector<double> out(n * m);
  kernels::dense_forward(n, d, m, input.values(), weight.values(), bias_span(bias), out);
  return detail::make_result({n, m}, std::move(out), {&input, &weight, &bias}, [n, d, m](Node& self) {
    auto& in = self.parents[0];
    auto& w = self.parents[1];
    auto& b = self.parents[2];
    const auto& dy = self.grad;
    if (wants_grad(in)) {
      auto& g = in->ensure_grad();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < d; ++r) {
          double acc = 0.0;
          for (std::size_t j = 0; j < m; ++j) acc += dy[i * m + j] * w->value[r * m + j];
          g[i * d + r] += acc;
        }
    }
    if (wants_grad(w)) {
      auto& g = w->ensure_grad();
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t j = 0; j < m; ++j) {
          double acc = 0.0;
          for (std::size_t i = 0; i < n; ++i) acc += in->value[i * d + r] * dy[i * m + j];
          g[r * m + j] += acc;
        }
    }
    if (wants_grad(b)) {
      auto& g = b->ensure_grad();
      for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += dy[i * m + j];
        g[j] += acc;
      }
    }
  });
}

Tensor row_linear(const Tensor& input, const Tensor& weight) {
  if (input.rank() != 4 || weight.rank() != 3 || weight.dim(1) != input.dim(1) || weight.dim(2) != input.dim(2))
    throw ShapeError("row_linear: input " + shape_string(input.shape()) + " incompatible with weight " +
                     shape_string(weight.shape()));
  const std::size_t n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3), o = weight.dim(0);
  const auto x = input.values();
  const auto g = weight.values();
  std::vector<double> out(n * o * h * w, 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t oc = 0; oc < o; ++oc)
      for (std::size_t ic = 0; ic < c; ++ic)
        for (std::size_t r = 0; r < h; ++r) {
          const double k = g[(oc * c + ic) * h + r];
          const double* src = &x[((b * c + ic) * h + r) * w];
          double* dst = &out[((b * o + oc) * h + r) * w];
          for (std::size_t t = 0; t < w; ++t) dst[t] += k * src[t];
        }
  return detail::make_result({n, o, h, w}, std::move(out), {&input, &weight}, [n, c, h, w, o](Node& self) {
    auto& in = self.parents[0];
    auto& wt = self.parents[1];
    const auto& dy = self.grad;
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t oc = 0; oc < o; ++oc)
        for (std::size_t ic = 0; ic < c; ++ic)
          for (std::size_t r = 0; r < h; ++r) {
            const std::size_t gi = ((b * o + oc) * h + r) * w;
            const std::size_t xi = ((b * c + ic) * h + r) * w;
            if (wants_grad(in)) {
              auto& gx = in->ensure_grad();
              const double k = wt->value[(oc * c + ic) * h + r];
              for (std::size_t t = 0; t < w; ++t) gx[xi + t] += k * dy[gi + t];
            }
            if (wants_grad(wt)) {
              double acc = 0.0;
              for (std::size_t t = 0; t < w; ++t) acc += in->value[xi + t] * dy[gi + t];
              wt->ensure_grad()[(oc * c + ic) * h + r] += acc;
            }
          }
  });
}

Tensor bce_loss(const Tensor& prediction, bool target_is_real) {
  const auto p = prediction.values();
  const double count = static_cast<double>(p.size());
  double acc = 0.0;
  for (double v : p) {
    const double pc = std::clamp(v, kProbabilityClamp, 1.0 - kProbabilityClamp);
    acc += target_is_real ? -std::log(pc) : -std::log(1.0 - pc);
  }
  return detail::make_result({1}, {acc / count}, {&prediction}, [target_is_real, count](Node& self) {
    auto& parent = self.parents[0];
    auto& g = parent->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = parent->value[i];
      if (v < kProbabilityClamp || v > 1.0 - kProbabilityClamp) continue;  // clamp is flat
      const double d = target_is_real ? -1.0 / v : 1.0 / (1.0 - v);
      g[i] += self.grad[0] * d / count;
    }
  });
}

Tensor l1_loss(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError("l1_loss: shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  const double count = static_cast<double>(a.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a.at(i) - b.at(i));
  return detail::make_result({1}, {acc / count}, {&a, &b}, [count](Node& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    const double scale_factor = self.grad[0] / count;
    const std::size_t n = pa->value.size();
    std::vector<double>* ga = wants_grad(pa) ? &pa->ensure_grad() : nullptr;
    std::vector<double>* gb = wants_grad(pb) ? &pb->ensure_grad() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = pa->value[i] - pb->value[i];
      const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      if (ga) (*ga)[i] += sgn * scale_factor;
      if (gb) (*gb)[i] -= sgn * scale_factor;
    }
  });
}

}  // namespace bandext::ad
