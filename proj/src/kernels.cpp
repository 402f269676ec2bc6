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

#include "bandext/kernels.hpp"

#include <algorithm>

namespace bandext::kernels {
namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 15;

// Output positions oh for which oh * s + kh - p lands inside [0, in).
struct Span1D {
  std::size_t begin;
  std::size_t end;
};

Span1D valid_outputs(std::size_t in, std::size_t out, std::size_t s, std::size_t p, std::size_t k_offset) {
  // Need oh * s + k_offset >= p and oh * s + k_offset - p < in.
  std::size_t begin = 0;
  if (k_offset < p) begin = (p - k_offset + s - 1) / s;
  std::size_t end = 0;
  if (in + p > k_offset) end = std::min(out, (in + p - k_offset - 1) / s + 1);
  if (end < begin) end = begin;
  return {begin, end};
}

}  // namespace

std::size_t ConvGeometry::out_h() const {
  if (in_h + 2 * padding < kernel) return 0;
  return (in_h + 2 * padding - kernel) / stride + 1;
}

std::size_t ConvGeometry::out_w() const {
  if (in_w + 2 * padding < kernel) return 0;
  return (in_w + 2 * padding - kernel) / stride + 1;
}

void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output) {
  const std::size_t oh_n = g.out_h(), ow_n = g.out_w();
  const std::size_t k = g.kernel, s = g.stride, p = g.padding;
  const std::size_t work = g.output_size() * g.in_channels * k * k;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
      double* out = output.data() + (n * g.out_channels + oc) * oh_n * ow_n;
      std::fill(out, out + oh_n * ow_n, bias.empty() ? 0.0 : bias[oc]);
      for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
        const double* in = input.data() + (n * g.in_channels + ic) * g.in_h * g.in_w;
        const double* w = weight.data() + (oc * g.in_channels + ic) * k * k;
        for (std::size_t kh = 0; kh < k; ++kh) {
          const auto rows = valid_outputs(g.in_h, oh_n, s, p, kh);
          for (std::size_t kw = 0; kw < k; ++kw) {
            const double wv = w[kh * k + kw];
            const auto cols = valid_outputs(g.in_w, ow_n, s, p, kw);
            for (std::size_t oh = rows.begin; oh < rows.end; ++oh) {
              const double* in_row = in + (oh * s + kh - p) * g.in_w;
              double* out_row = out + oh * ow_n;
              for (std::size_t ow = cols.begin; ow < cols.end; ++ow) out_row[ow] += wv * in_row[ow * s + kw - p];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_output,
                           std::span<const double> weight, std::span<double> grad_input) {
  const std::size_t oh_n = g.out_h(), ow_n = g.out_w();
  const std::size_t k = g.kernel, s = g.stride, p = g.padding;
  const std::size_t work = g.output_size() * g.in_channels * k * k;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
      double* gi = grad_input.data() + (n * g.in_channels + ic) * g.in_h * g.in_w;
      std::fill(gi, gi + g.in_h * g.in_w, 0.0);
      for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
        const double* go = grad_output.data() + (n * g.out_channels + oc) * oh_n * ow_n;
        const double* w = weight.data() + (oc * g.in_channels + ic) * k * k;
        for (std::size_t kh = 0; kh < k; ++kh) {
          const auto rows = valid_outputs(g.in_h, oh_n, s, p, kh);
          for (std::size_t kw = 0; kw < k; ++kw) {
            const double wv = w[kh * k + kw];
            const auto cols = valid_outputs(g.in_w, ow_n, s, p, kw);
            for (std::size_t oh = rows.begin; oh < rows.end; ++oh) {
              double* gi_row = gi + (oh * s + kh - p) * g.in_w;
              const double* go_row = go + oh * ow_n;
              for (std::size_t ow = cols.begin; ow < cols.end; ++ow) gi_row[ow * s + kw - p] += wv * go_row[ow];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> input,
                            std::span<const double> grad_output, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  const std::size_t oh_n = g.out_h(), ow_n = g.out_w();
  const std::size_t k = g.kernel, s = g.stride, p = g.padding;
  const std::size_t work = g.output_size() * g.in_channels * k * k;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
    if (!grad_bias.empty()) {
      double acc = 0.0;
      for (std::size_t n = 0; n < g.batch; ++n) {
        const double* go = grad_output.data() + (n * g.out_channels + oc) * oh_n * ow_n;
        for (std::size_t i = 0; i < oh_n * ow_n; ++i) acc += go[i];
      }
      grad_bias[oc] += acc;
    }
    for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
      double* gw = grad_weight.data() + (oc * g.in_channels + ic) * k * k;
      for (std::size_t kh = 0; kh < k; ++kh) {
        const auto rows = valid_outputs(g.in_h, oh_n, s, p, kh);
        for (std::size_t kw = 0; kw < k; ++kw) {
          const auto cols = valid_outputs(g.in_w, ow_n, s, p, kw);
          double acc = 0.0;
          for (std::size_t n = 0; n < g.batch; ++n) {
            const double* in = input.data() + (n * g.in_channels + ic) * g.in_h * g.in_w;
            const double* go = grad_output.data() + (n * g.out_channels + oc) * oh_n * ow_n;
            for (std::size_t oh = rows.begin; oh < rows.end; ++oh) {
              const double* in_row = in + (oh * s + kh - p) * g.in_w;
              const double* go_row = go + oh * ow_n;
              for (std::size_t ow = cols.begin; ow < cols.end; ++ow) acc += go_row[ow] * in_row[ow * s + kw - p];
            }
          }
          gw[kh * k + kw] += acc;
        }
      }
    }
  }
}

void dense_forward(std::size_t n, std::size_t d, std::size_t m, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output) {
#pragma omp parallel for schedule(static) if (n * d * m > kParallelThreshold)
  for (std::size_t i = 0; i < n; ++i) {
    double* out = output.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) out[j] = bias.empty() ? 0.0 : bias[j];
    for (std::size_t r = 0; r < d; ++r) {
      const double x = input[i * d + r];
      const double* w = weight.data() + r * m;
      for (std::size_t j = 0; j < m; ++j) out[j] += x * w[j];
    }
  }
}

}  // namespace bandext::kernels
