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

// Textbook loops, one output element at a time with explicit bounds checks.

#include <algorithm>

#include "bandext/kernels.hpp"

namespace bandext::kernels::reference {
namespace {

long input_coord(std::size_t o, std::size_t kk, const ConvGeometry& g) {
  return static_cast<long>(o * g.stride + kk) - static_cast<long>(g.padding);
}

}  // namespace

void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output) {
  const std::size_t oh_n = g.out_h(), ow_n = g.out_w(), k = g.kernel;
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t oc = 0; oc < g.out_channels; ++oc)
      for (std::size_t oh = 0; oh < oh_n; ++oh)
        for (std::size_t ow = 0; ow < ow_n; ++ow) {
          double acc = bias.empty() ? 0.0 : bias[oc];
          for (std::size_t ic = 0; ic < g.in_channels; ++ic)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                const long ih = input_coord(oh, kh, g);
                const long iw = input_coord(ow, kw, g);
                if (ih < 0 || iw < 0 || ih >= static_cast<long>(g.in_h) || iw >= static_cast<long>(g.in_w)) continue;
                acc += weight[((oc * g.in_channels + ic) * k + kh) * k + kw] *
                       input[((n * g.in_channels + ic) * g.in_h + static_cast<std::size_t>(ih)) * g.in_w +
                             static_cast<std::size_t>(iw)];
              }
          output[((n * g.out_channels + oc) * oh_n + oh) * ow_n + ow] = acc;
        }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_output,
                           std::span<const double> weight, std::span<double> grad_input) {
  const std::size_t oh_n = g.out_h(), ow_n = g.out_w(), k = g.kernel;
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t oc = 0; oc < g.out_channels; ++oc)
      for (std::size_t oh = 0; oh < oh_n; ++oh)
        for (std::size_t ow = 0; ow < ow_n; ++ow) {
          const double go = grad_output[((n * g.out_channels + oc) * oh_n + oh) * ow_n + ow];
          for (std::size_t ic = 0; ic < g.in_channels; ++ic)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                const long ih = input_coord(oh, kh, g);
                const long iw = input_coord(ow, kw, g);
                if (ih < 0 || iw < 0 || ih >= static_cast<long>(g.in_h) || iw >= static_cast<long>(g.in_w)) continue;
                grad_input[((n * g.in_channels + ic) * g.in_h + static_cast<std::size_t>(ih)) * g.in_w +
                           static_cast<std::size_t>(iw)] += go * weight[((oc * g.in_channels + ic) * k + kh) * k + kw];
              }
        }
}

void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> input,
                            std::span<const double> grad_output, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  const std::size_t oh_n = g.out_h(), ow_n = g.out_w(), k = g.kernel;
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t oc = 0; oc < g.out_channels; ++oc)
      for (std::size_t oh = 0; oh < oh_n; ++oh)
        for (std::size_t ow = 0; ow < ow_n; ++ow) {
          const double go = grad_output[((n * g.out_channels + oc) * oh_n + oh) * ow_n + ow];
          if (!grad_bias.empty()) grad_bias[oc] += go;
          for (std::size_t ic = 0; ic < g.in_channels; ++ic)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                const long ih = input_coord(oh, kh, g);
                const long iw = input_coord(ow, kw, g);
                if (ih < 0 || iw < 0 || ih >= static_cast<long>(g.in_h) || iw >= static_cast<long>(g.in_w)) continue;
                grad_weight[((oc * g.in_channels + ic) * k + kh) * k + kw] +=
                    go * input[((n * g.in_channels + ic) * g.in_h + static_cast<std::size_t>(ih)) * g.in_w +
                               static_cast<std::size_t>(iw)];
              }
        }
}

void dense_forward(std::size_t n, std::size_t d, std::size_t m, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double acc = bias.empty() ? 0.0 : bias[j];
      for (std::size_t r = 0; r < d; ++r) acc += input[i * d + r] * weight[r * m + j];
      output[i * m + j] = acc;
    }
}

}  // namespace bandext::kernels::reference
