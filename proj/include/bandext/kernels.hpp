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

// Convolution and dense kernels on NCHW buffers.
//
// The parallel versions split work so that every output element is written
// by exactly one thread and accumulated in a fixed order; results are
// therefore independent of the thread count. The reference versions are
// plain serial loops kept for testing and benchmarking.

#pragma once

#include <cstddef>
#include <span>

namespace bandext::kernels {

struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t in_h = 1;
  std::size_t in_w = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  // floor((in + 2p - k) / s) + 1; zero when the kernel does not fit.
  std::size_t out_h() const;
  std::size_t out_w() const;
  std::size_t input_size() const { return batch * in_channels * in_h * in_w; }
  std::size_t output_size() const { return batch * out_channels * out_h() * out_w(); }
  std::size_t weight_size() const { return out_channels * in_channels * kernel * kernel; }
};

// output = conv(input, weight) + bias; weight is (out, in, k, k). An empty
// bias span means no bias.
void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output);

// grad_input = adjoint of the convolution applied to grad_output (overwrites).
void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_output,
                           std::span<const double> weight, std::span<double> grad_input);

// grad_weight (and grad_bias when non-empty) are accumulated into.
void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> input,
                            std::span<const double> grad_output, std::span<double> grad_weight,
                            std::span<double> grad_bias);

// out(N, M) = in(N, D) * W(D, M) + b(M)
void dense_forward(std::size_t n, std::size_t d, std::size_t m, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output);

namespace reference {

void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output);
void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_output,
                           std::span<const double> weight, std::span<double> grad_input);
void conv2d_backward_weight(const ConvGeometry& g, std::span<const double> input,
                            std::span<const double> grad_output, std::span<double> grad_weight,
                            std::span<double> grad_bias);
void dense_forward(std::size_t n, std::size_t d, std::size_t m, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias, std::span<double> output);

}  // namespace reference
}  // namespace bandext::kernels
