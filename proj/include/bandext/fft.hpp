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

// Thin real-FFT wrapper over FFTW. Plans are cached per length and created
// under a lock; execution is thread-safe.

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bandext::fft {

// Forward real transform: n real samples to n/2 + 1 complex bins (unscaled).
std::vector<std::complex<double>> rfft(std::span<const double> input);

// Inverse of rfft for a signal of length n; output is scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

}  // namespace bandext::fft
