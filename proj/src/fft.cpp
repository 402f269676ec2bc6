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

#include "bandext/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bandext::fft {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Planning is not thread-safe in FFTW; executing an existing plan on new
// arrays is. FFTW_UNALIGNED keeps the plans valid for any std::vector buffer
// and fixes the codelet choice, so results do not depend on allocation.
const PlanPair& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<std::complex<double>> bins(n / 2 + 1);
  const int len = static_cast<int>(n);
  auto* cbuf = reinterpret_cast<fftw_complex*>(bins.data());
  PlanPair plans;
  plans.forward = fftw_plan_dft_r2c_1d(len, real.data(), cbuf, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.inverse = fftw_plan_dft_c2r_1d(len, cbuf, real.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
  return cache.emplace(n, plans).first->second;
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> input) {
  const std::size_t n = input.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  if (n == 0) return out;
  std::vector<double> in(input.begin(), input.end());
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
  std::vector<double> out(n);
  if (n == 0) return out;
  // c2r destroys its input; work on a copy.
  std::vector<std::complex<double>> work(n / 2 + 1);
  for (std::size_t k = 0; k < work.size() && k < bins.size(); ++k) work[k] = bins[k];
  fftw_execute_dft_c2r(plans_for(n).inverse, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace bandext::fft
