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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bandext/core.hpp"

namespace bandext::dsp {

// Ormsby-style amplitude band given by four corner frequencies in Hz.
struct TrapezoidBand {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;

  // Linear ramps on [f1,f2] and [f3,f4], unity on [f2,f3], zero outside.
  // Equal corners make a step whose edge frequency is in the passband.
  double gain(double freq_hz) const;

  std::string to_string() const;
  friend bool operator==(const TrapezoidBand&, const TrapezoidBand&) = default;
};

// Parses "f1-f2-f3-f4". Throws BandError on malformed or unordered corners.
TrapezoidBand parse_band(std::string_view text);

// Throws BandError unless 0 <= f1 <= f2 <= f3 <= f4 <= nyquist_hz.
void validate_band(const TrapezoidBand& band, double nyquist_hz);

namespace bands {
inline constexpr TrapezoidBand kSeismic{3.0, 6.0, 60.0, 80.0};
inline constexpr TrapezoidBand kLowFrequency{0.0, 0.0, 8.0, 16.0};
inline constexpr TrapezoidBand kDisplay{0.0, 50.0, 250.0, 500.0};
inline constexpr TrapezoidBand kBroadband{0.0, 1.0, 160.0, 200.0};
inline constexpr TrapezoidBand kHighFrequency{60.0, 80.0, 120.0, 160.0};
}  // namespace bands

// Scales every corner by target_nyquist / source_nyquist when the band
// exceeds target_nyquist; otherwise returns the band unchanged.
TrapezoidBand fit_band_to_nyquist(const TrapezoidBand& band, double band_nyquist_hz,
                                  double target_nyquist_hz);

// Symmetric Ricker wavelet of length 2 * half_len + 1 centred on t = 0.
Trace ricker(double f_peak_hz, double dt_ms, std::size_t half_len);

// Zero-phase trapezoid filter applied by real-FFT multiplication.
Trace bandpass_trapezoid(const Trace& trace, const TrapezoidBand& band);
std::vector<double> bandpass_trapezoid(const std::vector<double>& samples, double dt_ms,
                                       const TrapezoidBand& band);

struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> amplitude;
};

Spectrum amplitude_spectrum(const Trace& trace);

struct SpectrogramGeometry {
  std::size_t window_len = 64;
  std::size_t hop = 16;
  std::size_t n_fft = 64;
  // Frame count; 0 selects ceil(original_len / hop).
  std::size_t n_frames = 0;

  std::size_t n_freq() const { return n_fft / 2 + 1; }
  friend bool operator==(const SpectrogramGeometry&, const SpectrogramGeometry&) = default;
};

// Complex half-spectrum per Hann-windowed frame, stored as two F x T planes
// in row-major order (frequency rows, frame columns).
struct Spectrogram {
  std::vector<double> real_plane;
  std::vector<double> imag_plane;
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::size_t n_fft = 0;
  std::size_t n_freq = 0;
  std::size_t n_frames = 0;
  std::size_t original_len = 0;
  std::size_t pad_left = 0;
  double dt_ms = kCanonicalDtMs;
  double t0_ms = 0.0;

  double& re(std::size_t f, std::size_t t) { return real_plane[f * n_frames + t]; }
  double& im(std::size_t f, std::size_t t) { return imag_plane[f * n_frames + t]; }
  double re(std::size_t f, std::size_t t) const { return real_plane[f * n_frames + t]; }
  double im(std::size_t f, std::size_t t) const { return imag_plane[f * n_frames + t]; }
};

// Periodic Hann window.
std::vector<double> hann_window(std::size_t length);

Spectrogram stft(const Trace& trace, const SpectrogramGeometry& geometry);
Spectrogram stft(const Trace& trace, std::size_t window_len, std::size_t hop, std::size_t n_fft);

// Weighted overlap-add least-squares inverse. Throws ReconstructionError if
// a retained sample has no window coverage.
Trace istft(const Spectrogram& spec, TraceKind kind = TraceKind::Broadband);

// Anti-alias low-pass at the new Nyquist (after removing the best-fit line)
// followed by linear interpolation onto t0 + i * dt_target_ms.
Trace resample_log(const Trace& log, double dt_target_ms, std::size_t n_target);

// Zero-lag Pearson correlation; returns nullopt when either input is constant.
std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b);

// Circular shift: out[(i + shift) mod n] = in[i].
std::vector<double> circular_shift(const std::vector<double>& samples, long shift);

}  // namespace bandext::dsp
