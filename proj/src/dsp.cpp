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

#include "bandext/dsp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bandext/fft.hpp"

namespace bandext::dsp {
namespace {

constexpr double kNyquistSlack = 1e-9;

double bin_frequency(std::size_t k, std::size_t n, double dt_ms) {
  return static_cast<double>(k) / (static_cast<double>(n) * dt_ms * 1e-3);
}

}  // namespace

double TrapezoidBand::gain(double f) const {
  if (f < f1 || f > f4) return 0.0;
  if (f >= f2 && f <= f3) return 1.0;
  if (f < f2) return (f - f1) / (f2 - f1);
  return (f4 - f) / (f4 - f3);
}

std::string TrapezoidBand::to_string() const {
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  return fmt(f1) + "-" + fmt(f2) + "-" + fmt(f3) + "-" + fmt(f4);
}

TrapezoidBand parse_band(std::string_view text) {
  double corners[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t end = (i < 3) ? text.find('-', pos) : text.size();
    if (end == std::string_view::npos || end == pos)
      throw BandError("band must look like f1-f2-f3-f4: '" + std::string(text) + "'");
    const auto token = text.substr(pos, end - pos);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), corners[i]);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw BandError("bad band corner '" + std::string(token) + "'");
    pos = end + 1;
  }
  TrapezoidBand band{corners[0], corners[1], corners[2], corners[3]};
  if (!(band.f1 >= 0.0 && band.f1 <= band.f2 && band.f2 <= band.f3 && band.f3 <= band.f4))
    throw BandError("band corners must be non-decreasing: " + band.to_string());
  return band;
}

void validate_band(const TrapezoidBand& band, double nyquist_hz) {
  if (!(band.f1 >= 0.0 && band.f1 <= band.f2 && band.f2 <= band.f3 && band.f3 <= band.f4))
    throw BandError("band corners must be non-decreasing: " + band.to_string());
  if (band.f4 > nyquist_hz * (1.0 + kNyquistSlack))
    throw BandError("band " + band.to_string() + " exceeds Nyquist " + std::to_string(nyquist_hz) + " Hz");
}

TrapezoidBand fit_band_to_nyquist(const TrapezoidBand& band, double band_nyquist_hz,
                                  double target_nyquist_hz) {
  if (band.f4 <= target_nyquist_hz) return band;
  const double s = target_nyquist_hz / band_nyquist_hz;
  return {band.f1 * s, band.f2 * s, band.f3 * s, band.f4 * s};
}

Trace ricker(double f_peak_hz, double dt_ms, std::size_t half_len) {
  if (!(dt_ms > 0.0)) throw BandError("ricker: dt must be positive");
  const double nyquist = 500.0 / dt_ms;
  if (!(f_peak_hz > 0.0) || f_peak_hz >= nyquist)
    throw BandError("ricker: peak frequency must lie in (0, Nyquist)");
  if (half_len < 1) throw BandError("ricker: half_len must be at least 1");
  Trace w;
  w.id = "ricker";
  w.kind = TraceKind::Seismic;
  w.dt_ms = dt_ms;
  w.t0_ms = -static_cast<double>(half_len) * dt_ms;
  w.samples.resize(2 * half_len + 1);
  const double pf2 = std::numbers::pi * std::numbers::pi * f_peak_hz * f_peak_hz;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double offset = static_cast<double>(i) - static_cast<double>(half_len);
    const double t = offset * dt_ms * 1e-3;
    const double a = pf2 * t * t;
    w.samples[i] = (1.0 - 2.0 * a) * std::exp(-a);
  }
  return w;
}

std::vector<double> bandpass_trapezoid(const std::vector<double>& samples, double dt_ms,
                                       const TrapezoidBand& band) {
  validate_band(band, 500.0 / dt_ms);
  const std::size_t n = samples.size();
  auto bins = fft::rfft(samples);
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] *= band.gain(bin_frequency(k, n, dt_ms));
  return fft::irfft(bins, n);
}

Trace bandpass_trapezoid(const Trace& trace, const TrapezoidBand& band) {
  validate_trace(trace);
  Trace out = trace;
  out.samples = bandpass_trapezoid(trace.samples, trace.dt_ms, band);
  return out;
}

Spectrum amplitude_spectrum(const Trace& trace) {
  validate_trace(trace);
  const auto bins = fft::rfft(trace.samples);
  Spectrum s;
  s.freqs.resize(bins.size());
  s.amplitude.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    s.freqs[k] = bin_frequency(k, trace.size(), trace.dt_ms);
    s.amplitude[k] = std::abs(bins[k]);
  }
  return s;
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(length));
  return w;
}

Spectrogram stft(const Trace& trace, const SpectrogramGeometry& g) {
  validate_trace(trace);
  if (g.hop == 0 || g.hop > g.window_len || g.window_len > g.n_fft || g.n_fft < 2)
    throw SpectrogramError("stft geometry requires 0 < hop <= window_len <= n_fft");
  const std::size_t n = trace.size();
  const std::size_t frames = g.n_frames ? g.n_frames : (n + g.hop - 1) / g.hop;
  const std::size_t padded = (frames - 1) * g.hop + g.window_len;
  if (frames == 0 || padded < n)
    throw SpectrogramError("stft: " + std::to_string(frames) + " frames cannot cover " + std::to_string(n) +
                           " samples");

  Spectrogram spec;
  spec.window_len = g.window_len;
  spec.hop = g.hop;
  spec.n_fft = g.n_fft;
  spec.n_freq = g.n_freq();
  spec.n_frames = frames;
  spec.original_len = n;
  spec.pad_left = (padded - n) / 2;
  spec.dt_ms = trace.dt_ms;
  spec.t0_ms = trace.t0_ms;
  spec.real_plane.assign(spec.n_freq * frames, 0.0);
  spec.imag_plane.assign(spec.n_freq * frames, 0.0);

  std::vector<double> padded_samples(padded, 0.0);
  std::copy(trace.samples.begin(), trace.samples.end(), padded_samples.begin() + spec.pad_left);
  const auto window = hann_window(g.window_len);
  std::vector<double> frame(g.n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (std::size_t j = 0; j < g.window_len; ++j) frame[j] = window[j] * padded_samples[t * g.hop + j];
    const auto bins = fft::rfft(frame);
    for (std::size_t f = 0; f < spec.n_freq; ++f) {
      spec.re(f, t) = bins[f].real();
      spec.im(f, t) = bins[f].imag();
    }
  }
  return spec;
}

Spectrogram stft(const Trace& trace, std::size_t window_len, std::size_t hop, std::size_t n_fft) {
  return stft(trace, SpectrogramGeometry{window_len, hop, n_fft, 0});
}

Trace istft(const Spectrogram& spec, TraceKind kind) {
  if (spec.n_freq != spec.n_fft / 2 + 1 || spec.window_len > spec.n_fft || spec.hop == 0 ||
      spec.real_plane.size() != spec.n_freq * spec.n_frames ||
      spec.imag_plane.size() != spec.n_freq * spec.n_frames)
    throw SpectrogramError("istft: inconsistent spectrogram geometry");
  const std::size_t padded = (spec.n_frames - 1) * spec.hop + spec.window_len;
  if (spec.pad_left + spec.original_len > padded) throw SpectrogramError("istft: padding exceeds frame support");

  const auto window = hann_window(spec.window_len);
  std::vector<double> acc(padded, 0.0);
  std::vector<double> wsum(padded, 0.0);
  std::vector<std::complex<double>> bins(spec.n_freq);
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    for (std::size_t f = 0; f < spec.n_freq; ++f) bins[f] = {spec.re(f, t), spec.im(f, t)};
    const auto frame = fft::irfft(bins, spec.n_fft);
    for (std::size_t j = 0; j < spec.window_len; ++j) {
      acc[t * spec.hop + j] += window[j] * frame[j];
      wsum[t * spec.hop + j] += window[j] * window[j];
    }
  }

  Trace out;
  out.id = "istft";
  out.kind = kind;
  out.dt_ms = spec.dt_ms;
  out.t0_ms = spec.t0_ms;
  out.samples.resize(spec.original_len);
  for (std::size_t i = 0; i < spec.original_len; ++i) {
    const std::size_t p = spec.pad_left + i;
    if (wsum[p] < 1e-12)
      throw ReconstructionError("istft: zero window energy at sample " + std::to_string(i));
    out.samples[i] = acc[p] / wsum[p];
  }
  return out;
}

Trace resample_log(const Trace& log, double dt_target_ms, std::size_t n_target) {
  validate_trace(log);
  if (n_target == 0) throw ResampleError("resample_log: n_target must be positive");
  if (!(dt_target_ms > 0.0)) throw ResampleError("resample_log: target interval must be positive");
  if (dt_target_ms < log.dt_ms * (1.0 - 1e-12))
    throw ResampleError("resample_log: upsampling from " + std::to_string(log.dt_ms) + " ms to " +
                        std::to_string(dt_target_ms) + " ms is not supported");

  const std::size_t n = log.size();
  std::vector<double> source = log.samples;

  if (dt_target_ms != log.dt_ms && n > 2) {
    // Remove the least-squares line so that the circular filter sees no
    // end-to-end jump and ramps pass through untouched.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i);
      sx += x;
      sy += source[i];
      sxx += x * x;
      sxy += x * source[i];
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / nn;
    std::vector<double> extended(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = source[i] - (intercept + slope * static_cast<double>(i));
      extended[i] = r;
      extended[2 * n - 1 - i] = r;
    }
    const double new_nyquist = 500.0 / dt_target_ms;
    const TrapezoidBand anti_alias{0.0, 0.0, 0.8 * new_nyquist, new_nyquist};
    extended = bandpass_trapezoid(extended, log.dt_ms, anti_alias);
    for (std::size_t i = 0; i < n; ++i) source[i] = extended[i] + intercept + slope * static_cast<double>(i);
  }

  Trace out = log;
  out.dt_ms = dt_target_ms;
  out.samples.resize(n_target);
  for (std::size_t i = 0; i < n_target; ++i) {
    const double pos = static_cast<double>(i) * dt_target_ms / log.dt_ms;
    if (pos >= static_cast<double>(n - 1)) {
      out.samples[i] = source[n - 1];
      continue;
    }
    const auto j = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(j);
    out.samples[i] = frac == 0.0 ? source[j] : (1.0 - frac) * source[j] + frac * source[j + 1];
  }
  return out;
}

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return std::nullopt;
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> circular_shift(const std::vector<double>& samples, long shift) {
  const long n = static_cast<long>(samples.size());
  std::vector<double> out(samples.size());
  if (n == 0) return out;
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>((((i + shift) % n) + n) % n)] = samples[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace bandext::dsp
